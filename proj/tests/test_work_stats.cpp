#include "bjj/error.hpp"
#include "bjj/work_stats.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bjj;

TEST_SUITE("work-stats") {

TEST_CASE("trivial quenches give a single zero-work entry") {
    auto d = sudden_work_distribution({20, 1.0, 0.3}, {20, 1.0, 0.3});
    double p_zero = 0.0;
    for (const auto& e : d.entries) {
        if (std::abs(e.work) < 1e-12) p_zero += e.probability;
    }
    CHECK(p_zero == doctest::Approx(1.0).epsilon(1e-12));

    d = sudden_work_distribution({1, 1.0, 0.0}, {1, 1.0, 7.0});
    CHECK(d.entries.front().work == doctest::Approx(0.0));
    CHECK(d.entries.front().probability == doctest::Approx(1.0).epsilon(1e-12));

    const auto m = sudden_moments({20, 1.0, 0.3}, {20, 1.0, 0.3});
    CHECK(std::abs(m.mean) < 1e-12);
    CHECK(std::abs(m.variance) < 1e-12);
    CHECK(std::abs(m.w_irr) < 1e-12);
}

TEST_CASE("N=2 quench 0 -> 2J by hand") {
    const auto d = sudden_work_distribution({2, 1.0, 0.0}, {2, 1.0, 2.0});
    REQUIRE(d.entries.size() == 3);
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    const double p_low = (1.0 + phi) * (1.0 + phi) / (2.0 * (1.0 + phi * phi));
    CHECK(d.entries[0].work == doctest::Approx(3.0 - std::sqrt(5.0)).epsilon(1e-13));
    CHECK(d.entries[0].probability == doctest::Approx(p_low).epsilon(1e-13));
    CHECK(d.entries[1].work == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(d.entries[1].probability < 1e-28);
    CHECK(d.entries[2].probability == doctest::Approx(1.0 - p_low).epsilon(1e-12));
    CHECK(d.entries[0].work == doctest::Approx(d.delta_f()).epsilon(1e-13));
}

TEST_CASE("U_i = 0 moments of the N=100 quench to 0.1J") {
    const ModelParams i{100, 1.0, 0.0};
    const ModelParams f{100, 1.0, 0.1};
    const auto m = sudden_moments(i, f);
    CHECK(m.w_quant == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(m.variance == doctest::Approx(0.01 * 100 * 99 / 8.0).epsilon(1e-10));
    CHECK(std::abs(m.variance / (0.01 * 100 * 100 / 8.0) - 1.0) < 0.011);
    CHECK(m.w_class == doctest::Approx(0.1 * 50 * 49));
    CHECK(m.mean == doctest::Approx(m.w_class + m.w_quant).epsilon(1e-12));

    const auto from_dist = moments_of(sudden_work_distribution(i, f), m.w_class);
    CHECK(std::abs(from_dist.mean - m.mean) < 1e-8);
    CHECK(std::abs(from_dist.variance - m.variance) < 1e-8);
    CHECK(std::abs(from_dist.delta_f - m.delta_f) < 1e-8);
}

TEST_CASE("quench back down extracts work") {
    const auto m = sudden_moments({50, 1.0, 2.0}, {50, 1.0, 0.5});
    CHECK(m.w_quant < 0.0);
    CHECK(m.mean < 0.0);
    CHECK(m.w_irr >= 0.0);
}

TEST_CASE("oscillator closed forms") {
    const double n = 100;
    for (double uf : {0.01, 0.5, 3.0}) {
        const auto q = qho_sudden_moments({100, 1.0, 0.0}, {100, 1.0, uf});
        CHECK(q.w_irr == doctest::Approx(n * uf / 4 + 1 - std::sqrt(uf * n / 2 + 1)).epsilon(1e-13));
        const auto s = qho_limit_moments({100, 1.0, 0.0}, {100, 1.0, uf}, QuenchLimit::small_initial);
        CHECK(s.moments.w_irr == doctest::Approx(q.w_irr).epsilon(1e-13));
        CHECK(s.moments.w_quant == doctest::Approx(q.w_quant).epsilon(1e-13));
        CHECK(s.moments.variance == doctest::Approx(q.variance).epsilon(1e-13));
        CHECK(s.regime_ratio == 0.0);
    }
    const auto weak = qho_sudden_moments({100, 1.0, 0.0}, {100, 1.0, 1e-3});
    CHECK(weak.w_irr == doctest::Approx(3.125e-4).epsilon(2e-3));
    const auto strong = qho_sudden_moments({100, 1.0, 0.0}, {100, 1.0, 1e4});
    CHECK(strong.w_irr == doctest::Approx(2.5e5).epsilon(3e-3));
    const auto lim = qho_quench_strength_limits({100, 1.0, 1e-3});
    CHECK(lim.w_irr_weak == doctest::Approx(3.125e-4));
}

TEST_CASE("large U_i limit") {
    const auto l = qho_limit_moments({100, 1.0, 100.0}, {100, 1.0, 10.0}, QuenchLimit::large_initial);
    const double expected = -90.0 / 4.0 * std::sqrt(2.0) - std::sqrt(50.0) * (std::sqrt(10.0) - 10.0);
    CHECK(l.moments.w_irr == doctest::Approx(expected).epsilon(1e-13));
    CHECK(l.moments.w_irr == doctest::Approx(16.53).epsilon(1e-3));
    CHECK(l.regime_ratio == doctest::Approx(5000.0));

    // variance against the full closed form once sqrt(U_i N/2J + 1) ~ sqrt(U_i N/2J)
    const ModelParams i{100, 1.0, 1e3};
    const ModelParams f{100, 1.0, 10.0};
    const auto lv = qho_limit_moments(i, f, QuenchLimit::large_initial);
    CHECK(lv.moments.variance == doctest::Approx(100.0 * (1e3 - 20.0) / 4.0));
    CHECK(std::abs(lv.moments.variance / qho_sudden_moments(i, f).variance - 1.0) < 2e-3);
}

TEST_CASE("exponential density") {
    const auto d = exponential_work_density({100, 1.0, 0.0}, {100, 1.0, 0.1});
    CHECK(d.sigma() == doctest::Approx(5.0));
    CHECK(d.mean() == doctest::Approx(2.5));
    CHECK(d.variance() == doctest::Approx(12.5));
    CHECK(d.cdf(1e4) == doctest::Approx(1.0));
    // sqrt substitution w = s^2 removes the endpoint singularity
    double integral = 0.0, first = 0.0;
    const int steps = 200000;
    const double smax = std::sqrt(60.0 * d.sigma());
    for (int i = 0; i < steps; ++i) {
        const double s = (i + 0.5) * smax / steps;
        const double w = s * s;
        integral += d.density(w) * 2.0 * s * smax / steps;
        first += w * d.density(w) * 2.0 * s * smax / steps;
    }
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(first == doctest::Approx(d.mean()).epsilon(1e-8));
    CHECK(d.cdf(3.0) == doctest::Approx(std::erf(std::sqrt(0.6))));

    const auto sudden = sudden_moments({100, 1.0, 0.4}, {100, 1.0, 0.6});
    const auto e = exponential_work_density({100, 1.0, 0.4}, {100, 1.0, 0.6});
    CHECK(e.mean() == doctest::Approx(qho_sudden_moments({100, 1.0, 0.4}, {100, 1.0, 0.6}).w_quant));
    CHECK(std::abs(e.mean() / sudden.w_quant - 1.0) < 0.05);

    CHECK_THROWS_AS(exponential_work_density({100, 1.0, 0.5}, {100, 1.0, 0.1}), InvalidParameter);
    CHECK(exponential_work_density({100, 1.0, 0.5}, {100, 1.0, 0.1}, true).mirrored());
}

TEST_CASE("mismatched particle numbers are rejected") {
    CHECK_THROWS_AS(sudden_work_distribution({10, 1.0, 0.0}, {11, 1.0, 0.1}), InvalidParameter);
    CHECK_THROWS_AS(qho_sudden_moments({10, 1.0, 0.0}, {11, 1.0, 0.1}), InvalidParameter);
}

}  // TEST_SUITE
