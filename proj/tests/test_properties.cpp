#include "bjj/dynamics.hpp"
#include "bjj/qho_oracle.hpp"
#include "bjj/ramp.hpp"
#include "bjj/work_stats.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace bjj;
using testing::Rng;

namespace {

RampKind any_kind(Rng& rng) {
    static constexpr RampKind kinds[] = {RampKind::linear, RampKind::lcs, RampKind::two_lcs, RampKind::cubic,
                                         RampKind::quintic};
    return kinds[rng.integer(0, 4)];
}

std::vector<double> any_params(Rng& rng, RampKind kind, double scale) {
    std::vector<double> p(free_parameter_count(kind));
    for (double& v : p) v = rng.uniform(-scale, scale);
    return p;
}

double any_u(Rng& rng, int n) { return rng.uniform() < 0.2 ? -2.0 / n : rng.uniform(-2.0 / n, 4.0); }

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("ramp endpoints are exact for arbitrary parameters") {
    Rng rng(2024);
    for (int trial = 0; trial < 2000; ++trial) {
        const RampKind kind = any_kind(rng);
        const double ui = rng.uniform(-1, 1), uf = rng.uniform(-1, 1);
        const Ramp r(kind, ui, uf, rng.uniform(1e-3, 50.0), any_params(rng, kind, 30.0));
        CHECK(std::abs(r.value_unchecked(0.0) - ui) <= 1e-12);
        CHECK(std::abs(r.value_unchecked(r.duration()) - uf) <= 1e-12);
    }
}

TEST_CASE("sudden-quench invariants over random quenches") {
    Rng rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = rng.integer(1, 80);
        const double j = rng.uniform(0.3, 2.0);
        const ModelParams ii{n, j, any_u(rng, n) * j};
        const ModelParams f{n, j, any_u(rng, n) * j};
        const auto d = sudden_work_distribution(ii, f);
        const auto m = sudden_moments(ii, f);
        CHECK(std::abs(d.total_probability() - 1.0) < 1e-10);
        for (std::size_t k = 0; k < d.entries.size(); ++k) {
            CHECK(d.entries[k].probability >= 0.0);
            if (k > 0) CHECK(d.entries[k].work > d.entries[k - 1].work);
        }
        CHECK(m.w_irr >= -1e-10);
        CHECK(m.mean >= m.delta_f - 1e-10);
        const double scale = 1.0 + std::abs(m.mean) + m.variance;
        CHECK(std::abs(d.mean() - m.mean) < 1e-8 * scale);
        CHECK(std::abs(d.variance() - m.variance) < 1e-8 * scale);
        CHECK(m.mean == doctest::Approx(m.w_class + m.w_quant));
    }
}

TEST_CASE("small N agrees with the dense brute-force oracle") {
    Rng rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = rng.integer(1, 6);
        const double ui = any_u(rng, n), uf = any_u(rng, n);
        const auto d = sudden_work_distribution({n, 1.0, ui}, {n, 1.0, uf});
        const auto ref = testing::dense_sudden_distribution(n, 1.0, ui, uf);
        REQUIRE(d.entries.size() == ref.size());
        for (std::size_t k = 0; k < ref.size(); ++k) {
            CHECK(std::abs(d.entries[k].work - ref[k].work) < 1e-10);
            CHECK(std::abs(d.entries[k].probability - ref[k].probability) < 1e-10);
        }
    }
}

TEST_CASE("finite-time invariants over random ramps") {
    Rng rng(31);
    int tested = 0;
    while (tested < 25) {
        const int n = rng.integer(2, 40);
        const RampKind kind = any_kind(rng);
        const double ui = rng.uniform(0.0, 1.0), uf = rng.uniform(0.0, 1.0);
        const Ramp r(kind, ui, uf, rng.uniform(0.05, 2.0), any_params(rng, kind, 3.0));
        if (!r.satisfies_reality_bound(n, 1.0)) continue;
        ++tested;
        const auto w = finite_time_work({n, 1.0, ui}, {n, 1.0, uf}, EvolutionConfig(r, 1e-3), std::nullopt);
        CHECK(std::abs(w.distribution.total_probability() - 1.0) < 1e-10);
        CHECK(w.moments.w_irr >= 0.0);
        CHECK(std::abs(w.final_state.norm() - 1.0) < 1e-9);
        CHECK(std::abs(w.moments.mean - w.direct_mean) < 1e-8 * (1.0 + std::abs(w.moments.mean)));
    }
}

TEST_CASE("oscillator transition probabilities sum to one") {
    Rng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 200;
        const RampKind kind = any_kind(rng);
        const Ramp r(kind, rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.01, 3.0),
                     any_params(rng, kind, 2.0));
        if (!r.satisfies_reality_bound(n, 1.0)) continue;
        const auto g = propagate_g(FrequencyProtocol::from_ramp(r, n, 1.0));
        CHECK(g.invariant_drift() <= 1e-9);
        const QhoParams q{n, 1.0};
        const auto p = transition_probabilities(g.final_state(), g.omega_initial(), q.omega(r.u_final()), q.mass());
        CHECK(std::abs(p.total() - 1.0) < 1e-8);
        CHECK(qho_finite_time_moments(g, q, r.u_initial(), r.u_final()).w_irr >= -1e-12);
    }
}

}  // TEST_SUITE
