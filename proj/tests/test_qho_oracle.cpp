#include "bjj/error.hpp"
#include "bjj/qho_oracle.hpp"
#include "bjj/work_stats.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace bjj;

namespace {

double invariant_error(const GState& g, double wi) {
    return std::abs(g.g_plus * g.g_minus - g.g_zero * g.g_zero - wi * wi) / (wi * wi);
}

}  // namespace

TEST_SUITE("qho-oracle") {

TEST_CASE("mapping constants") {
    const QhoParams q{100, 1.0};
    CHECK(q.mass() == 0.5);
    CHECK(q.omega(0.02) == doctest::Approx(2.0 * std::sqrt(2.0)));
    CHECK(q.offset(0.1) == doctest::Approx(-5.0 + 250.0 - 1.0 - 100.0));
    CHECK_THROWS_AS(q.omega(-0.05), InvalidParameter);
}

TEST_CASE("constant frequency keeps the ground state stationary") {
    const auto p = FrequencyProtocol::constant(0.5, 3.0, 10.0);
    const auto g = propagate_g(p);
    const auto f = g.final_state();
    CHECK(f.g_minus == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(std::abs(f.g_zero) < 1e-9);
    CHECK(f.g_plus == doctest::Approx(0.5 * 9.0).epsilon(1e-9));
    CHECK(evolved_variance(g, 4.0) == doctest::Approx(1.0 / (2.0 * 0.5 * 3.0)).epsilon(1e-9));
}

TEST_CASE("bilinear invariant on linear and trigonometric ramps") {
    for (double tau : {0.05, 1.0, 7.3}) {
        const std::vector<double> params{1.4, -0.2};
        for (const Ramp& r : {Ramp::linear(0.0, 0.2, tau), Ramp(RampKind::lcs, 0.2, 0.8, tau, params)}) {
            const auto g = propagate_g(FrequencyProtocol::from_ramp(r, 200, 1.0));
            CHECK(g.invariant_drift() <= 1e-9);
            CHECK(invariant_error(g.at(0.3 * tau), g.omega_initial()) <= 1e-8);
        }
    }
}

TEST_CASE("evolved variance starts at J/omega_i") {
    const auto g = propagate_g(FrequencyProtocol::from_ramp(Ramp::linear(0.0, 0.2, 3.0), 200, 1.0));
    CHECK(std::abs(evolved_variance(g, 0.0) - 0.5) < 1e-14);
}

TEST_CASE("sudden protocol: vacuum overlap") {
    const double m = 0.5, wi = 2.0, wf = 9.0;
    const GState g0{1.0 / m, 0.0, m * wi * wi};
    const auto p = transition_probabilities(g0, wi, wf, m);
    CHECK(p.at(0) == doctest::Approx(2.0 * std::sqrt(wi * wf) / (wi + wf)).epsilon(1e-12));
    CHECK(std::abs(p.total() - 1.0) < 1e-10);
    CHECK(p.at(1) == 0.0);
    CHECK(p.at(p.q_max + 2) == 0.0);
    CHECK(p.tail_estimate < kTransitionTailTolerance);
}

TEST_CASE("transition probabilities against quadrature") {
    const double m = 0.5;
    const auto g = propagate_g(FrequencyProtocol::from_ramp(Ramp::linear(0.0, 0.2, 0.7), 200, 1.0));
    const auto f = g.final_state();
    const double wi = g.omega_initial();
    const double wf = QhoParams{200, 1.0}.omega(0.2);
    const auto p = transition_probabilities(f, wi, wf, m);
    const int q_max = std::min(p.q_max, 24);
    const auto ref = testing::quadrature_transition_probabilities(f.g_minus, f.g_zero, wi, wf, m, q_max);
    for (int q = 0; q <= q_max; ++q) CHECK(std::abs(p.at(q) - ref[q]) < 1e-12);
}

TEST_CASE("truncation too short throws") {
    const GState g0{2.0, 0.0, 0.5 * 4.0};
    CHECK_THROWS_AS(transition_probabilities(g0, 2.0, 200.0, 0.5, 2), NumericalFailure);
}

TEST_CASE("hermite functions agree with std::hermite") {
    const auto h = hermite_functions(20, 0.8, 0.5, 3.0);
    for (int q = 0; q <= 20; ++q) {
        CHECK(h[q] == doctest::Approx(testing::oscillator_eigenfunction(q, 0.8, 0.5, 3.0)).epsilon(1e-11));
    }
}

TEST_CASE("finite-time moments collapse to the sudden closed forms") {
    const QhoParams q{100, 1.0};
    const auto g = propagate_g(FrequencyProtocol(0.5, 0.0, [](double) { return 4.0; }));
    const auto m = qho_finite_time_moments(g, q, 0.0, 0.5);
    const auto s = qho_sudden_moments({100, 1.0, 0.0}, {100, 1.0, 0.5});
    CHECK(m.w_irr == doctest::Approx(s.w_irr).epsilon(1e-12));
    CHECK(m.variance == doctest::Approx(s.variance).epsilon(1e-12));
}

TEST_CASE("work distribution from transition probabilities") {
    const QhoParams q{200, 1.0};
    const auto g = propagate_g(FrequencyProtocol::from_ramp(Ramp::linear(0.0, 0.2, 1.3), 200, 1.0));
    const double wf = q.omega(0.2);
    const auto p = transition_probabilities(g.final_state(), g.omega_initial(), wf, q.mass());
    const auto m = qho_finite_time_moments(g, q, 0.0, 0.2);
    const auto d = qho_work_distribution(p, wf, m.delta_f);
    CHECK(std::abs(d.total_probability() - 1.0) < 1e-10);
    CHECK(d.mean() - m.delta_f == doctest::Approx(m.w_irr).epsilon(1e-8));
    CHECK(d.variance() == doctest::Approx(m.variance).epsilon(1e-8));
    CHECK(m.w_irr >= 0.0);
}

}  // TEST_SUITE
