#include "bjj/error.hpp"
#include "bjj/parallel.hpp"
#include "bjj/ramp_control.hpp"

#include <doctest.h>

#include <cmath>

using namespace bjj;

namespace {

SearchConfig small_box() {
    SearchConfig c;
    c.lower = -4.0;
    c.upper = 4.0;
    c.coarse_step = 1.0;
    return c;
}

bool on_grid(double v, double step) { return std::abs(v / step - std::round(v / step)) < 1e-9; }

}  // namespace

TEST_SUITE("ramp-control") {

TEST_CASE("objective matches finite_time_work") {
    const WorkObjective obj(30, 1.0, 0.2, 0.8, 0.3);
    const std::vector<double> p{1.0, -0.4};
    const auto w = finite_time_work({30, 1.0, 0.2}, {30, 1.0, 0.8},
                                    EvolutionConfig(obj.ramp(RampKind::lcs, p), 1e-3), std::nullopt);
    CHECK(*obj(RampKind::lcs, p) == doctest::Approx(w.moments.w_irr).epsilon(1e-9));
    const std::vector<double> dip{8.0, 0.0};
    CHECK_FALSE(obj(RampKind::lcs, dip).has_value());
    CHECK_THROWS_AS(obj.evaluate(obj.ramp(RampKind::lcs, dip)), InvalidParameter);
}

TEST_CASE("two-parameter search finds the grid minimum") {
    const WorkObjective obj(20, 1.0, 0.2, 0.8, 0.1);
    auto cfg = small_box();
    const auto fast = optimize(obj, RampKind::cubic, cfg);
    cfg.strategy = SearchStrategy::exhaustive;
    const auto full = optimize(obj, RampKind::cubic, cfg);
    CHECK(full.evaluations >= 41 * 41 - full.infeasible);
    CHECK(full.w_irr <= fast.w_irr + 1e-15);
    CHECK(fast.w_irr <= full.w_irr * (1.0 + 1e-9));
    CHECK(fast.w_irr <= fast.linear_w_irr);
    for (double v : fast.params) CHECK(on_grid(v, 0.2));

    const auto land = landscape_scan(obj, RampKind::cubic, arithmetic_grid(-4, 4, 0.2), arithmetic_grid(-4, 4, 0.2));
    REQUIRE(land.best_row >= 0);
    CHECK(land.x[land.best_row] == doctest::Approx(full.params[0]));
    CHECK(land.y[land.best_col] == doctest::Approx(full.params[1]));
    CHECK(land.w_irr(land.best_row, land.best_col) == doctest::Approx(full.w_irr));
}

TEST_CASE("four-parameter search is deterministic under a seed") {
    const WorkObjective obj(16, 1.0, 0.2, 0.8, 0.1);
    SearchConfig cfg = small_box();
    cfg.random_budget = 300;
    cfg.simplex_starts = 2;
    cfg.simplex_iterations = 80;
    const auto a = optimize(obj, RampKind::quintic, cfg);
    const auto b = optimize(obj, RampKind::quintic, cfg);
    CHECK(a.params == b.params);
    CHECK(a.w_irr == b.w_irr);
    CHECK(a.evaluations == b.evaluations);
    CHECK(a.w_irr <= a.linear_w_irr);
    for (double v : a.params) CHECK(on_grid(v, 0.2));
}

TEST_CASE("linear kind and adiabatic limit") {
    const WorkObjective obj(16, 1.0, 0.2, 0.8, 50.0, 1e-2);
    const auto r = optimize(obj, RampKind::linear);
    CHECK(r.params.empty());
    CHECK(r.w_irr == r.linear_w_irr);
    CHECK(r.w_irr < 1e-3);
}

TEST_CASE("stability with zero bounds") {
    const WorkObjective obj(20, 1.0, 0.2, 0.8, 0.1);
    auto cfg = small_box();
    const auto r = optimize(obj, RampKind::lcs, cfg);
    const std::vector<double> zero{0.0, 0.0};
    const auto s = stability_analysis(obj, r, zero, 5, 3);
    CHECK(s.mean == doctest::Approx(r.w_irr));
    CHECK(s.stddev < 1e-15);
    CHECK(s.accepted == 5);

    const std::vector<double> twenty{0.2, 0.2};
    const auto a = stability_analysis(obj, r, twenty, 20, 99);
    const auto b = stability_analysis(obj, r, twenty, 20, 99);
    CHECK(a.mean == b.mean);
    CHECK(a.max_relative_change >= a.relative_change);
    CHECK_THROWS_AS(stability_analysis(obj, r, twenty, 1, 99), InvalidParameter);
}

TEST_CASE("landscape rejects four-parameter kinds") {
    const WorkObjective obj(10, 1.0, 0.2, 0.8, 0.1);
    CHECK_THROWS_AS(landscape_scan(obj, RampKind::quintic, {0.0}, {0.0}), InvalidParameter);
}

TEST_CASE("grid helper") {
    const auto g = arithmetic_grid(-1.0, 1.0, 0.2);
    CHECK(g.size() == 11);
    CHECK(g.back() == doctest::Approx(1.0));
    CHECK(std::abs(g[5]) < 1e-15);
}

TEST_CASE("parallel map keeps index order and rethrows") {
    const auto out = parallel_map(100, [](std::size_t i) { return static_cast<int>(i * i); });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));
    CHECK_THROWS_AS(parallel_map(10, [](std::size_t i) -> int {
                        if (i == 7) throw InvalidParameter("seven");
                        return 0;
                    }),
                    InvalidParameter);
}

}  // TEST_SUITE
