// ramp_control.hpp - minimizing the irreversible work over ramp shapes
//
// The objective is W_irr of the exact many-body state at the end of the ramp.
// Every candidate must keep U(t) above -2J/N on a 10^4-point grid; infeasible
// candidates are rejected, not penalized.

#pragma once

#include "bjj/dynamics.hpp"
#include "bjj/ramp.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bjj {

// W_irr(ramp) at fixed (N, J, U_i, U_f, tau). Works in the even parity sector,
// which holds the initial ground state and is preserved by every ramp. Uses a
// fixed step (no refinement) so that objective values are reproducible.
class WorkObjective {
public:
    WorkObjective(int n_particles, double tunneling, double u_initial, double u_final, double tau,
                  double time_step = 1e-3, int min_steps = 50);

    int n_particles() const noexcept { return n_; }
    double tunneling() const noexcept { return j_; }
    double u_initial() const noexcept { return u_i_; }
    double u_final() const noexcept { return u_f_; }
    double tau() const noexcept { return tau_; }
    int steps() const noexcept { return steps_; }

    Ramp ramp(RampKind kind, std::span<const double> free_params) const;
    // nullopt when the ramp violates the reality bound.
    std::optional<double> operator()(RampKind kind, std::span<const double> free_params) const;
    // Throws InvalidParameter when the ramp violates the reality bound.
    double evaluate(const Ramp& ramp) const;

private:
    int n_;
    double j_;
    double u_i_;
    double u_f_;
    double tau_;
    int steps_;
    std::shared_ptr<const SplitStepPropagator> propagator_;
    StateVector initial_;
    Eigen::VectorXd final_energies_;  // relative to the final ground energy
    Eigen::MatrixXd final_vectors_;
};

enum class SearchStrategy {
    automatic,   // hierarchical grid for two parameters, random + simplex for four
    exhaustive,  // every grid point (two-parameter kinds only)
};

struct SearchConfig {
    double lower{-30.0};
    double upper{30.0};
    double grid_step{0.2};
    SearchStrategy strategy{SearchStrategy::automatic};
    // Hierarchical grid: coarse pass, then the grid_step lattice around the
    // best coarse cells.
    double coarse_step{1.0};
    int refine_candidates{6};
    // Four-parameter kinds.
    int random_budget{20000};
    int simplex_starts{4};
    int simplex_iterations{600};
    std::uint64_t seed{12345};
    bool keep_trace{false};
};

struct TracePoint {
    std::vector<double> params;
    double w_irr;
};

struct OptimizationResult {
    RampKind kind{RampKind::linear};
    int n_particles{0};
    double u_initial{0.0};
    double u_final{0.0};
    double tau{0.0};
    std::vector<double> params;
    double w_irr{0.0};
    double linear_w_irr{0.0};
    long evaluations{0};
    long infeasible{0};
    bool fell_back_to_linear{false};
    std::string strategy;
    SearchConfig config;
    std::vector<TracePoint> trace;
};

// Throws InvalidParameter when the endpoints violate the reality bound or no
// feasible candidate exists.
OptimizationResult optimize(const WorkObjective& objective, RampKind kind,
                            const SearchConfig& config = {});

struct StabilityReport {
    RampKind kind{RampKind::linear};
    double tau{0.0};
    std::vector<double> bounds;  // relative bound per parameter
    int samples{0};
    int accepted{0};
    int rejected{0};
    std::uint64_t seed{0};
    double optimum{0.0};
    double mean{0.0};
    double stddev{0.0};
    double relative_change{0.0};   // |mean - optimum| / optimum
    double max_relative_change{0.0};
};

// Draws each parameter uniformly within +-bound*|p| (+-bound*0.2 for p = 0),
// rejects infeasible draws until `samples` feasible ones are collected or the
// attempt cap is reached. Throws NumericalFailure when every draw is infeasible.
StabilityReport stability_analysis(const WorkObjective& objective, const OptimizationResult& result,
                                   std::span<const double> relative_bounds, int samples,
                                   std::uint64_t seed);

struct Landscape {
    RampKind kind{RampKind::lcs};
    std::vector<double> x;  // first free parameter
    std::vector<double> y;  // second free parameter
    Eigen::MatrixXd w_irr;  // rows follow x, columns follow y; NaN marks infeasible cells
    int best_row{-1};
    int best_col{-1};

    bool feasible(int row, int col) const;
};

// Throws InvalidParameter for kinds without exactly two free parameters.
Landscape landscape_scan(const WorkObjective& objective, RampKind kind,
                         const std::vector<double>& x_grid, const std::vector<double>& y_grid);

// Inclusive arithmetic grid lower, lower + step, ... up to upper.
std::vector<double> arithmetic_grid(double lower, double upper, double step);

}  // namespace bjj
