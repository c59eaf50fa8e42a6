// dynamics.hpp - time evolution under a ramp U(t), finite-time work statistics
//
// The propagator is a symmetric (Strang) split step: half a step of the fixed
// tunneling generator, a full step of the diagonal interaction evaluated at the
// step midpoint, another half step of tunneling. The tunneling part is applied
// in the cached eigenbasis of the U = 0 Hamiltonian, the interaction part is an
// elementwise phase in the Fock basis.

#pragma once

#include "bjj/model.hpp"
#include "bjj/ramp.hpp"
#include "bjj/spectral.hpp"
#include "bjj/work_stats.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace bjj {

// Reflection k -> N - k. The Hamiltonian commutes with it for every U(t).
enum class Parity { none, even, odd };

// Definite parity of `state` within `tolerance`, or Parity::none.
Parity detect_parity(const StateVector& state, double tolerance = 1e-12);

class SplitStepPropagator {
public:
    using Observer = std::function<void(double t, const StateVector& psi)>;

    SplitStepPropagator(int n_particles, double tunneling, Parity sector = Parity::none);

    int n_particles() const noexcept { return n_; }
    double tunneling() const noexcept { return j_; }
    Parity sector() const noexcept { return sector_; }
    int dimension() const noexcept { return static_cast<int>(interaction_.size()); }

    // Interaction diagonal for U = 1 in the sector basis.
    const Eigen::VectorXd& interaction() const noexcept { return interaction_; }
    // Sector Hamiltonian at interaction u (tridiagonal in the sector basis).
    TridiagonalHamiltonian hamiltonian(double u) const;

    // Full Fock basis <-> sector coordinates. project() requires a state of
    // the matching parity only up to the discarded component.
    StateVector project(const StateVector& full) const;
    StateVector embed(const StateVector& reduced) const;

    // Advances `psi` (sector coordinates) across the whole ramp in `steps`
    // equal steps. The observer, when set, sees the state at t = 0 and after
    // every `stride`-th step, always including the last one. Throws
    // InvalidParameter if U(t) at any step midpoint violates the reality bound.
    StateVector run(const StateVector& psi, const Ramp& ramp, int steps,
                    const Observer& observer = {}, int stride = 1) const;

private:
    int n_;
    double j_;
    Parity sector_;
    Eigen::MatrixXd basis_;          // full x sector embedding (identity for Parity::none)
    Eigen::VectorXd interaction_;
    Eigen::VectorXd tunneling_diag_;
    Eigen::VectorXd tunneling_off_;
    Eigen::VectorXd energies_;       // tunneling eigenvalues
    Eigen::MatrixXd vectors_;        // tunneling eigenvectors (columns)
    Eigen::MatrixXd vectors_t_;      // transpose, stored contiguously
};

// Read-only propagators shared across concurrent sweeps, keyed by (N, J, sector).
std::shared_ptr<const SplitStepPropagator> shared_propagator(int n_particles, double tunneling,
                                                             Parity sector);

enum class Tracked { position_variance, imbalance, imbalance_squared, energy, norm };

std::string_view to_string(Tracked quantity);

class EvolutionConfig {
public:
    // Rounds the step so that duration/time_step is an integer (at least one step).
    EvolutionConfig(Ramp ramp, double time_step = 1e-3, std::vector<Tracked> tracked = {},
                    int record_stride = 1);

    const Ramp& ramp() const noexcept { return ramp_; }
    double time_step() const noexcept { return step_; }
    int steps() const noexcept { return steps_; }
    const std::vector<Tracked>& tracked() const noexcept { return tracked_; }
    int record_stride() const noexcept { return stride_; }
    // Evolve in the parity sector of the initial state when it has one.
    bool parity_reduction{true};

    EvolutionConfig with_time_step(double time_step) const;

private:
    Ramp ramp_;
    double step_;
    int steps_;
    std::vector<Tracked> tracked_;
    int stride_;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Tracked> tracked;
    std::vector<std::vector<double>> series;  // one per tracked quantity, aligned with times
    StateVector final_state;                  // full Fock basis
    double max_norm_drift{0.0};               // max | ||psi(t)|| - 1 | over recorded times

    const std::vector<double>& series_of(Tracked quantity) const;
};

// x = Jx sqrt(2/N), so <x^2> = (2/N) <Jx^2>.
double position_variance(const StateVector& full_state);

// Throws InvalidParameter for a non-normalized input or a ramp that violates
// the reality bound.
Trajectory evolve(const StateVector& initial_state, const ModelParams& fixed_j,
                  const EvolutionConfig& config);
Trajectory evolve(const StateVector& initial_state, const SplitStepPropagator& propagator,
                  const EvolutionConfig& config);

struct StepRefinement {
    double tolerance{1e-8};  // stop once <W> changes by less than this (units of J)
    int max_halvings{6};
};

struct FiniteTimeWork {
    WorkDistribution distribution;
    WorkMoments moments;
    double direct_mean{0.0};      // <psi(tau)|H_f|psi(tau)> - E_0
    double direct_variance{0.0};  // <psi(tau)|(H_f - E_0 - <W>)^2|psi(tau)>
    StateVector final_state;
    double time_step{0.0};
    int halvings{0};
    bool converged{true};
    double last_change{0.0};
};

// Evolves the ground state of `initial` under config.ramp() and projects onto
// the spectrum of `final`. The ramp endpoints must match the two interaction
// values and J must agree. With `refinement` set, the step is halved until
// <W> changes by less than the tolerance.
FiniteTimeWork finite_time_work(const ModelParams& initial, const ModelParams& final,
                                const EvolutionConfig& config,
                                std::optional<StepRefinement> refinement = StepRefinement{});

struct SqueezingSyncReport {
    std::vector<double> times;
    std::vector<double> deviation;           // <x^2>(t) - J/omega(t)
    std::vector<double> deviation_minima;    // times of local minima of the deviation
    std::vector<double> deviation_maxima;
    std::vector<double> crossing_times;      // sign changes of the deviation
    double oscillation_amplitude{0.0};       // max |deviation| after t = 0
    std::vector<double> reference_deviation; // same for the optional reference curve
    std::vector<double> work_minima;         // tau positions of local minima of W_irr
    std::vector<double> work_maxima;
    // For each W_irr minimum, distance to the closest deviation extremum or crossing.
    std::vector<double> alignment;
};

// The trajectory must track Tracked::position_variance. `work_taus`/`work_values`
// sample W_irr(tau) (may be empty); `reference_variance`, when non-empty, is a
// reference <x^2> curve aligned with trajectory.times (for instance the
// harmonic-oscillator g_-(t)/(2 omega_i)). Throws InvalidParameter when fewer
// than three samples are available.
SqueezingSyncReport squeezing_sync_report(const Trajectory& trajectory, const Ramp& ramp,
                                          const ModelParams& fixed_j,
                                          std::span<const double> work_taus = {},
                                          std::span<const double> work_values = {},
                                          std::span<const double> reference_variance = {});

// Indices of strict local minima / maxima of a sampled curve (interior points).
std::vector<std::size_t> local_minima(std::span<const double> values);
std::vector<std::size_t> local_maxima(std::span<const double> values);

}  // namespace bjj
