// qho_oracle.hpp - harmonic-oscillator reference for the junction
//
// Away from the Fock regime the junction maps onto an oscillator with mass
// m = 1/(2J), frequency omega = 2J sqrt(UN/(2J) + 1) and position x = Jx sqrt(2/N).
// A Gaussian initial state stays Gaussian under a frequency ramp omega(t); its
// evolution is carried by three real functions g-, g0, g+ with
//
//   g-' = -2 g0 / m,   g0' = m omega^2 g- - g+ / m,   g+' = 2 m omega^2 g0,
//
// starting from (1/m, 0, m omega_i^2). The combination g+ g- - g0^2 stays equal
// to omega_i^2. For the evolved ground state
//
//   <x^2> = g- / (2 omega_i),   <p^2> = g+ / (2 omega_i).

#pragma once

#include "bjj/model.hpp"
#include "bjj/ramp.hpp"
#include "bjj/work_stats.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace bjj {

struct QhoParams {
    int n_particles{1};
    double tunneling{1.0};

    double mass() const { return 0.5 / tunneling; }
    // Throws InvalidParameter below the reality bound.
    double omega(double interaction) const;
    double omega_squared(double interaction) const;
    // Constant energy offset E' = -UN/2 + UN^2/4 - J - JN.
    double offset(double interaction) const;
};

class FrequencyProtocol {
public:
    // omega^2(t) on [0, duration]; duration may be zero (sudden protocol).
    FrequencyProtocol(double mass, double duration, std::function<double(double)> omega_squared);

    // omega^2(t) = 4J^2 + 2JN U(t) for the given ramp.
    static FrequencyProtocol from_ramp(const Ramp& ramp, int n_particles, double tunneling);
    static FrequencyProtocol constant(double mass, double omega, double duration);

    double mass() const noexcept { return mass_; }
    double duration() const noexcept { return duration_; }
    double omega_squared(double t) const { return omega_squared_(t); }
    double omega_initial() const;
    double omega_final() const;

private:
    double mass_;
    double duration_;
    std::function<double(double)> omega_squared_;
};

struct GState {
    double g_minus;
    double g_zero;
    double g_plus;
};

class GFunctions {
public:
    GFunctions(double mass, double omega_initial) : mass_(mass), omega_i_(omega_initial) {}

    double mass() const noexcept { return mass_; }
    double omega_initial() const noexcept { return omega_i_; }
    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<GState>& samples() const noexcept { return states_; }
    double duration() const { return times_.back(); }

    // Cubic Hermite interpolation between accepted integrator steps.
    GState at(double t) const;
    GState final_state() const { return states_.back(); }

    // max |g+ g- - g0^2 - omega_i^2| / omega_i^2 over the samples.
    double invariant_drift() const;

    void push(double t, const GState& g, const GState& derivative);

private:
    double mass_;
    double omega_i_;
    std::vector<double> times_;
    std::vector<GState> states_;
    std::vector<GState> derivatives_;
};

struct PropagationOptions {
    double tolerance{1e-10};
    // Largest accepted step; keeps the interpolant fine enough for overlays.
    double max_step{0.0};   // 0 means unrestricted
    double min_step{1e-14};
};

// Adaptive Dormand-Prince 5(4) integration of the g-equations. Throws
// NumericalFailure on step-size underflow or when the bilinear drifts by more
// than 10x the tolerance.
GFunctions propagate_g(const FrequencyProtocol& protocol, PropagationOptions options = {});

// <x^2>(t) = g-(t)/(2 omega_i); equals J/omega_i at t = 0.
double evolved_variance(const GFunctions& g, double t);
std::vector<double> evolved_variance(const GFunctions& g, const std::vector<double>& times);
// <p^2>(t) = g+(t)/(2 omega_i).
double evolved_momentum_variance(const GFunctions& g, double t);

inline constexpr double kTransitionTailTolerance = 1e-10;

struct TransitionProbabilities {
    std::vector<double> even;   // even[k] = p_{2k,0}; odd q vanish by parity
    double tail_estimate{0.0};  // bound on the probability beyond q_max
    int q_max{0};

    double total() const;
    // p_{q,0} for any q (zero for odd q and beyond q_max).
    double at(int q) const;
};

// Squared overlaps of the evolved ground state with the eigenstates of the
// final oscillator (frequency omega_f, same mass). With q_max unset the
// truncation is chosen so that both the probability tail and its q^2-weighted
// tail stay below kTransitionTailTolerance;
// an explicit q_max (even, >= 0) whose tail exceeds it throws NumericalFailure.
TransitionProbabilities transition_probabilities(const GState& g_tau, double omega_initial,
                                                 double omega_final, double mass,
                                                 std::optional<int> q_max = std::nullopt);

// Entries (delta_f + q omega_f, p_{q,0}) over even q.
WorkDistribution qho_work_distribution(const TransitionProbabilities& p, double omega_final,
                                       double delta_f);

// <W>, dW^2 and W_irr of the evolved Gaussian measured against the final
// oscillator. delta_f = E'_f - E'_i + (omega_f - omega_i)/2.
WorkMoments qho_finite_time_moments(const GFunctions& g, const QhoParams& qho, double u_initial,
                                    double u_final);

// Normalized oscillator eigenfunctions psi_0..psi_{q_max} at x for mass m and
// frequency omega, by the upward three-term recurrence.
std::vector<double> hermite_functions(int q_max, double x, double mass, double omega);

}  // namespace bjj
