// work_stats.hpp - two-point-measurement work statistics for interaction quenches
//
// Work values are E~_q - E_0 where E_0 is the initial ground energy and E~_q the
// spectrum of the final Hamiltonian. Zero temperature throughout, so the free
// energy difference is the ground-energy difference.

#pragma once

#include "bjj/model.hpp"
#include "bjj/spectral.hpp"

#include <optional>
#include <span>
#include <vector>

namespace bjj {

// Levels closer than this (in units of J) are merged into a single work value.
inline constexpr double kWorkMergeTolerance = 1e-9;

struct WorkEntry {
    double work;
    double probability;
};

struct WorkDistribution {
    std::vector<WorkEntry> entries;  // work strictly increasing
    double initial_ground_energy{0.0};
    double final_ground_energy{0.0};
    std::optional<ModelParams> initial;
    std::optional<ModelParams> final;

    double delta_f() const { return final_ground_energy - initial_ground_energy; }
    double total_probability() const;
    double mean() const;
    // Central second moment, accumulated around the mean.
    double variance() const;
};

// Sorts (work, probability) pairs, merges values closer than merge_tolerance*J
// and drops nothing: zero-probability levels stay in the list.
WorkDistribution make_work_distribution(std::vector<WorkEntry> raw, double tunneling,
                                        double merge_tolerance = kWorkMergeTolerance);

struct WorkMoments {
    double mean{0.0};
    double variance{0.0};
    double delta_f{0.0};
    double w_irr{0.0};
    double w_class{0.0};
    double w_quant{0.0};
};

// Classical constant part of the average work, dU (N/2)(N/2 - 1).
double classical_work(int n_particles, double delta_u);

// Distribution of E~_q - E_0 with weights |<psi~_q|psi_0>|^2.
WorkDistribution sudden_work_distribution(const ModelParams& initial, const ModelParams& final);

// Moments of the sudden quench. The mean is the direct expectation
// <psi_0|H_f|psi_0> - E_0; the variance is ||(H_f - E_0 - <W>) psi_0||^2.
// w_quant = dU <Jx^2>_0, so that w_class + w_quant = mean for U-quenches.
WorkMoments sudden_moments(const ModelParams& initial, const ModelParams& final);

// Moments computed from a distribution (the mean of the entries etc.).
WorkMoments moments_of(const WorkDistribution& dist, double w_class);

// Harmonic-oscillator closed forms:
//   <W>    = dU (N/2)[(N/2 - 1) + J/w_i]
//   dW^2   = (J/w_i)^2 (N^2/2) dU^2
//   W_irr  = (N/2)(J/w_i) dU - (w_f - w_i)/2
WorkMoments qho_sudden_moments(const ModelParams& initial, const ModelParams& final);

enum class QuenchLimit { small_initial, large_initial };

struct LimitMoments {
    WorkMoments moments;  // mean = w_class + w_quant, delta_f = mean - w_irr
    double regime_ratio;  // U_i N / (2J)
};

// Limit expansions of the QHO closed forms for U_i N/2J << 1 (small_initial) and
// >> 1 (large_initial). The caller chooses the regime; regime_ratio reports it.
LimitMoments qho_limit_moments(const ModelParams& initial, const ModelParams& final,
                               QuenchLimit limit);

// Limits of W_irr at U_i = 0 for U_f N/2J << 1 and >> 1: N^2 U_f^2/(32J) and N U_f/4.
struct QuenchStrengthLimits {
    double w_irr_weak;
    double w_irr_strong;
};
QuenchStrengthLimits qho_quench_strength_limits(const ModelParams& final);

// Exponential quantum-work density P(w) = (pi sigma w)^(-1/2) exp(-w/sigma), w > 0,
// sigma = J dU N / w_i. Normalized to one. A negative quench (dU < 0) is only
// accepted with mirrored = true, which reflects the density onto w < 0.
class ExponentialWorkDensity {
public:
    ExponentialWorkDensity(double sigma, bool mirrored);

    double sigma() const noexcept { return sigma_; }
    bool mirrored() const noexcept { return mirrored_; }
    double density(double w) const;
    double cdf(double w) const;
    double mean() const;
    double variance() const;

private:
    double sigma_;
    bool mirrored_;
};

ExponentialWorkDensity exponential_work_density(const ModelParams& initial,
                                                const ModelParams& final,
                                                bool allow_mirrored = false);

}  // namespace bjj
