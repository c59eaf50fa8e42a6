// model.hpp - two-mode Bose-Hubbard Hamiltonian and Schwinger observables in the fixed-N Fock basis
//
// Units: hbar = 1, the tunneling energy J is the energy unit and times are in 1/J.
// Basis index k counts the particles in the left well: |k> = |n_L = k, n_R = N - k>.

#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>

namespace bjj {

using StateVector = Eigen::VectorXcd;

struct ModelParams {
    int n_particles{1};
    double tunneling{1.0};
    double interaction{0.0};
};

// Lowest interaction for which the plasma frequency is real: -2J/N.
double reality_bound(int n_particles, double tunneling);

// Throws InvalidParameter unless N >= 1, J > 0 and U >= -2J/N.
void validate(const ModelParams& params);

enum class Regime { rabi, josephson, fock };

// Labels only; thresholds UN/J < 0.1 (Rabi) and UN/J > 10 N^2 (Fock).
Regime classify_regime(const ModelParams& params);
std::string_view to_string(Regime regime);

class FockBasis {
public:
    explicit FockBasis(int n_particles);

    int n_particles() const noexcept { return n_; }
    int dimension() const noexcept { return n_ + 1; }
    int left(int k) const;
    int right(int k) const;
    int index(int n_left) const;

private:
    int n_;
};

// Tridiagonal realization: d_k = (U/2)[k(k-1) + (N-k)(N-k-1)], h_k = -J sqrt((k+1)(N-k)).
struct TridiagonalHamiltonian {
    ModelParams params;
    Eigen::VectorXd diagonal;
    Eigen::VectorXd off_diagonal;

    int dimension() const noexcept { return static_cast<int>(diagonal.size()); }
    StateVector apply(const StateVector& psi) const;
    Eigen::MatrixXd dense() const;
    // Infinity-norm bound, used to scale residual tolerances.
    double norm_bound() const;
};

TridiagonalHamiltonian build_hamiltonian(const ModelParams& params);

// Interaction diagonal for U = 1: (1/2)[k(k-1) + (N-k)(N-k-1)].
Eigen::VectorXd interaction_diagonal(int n_particles);

enum class Observable { jx, jy, jz, imbalance, imbalance_squared };

// Accepts "Jx", "Jy", "Jz", "imbalance", "imbalance_squared" (case-insensitive).
Observable parse_observable(std::string_view name);
std::string_view to_string(Observable name);

struct ObservableMatrix {
    Observable name;
    Eigen::MatrixXcd matrix;
};

// Jx|k> = (N-2k)/2 |k>, imbalance n = n_L - n_R = 2k - N, so imbalance = -2 Jx.
ObservableMatrix build_observable(const ModelParams& params, Observable name);
ObservableMatrix build_observable(const ModelParams& params, std::string_view name);

// omega_p = 2J sqrt(UN/(2J) + 1); throws InvalidParameter below the reality bound.
double plasma_frequency(const ModelParams& params);
double plasma_frequency(int n_particles, double tunneling, double interaction);

}  // namespace bjj
