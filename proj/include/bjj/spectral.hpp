// spectral.hpp - symmetric tridiagonal eigensolver, ground states and expectation values

#pragma once

#include "bjj/model.hpp"

#include <Eigen/Dense>

#include <utility>

namespace bjj {

// Ascending eigenvalues with orthonormal eigenvectors as columns. Each
// eigenvector has its first non-negligible component positive.
struct Spectrum {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;

    int dimension() const noexcept { return static_cast<int>(eigenvalues.size()); }
    double ground_energy() const { return eigenvalues[0]; }
    StateVector state(int q) const;
};

// Implicit-shift QL iteration on a real symmetric tridiagonal matrix given by
// its diagonal and its sub-diagonal (size n-1). Throws NumericalFailure when an
// eigenvalue does not converge within the iteration cap.
Spectrum diagonalize_tridiagonal(const Eigen::VectorXd& diagonal,
                                 const Eigen::VectorXd& off_diagonal);

Spectrum diagonalize(const TridiagonalHamiltonian& h);

std::pair<double, StateVector> ground_state(const TridiagonalHamiltonian& h);

// <psi|O|psi> for Hermitian O. Throws InvalidParameter on a dimension mismatch
// and NumericalFailure when the imaginary part is not negligible.
double expectation(const StateVector& state, const ObservableMatrix& obs);
double expectation(const StateVector& state, const TridiagonalHamiltonian& h);

// <psi|D|psi> for a real diagonal operator.
double diagonal_expectation(const StateVector& state, const Eigen::VectorXd& diagonal);

// <Jx^2> in the Fock basis: sum_k |psi_k|^2 ((N-2k)/2)^2.
double jx_squared(const StateVector& state);

}  // namespace bjj
