#include "bjj/spectral.hpp"

#include "bjj/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace bjj {

namespace {

constexpr int kMaxSweepsPerEigenvalue = 60;

void fix_signs(Eigen::MatrixXd& vectors) {
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
        const double scale = vectors.col(j).cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
            if (std::abs(vectors(i, j)) > 1e-10 * scale) {
                if (vectors(i, j) < 0.0) vectors.col(j) *= -1.0;
                break;
            }
        }
    }
}

}  // namespace

StateVector Spectrum::state(int q) const {
    if (q < 0 || q >= dimension()) throw InvalidParameter("eigenstate index out of range");
    return eigenvectors.col(q).cast<std::complex<double>>();
}

Spectrum diagonalize_tridiagonal(const Eigen::VectorXd& diagonal,
                                 const Eigen::VectorXd& off_diagonal) {
    const int n = static_cast<int>(diagonal.size());
    if (n == 0) throw InvalidParameter("cannot diagonalize an empty matrix");
    if (off_diagonal.size() != n - 1) {
        throw InvalidParameter("off-diagonal must have one element less than the diagonal");
    }

    std::vector<double> d(diagonal.data(), diagonal.data() + n);
    std::vector<double> e(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) e[i] = off_diagonal[i];
    Eigen::MatrixXd z = Eigen::MatrixXd::Identity(n, n);

    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (int l = 0; l < n; ++l) {
        int sweeps = 0;
        int m = l;
        do {
            // Look for a negligible sub-diagonal element to split the matrix.
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m == l) break;
            if (++sweeps > kMaxSweepsPerEigenvalue) {
                throw NumericalFailure("tridiagonal QL iteration did not converge for eigenvalue " +
                                       std::to_string(l));
            }
            // Wilkinson-type shift from the leading 2x2 block.
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0;
            double c = 1.0;
            double p = 0.0;
            int i = m - 1;
            bool deflated = false;
            for (; i >= l; --i) {
                const double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for (int k = 0; k < n; ++k) {
                    const double zf = z(k, i + 1);
                    z(k, i + 1) = s * z(k, i) + c * zf;
                    z(k, i) = c * z(k, i) - s * zf;
                }
            }
            if (deflated) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        } while (m != l);
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });

    Spectrum spec;
    spec.eigenvalues.resize(n);
    spec.eigenvectors.resize(n, n);
    for (int j = 0; j < n; ++j) {
        spec.eigenvalues[j] = d[order[j]];
        spec.eigenvectors.col(j) = z.col(order[j]);
    }
    fix_signs(spec.eigenvectors);
    return spec;
}

Spectrum diagonalize(const TridiagonalHamiltonian& h) {
    return diagonalize_tridiagonal(h.diagonal, h.off_diagonal);
}

std::pair<double, StateVector> ground_state(const TridiagonalHamiltonian& h) {
    const Spectrum spec = diagonalize(h);
    return {spec.eigenvalues[0], spec.state(0)};
}

double expectation(const StateVector& state, const ObservableMatrix& obs) {
    if (obs.matrix.rows() != state.size() || obs.matrix.cols() != state.size()) {
        throw InvalidParameter("observable dimension does not match state");
    }
    const std::complex<double> value = state.dot(obs.matrix * state);
    const double scale = std::max(1.0, std::abs(value));
    if (std::abs(value.imag()) > 1e-10 * scale) {
        throw NumericalFailure("expectation value has a non-negligible imaginary part; "
                               "observable is not Hermitian");
    }
    return value.real();
}

double expectation(const StateVector& state, const TridiagonalHamiltonian& h) {
    if (state.size() != h.dimension()) {
        throw InvalidParameter("Hamiltonian dimension does not match state");
    }
    return state.dot(h.apply(state)).real();
}

double diagonal_expectation(const StateVector& state, const Eigen::VectorXd& diagonal) {
    if (state.size() != diagonal.size()) {
        throw InvalidParameter("operator dimension does not match state");
    }
    return (state.cwiseAbs2().array() * diagonal.array()).sum();
}

double jx_squared(const StateVector& state) {
    const Eigen::Index n = state.size() - 1;
    double acc = 0.0;
    for (Eigen::Index k = 0; k <= n; ++k) {
        const double jx = 0.5 * static_cast<double>(n - 2 * k);
        acc += std::norm(state[k]) * jx * jx;
    }
    return acc;
}

}  // namespace bjj
