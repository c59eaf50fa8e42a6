// support.hpp - independent oracles and generators shared by the unit and acceptance tests
//
// Nothing here calls the library's tridiagonal solver or oscillator code: the
// brute-force path builds the Hamiltonian from ladder-operator matrix elements
// and diagonalizes it with Eigen's dense solver.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

namespace bjj::testing {

// splitmix64; small, seedable and identical on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }

private:
    std::uint64_t state_;
};

// Two-mode Hamiltonian assembled densely from
//   H = -J (aL^+ aR + aR^+ aL) + (U/2) [nL(nL-1) + nR(nR-1)],
// with <k+1| aL^+ aR |k> = sqrt(k+1) sqrt(N-k) and k = nL.
inline Eigen::MatrixXd dense_hamiltonian(int n, double j, double u) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (int k = 0; k <= n; ++k) {
        const double nl = k;
        const double nr = n - k;
        h(k, k) = 0.5 * u * (nl * (nl - 1.0) + nr * (nr - 1.0));
        if (k < n) {
            const double hop = std::sqrt(nl + 1.0) * std::sqrt(nr);
            h(k + 1, k) -= j * hop;
            h(k, k + 1) -= j * hop;
        }
    }
    return h;
}

struct DenseEntry {
    double work;
    double probability;
};

// Sudden-quench distribution by brute force: ground state of H_i, full
// spectrum of H_f, squared overlaps. Levels within `merge` of the first level of
// a group are pooled and reported at their probability-weighted work (plain
// average when the group carries no probability), which keeps the mean exact.
inline std::vector<DenseEntry> dense_sudden_distribution(int n, double j, double ui, double uf,
                                                         double merge = 1e-9) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> si(dense_hamiltonian(n, j, ui));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sf(dense_hamiltonian(n, j, uf));
    const Eigen::VectorXd psi0 = si.eigenvectors().col(0);
    const double e0 = si.eigenvalues()[0];
    std::vector<DenseEntry> raw;
    for (int q = 0; q <= n; ++q) {
        const double c = sf.eigenvectors().col(q).dot(psi0);
        raw.push_back({sf.eigenvalues()[q] - e0, c * c});
    }
    std::sort(raw.begin(), raw.end(), [](auto a, auto b) { return a.work < b.work; });
    std::vector<DenseEntry> out;
    std::size_t first = 0;
    while (first < raw.size()) {
        std::size_t last = first;
        double p = 0.0, pw = 0.0, w = 0.0;
        while (last < raw.size() && raw[last].work - raw[first].work < merge * j) {
            p += raw[last].probability;
            pw += raw[last].probability * raw[last].work;
            w += raw[last].work;
            ++last;
        }
        out.push_back({p > 0.0 ? pw / p : w / static_cast<double>(last - first), p});
        first = last;
    }
    return out;
}

// Normalized oscillator eigenfunction from std::hermite (physicists' polynomials).
inline double oscillator_eigenfunction(int q, double x, double mass, double omega) {
    const double a = std::sqrt(mass * omega);
    const double xi = a * x;
    const double log_norm = 0.25 * std::log(mass * omega / std::numbers::pi) -
                            0.5 * (q * std::log(2.0) + std::lgamma(q + 1.0));
    return std::exp(log_norm - 0.5 * xi * xi) * std::hermite(static_cast<unsigned>(q), xi);
}

// |<phi_q|psi>|^2 for the Gaussian psi(x) = (2 Re l/pi)^(1/4) exp(-l x^2),
// l = (omega_i + i g0)/(2 g-), computed by trapezoidal quadrature.
inline std::vector<double> quadrature_transition_probabilities(double g_minus, double g_zero,
                                                               double omega_i, double omega_f,
                                                               double mass, int q_max,
                                                               int points = 40001) {
    const std::complex<double> lambda(omega_i / (2.0 * g_minus), g_zero / (2.0 * g_minus));
    const double width = 1.0 / std::sqrt(2.0 * lambda.real());
    const double osc = 1.0 / std::sqrt(mass * omega_f);
    const double half = 14.0 * std::max(width, osc) + 4.0 * osc * std::sqrt(q_max + 1.0);
    const double dx = 2.0 * half / (points - 1);
    const double amp = std::pow(2.0 * lambda.real() / std::numbers::pi, 0.25);
    std::vector<std::complex<double>> overlap(q_max + 1);
    for (int i = 0; i < points; ++i) {
        const double x = -half + i * dx;
        const double w = (i == 0 || i == points - 1) ? 0.5 * dx : dx;
        const std::complex<double> psi = amp * std::exp(-lambda * x * x);
        for (int q = 0; q <= q_max; ++q) {
            overlap[q] += w * oscillator_eigenfunction(q, x, mass, omega_f) * psi;
        }
    }
    std::vector<double> p(q_max + 1);
    for (int q = 0; q <= q_max; ++q) p[q] = std::norm(overlap[q]);
    return p;
}

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> out;
    for (int i = 0; i < points; ++i) {
        out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1)));
    }
    return out;
}

}  // namespace bjj::testing
