#include "bjj/model.hpp"

#include "bjj/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace bjj {

namespace {

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Hopping amplitude sqrt((k+1)(N-k)) between |k> and |k+1>.
double hop(int n, int k) {
    return std::sqrt(static_cast<double>(k + 1) * static_cast<double>(n - k));
}

}  // namespace

double reality_bound(int n_particles, double tunneling) {
    return -2.0 * tunneling / static_cast<double>(n_particles);
}

void validate(const ModelParams& params) {
    if (params.n_particles < 1) {
        throw InvalidParameter("particle number must be >= 1, got " +
                               std::to_string(params.n_particles));
    }
    if (!(params.tunneling > 0.0) || !std::isfinite(params.tunneling)) {
        throw InvalidParameter("tunneling J must be positive and finite");
    }
    if (!std::isfinite(params.interaction)) {
        throw InvalidParameter("interaction U must be finite");
    }
    const double bound = reality_bound(params.n_particles, params.tunneling);
    if (params.interaction < bound - 1e-12 * params.tunneling) {
        throw InvalidParameter("interaction U = " + std::to_string(params.interaction) +
                               " violates the reality bound U >= -2J/N = " +
                               std::to_string(bound));
    }
}

Regime classify_regime(const ModelParams& params) {
    const double n = params.n_particles;
    const double ratio = params.interaction * n / params.tunneling;
    if (ratio < 0.1) return Regime::rabi;
    if (ratio > 10.0 * n * n) return Regime::fock;
    return Regime::josephson;
}

std::string_view to_string(Regime regime) {
    switch (regime) {
        case Regime::rabi: return "rabi";
        case Regime::josephson: return "josephson";
        case Regime::fock: return "fock";
    }
    return "unknown";
}

FockBasis::FockBasis(int n_particles) : n_(n_particles) {
    if (n_particles < 1) throw InvalidParameter("particle number must be >= 1");
}

int FockBasis::left(int k) const {
    if (k < 0 || k > n_) throw InvalidParameter("basis index out of range");
    return k;
}

int FockBasis::right(int k) const { return n_ - left(k); }

int FockBasis::index(int n_left) const { return left(n_left); }

StateVector TridiagonalHamiltonian::apply(const StateVector& psi) const {
    const Eigen::Index dim = diagonal.size();
    if (psi.size() != dim) throw InvalidParameter("state dimension does not match Hamiltonian");
    StateVector out = diagonal.cast<std::complex<double>>().cwiseProduct(psi);
    for (Eigen::Index k = 0; k + 1 < dim; ++k) {
        out[k] += off_diagonal[k] * psi[k + 1];
        out[k + 1] += off_diagonal[k] * psi[k];
    }
    return out;
}

Eigen::MatrixXd TridiagonalHamiltonian::dense() const {
    const Eigen::Index dim = diagonal.size();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    h.diagonal() = diagonal;
    for (Eigen::Index k = 0; k + 1 < dim; ++k) {
        h(k, k + 1) = off_diagonal[k];
        h(k + 1, k) = off_diagonal[k];
    }
    return h;
}

double TridiagonalHamiltonian::norm_bound() const {
    const Eigen::Index dim = diagonal.size();
    double best = 0.0;
    for (Eigen::Index k = 0; k < dim; ++k) {
        double row = std::abs(diagonal[k]);
        if (k > 0) row += std::abs(off_diagonal[k - 1]);
        if (k + 1 < dim) row += std::abs(off_diagonal[k]);
        best = std::max(best, row);
    }
    return best;
}

Eigen::VectorXd interaction_diagonal(int n_particles) {
    const int n = n_particles;
    Eigen::VectorXd v(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double l = k;
        const double r = n - k;
        v[k] = 0.5 * (l * (l - 1.0) + r * (r - 1.0));
    }
    return v;
}

TridiagonalHamiltonian build_hamiltonian(const ModelParams& params) {
    validate(params);
    const int n = params.n_particles;
    TridiagonalHamiltonian h;
    h.params = params;
    h.diagonal = params.interaction * interaction_diagonal(n);
    h.off_diagonal.resize(n);
    for (int k = 0; k < n; ++k) h.off_diagonal[k] = -params.tunneling * hop(n, k);
    return h;
}

Observable parse_observable(std::string_view name) {
    const std::string key = lowercase(name);
    if (key == "jx") return Observable::jx;
    if (key == "jy") return Observable::jy;
    if (key == "jz") return Observable::jz;
    if (key == "imbalance") return Observable::imbalance;
    if (key == "imbalance_squared") return Observable::imbalance_squared;
    throw InvalidParameter("unknown observable '" + std::string(name) + "'");
}

std::string_view to_string(Observable name) {
    switch (name) {
        case Observable::jx: return "Jx";
        case Observable::jy: return "Jy";
        case Observable::jz: return "Jz";
        case Observable::imbalance: return "imbalance";
        case Observable::imbalance_squared: return "imbalance_squared";
    }
    return "unknown";
}

ObservableMatrix build_observable(const ModelParams& params, Observable name) {
    validate(params);
    const int n = params.n_particles;
    const Eigen::Index dim = n + 1;
    using cd = std::complex<double>;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    switch (name) {
        case Observable::jx:
            for (int k = 0; k <= n; ++k) m(k, k) = 0.5 * (n - 2.0 * k);
            break;
        case Observable::imbalance:
            for (int k = 0; k <= n; ++k) m(k, k) = 2.0 * k - n;
            break;
        case Observable::imbalance_squared:
            for (int k = 0; k <= n; ++k) m(k, k) = (2.0 * k - n) * (2.0 * k - n);
            break;
        case Observable::jz:
            for (int k = 0; k < n; ++k) {
                m(k, k + 1) = 0.5 * hop(n, k);
                m(k + 1, k) = 0.5 * hop(n, k);
            }
            break;
        case Observable::jy:
            // Jy = (i/2)(a_R^dag a_L - a_L^dag a_R); a_R^dag a_L lowers k.
            for (int k = 0; k < n; ++k) {
                m(k, k + 1) = cd(0.0, 0.5 * hop(n, k));
                m(k + 1, k) = cd(0.0, -0.5 * hop(n, k));
            }
            break;
    }
    return {name, std::move(m)};
}

ObservableMatrix build_observable(const ModelParams& params, std::string_view name) {
    return build_observable(params, parse_observable(name));
}

double plasma_frequency(int n_particles, double tunneling, double interaction) {
    const double arg = interaction * n_particles / (2.0 * tunneling) + 1.0;
    if (arg < 0.0) {
        if (arg > -1e-12) return 0.0;
        throw InvalidParameter("plasma frequency is imaginary: U = " + std::to_string(interaction) +
                               " below -2J/N");
    }
    return 2.0 * tunneling * std::sqrt(arg);
}

double plasma_frequency(const ModelParams& params) {
    return plasma_frequency(params.n_particles, params.tunneling, params.interaction);
}

}  // namespace bjj
