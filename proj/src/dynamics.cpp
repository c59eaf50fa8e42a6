#include "bjj/dynamics.hpp"

#include "bjj/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace bjj {

namespace {

Eigen::MatrixXd sector_basis(int n, Parity sector) {
    const int full = n + 1;
    if (sector == Parity::none) return Eigen::MatrixXd::Identity(full, full);
    const double sign = sector == Parity::even ? 1.0 : -1.0;
    const double r = std::sqrt(0.5);
    std::vector<std::pair<int, int>> pairs;
    for (int k = 0; k <= n - k; ++k) {
        if (k == n - k && sector == Parity::odd) continue;
        pairs.emplace_back(k, n - k);
    }
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(full, static_cast<int>(pairs.size()));
    for (int c = 0; c < static_cast<int>(pairs.size()); ++c) {
        const auto [k, m] = pairs[c];
        if (k == m) {
            b(k, c) = 1.0;
        } else {
            b(k, c) = r;
            b(m, c) = sign * r;
        }
    }
    return b;
}

void require_normalized(const StateVector& psi) {
    if (std::abs(psi.norm() - 1.0) > 1e-10) {
        throw InvalidParameter("initial state is not normalized");
    }
}

void require_ramp_real(const Ramp& ramp, int n, double j) {
    if (!ramp.satisfies_reality_bound(n, j)) {
        throw InvalidParameter("ramp violates the reality bound U >= -2J/N");
    }
}

}  // namespace

Parity detect_parity(const StateVector& state, double tolerance) {
    const Eigen::Index n = state.size() - 1;
    double even = 0.0;
    double odd = 0.0;
    for (Eigen::Index k = 0; k <= n; ++k) {
        even = std::max(even, std::abs(state[k] - state[n - k]));
        odd = std::max(odd, std::abs(state[k] + state[n - k]));
    }
    if (even <= tolerance) return Parity::even;
    if (odd <= tolerance) return Parity::odd;
    return Parity::none;
}

SplitStepPropagator::SplitStepPropagator(int n_particles, double tunneling, Parity sector)
    : n_(n_particles), j_(tunneling), sector_(sector) {
    validate({n_particles, tunneling, 0.0});
    if (sector == Parity::odd && n_particles == 0) {
        throw InvalidParameter("odd sector is empty");
    }
    basis_ = sector_basis(n_particles, sector);
    const TridiagonalHamiltonian t = build_hamiltonian({n_particles, tunneling, 0.0});
    const Eigen::MatrixXd ts = basis_.transpose() * t.dense() * basis_;
    const Eigen::VectorXd v = interaction_diagonal(n_particles);
    interaction_ = basis_.transpose() * v.asDiagonal() * basis_ * Eigen::VectorXd::Ones(basis_.cols());
    // basis_ columns have disjoint support on levels with equal v, so the
    // projected interaction is diagonal and the line above extracts it.
    const int m = static_cast<int>(ts.rows());
    tunneling_diag_ = ts.diagonal();
    tunneling_off_ = m > 1 ? Eigen::VectorXd(ts.diagonal(-1)) : Eigen::VectorXd();
    const Spectrum s = diagonalize_tridiagonal(tunneling_diag_, tunneling_off_);
    energies_ = s.eigenvalues;
    vectors_ = s.eigenvectors;
    // Newton-Schulz polish: orthogonality errors of the eigenvectors would
    // otherwise leak norm at every one of the many transforms of a run.
    for (int it = 0; it < 2; ++it) {
        const Eigen::MatrixXd gram = vectors_.transpose() * vectors_;
        vectors_ = 0.5 * vectors_ * (3.0 * Eigen::MatrixXd::Identity(m, m) - gram);
    }
    vectors_t_ = vectors_.transpose();
}

TridiagonalHamiltonian SplitStepPropagator::hamiltonian(double u) const {
    TridiagonalHamiltonian h;
    h.params = {n_, j_, u};
    h.diagonal = tunneling_diag_ + u * interaction_;
    h.off_diagonal = tunneling_off_;
    return h;
}

StateVector SplitStepPropagator::project(const StateVector& full) const {
    if (full.size() != basis_.rows()) throw InvalidParameter("state dimension mismatch");
    return basis_.transpose().cast<std::complex<double>>() * full;
}

StateVector SplitStepPropagator::embed(const StateVector& reduced) const {
    if (reduced.size() != basis_.cols()) throw InvalidParameter("state dimension mismatch");
    return basis_.cast<std::complex<double>>() * reduced;
}

StateVector SplitStepPropagator::run(const StateVector& psi, const Ramp& ramp, int steps,
                                     const Observer& observer, int stride) const {
    if (psi.size() != dimension()) throw InvalidParameter("state dimension mismatch");
    if (steps < 1) throw InvalidParameter("need at least one time step");
    if (stride < 1) throw InvalidParameter("record stride must be positive");
    const double h = ramp.duration() / steps;
    const double bound = reality_bound(n_, j_) - 1e-12 * j_;
    const Eigen::Index m = dimension();

    // Real and imaginary parts are kept apart so each transform is two real
    // matrix-vector products.
    const Eigen::ArrayXd half_c = (-0.5 * h * energies_).array().cos();
    const Eigen::ArrayXd half_s = (-0.5 * h * energies_).array().sin();
    const Eigen::ArrayXd full_c = (-h * energies_).array().cos();
    const Eigen::ArrayXd full_s = (-h * energies_).array().sin();
    Eigen::VectorXd re = vectors_t_ * psi.real();
    Eigen::VectorXd im = vectors_t_ * psi.imag();
    Eigen::VectorXd fre(m), fim(m);

    auto rotate = [](Eigen::VectorXd& a, Eigen::VectorXd& b, const Eigen::ArrayXd& c,
                     const Eigen::ArrayXd& s) {
        const Eigen::ArrayXd a0 = a.array();
        a.array() = a0 * c - b.array() * s;
        b.array() = a0 * s + b.array() * c;
    };
    auto to_fock = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        StateVector out(m);
        out.real() = vectors_ * a;
        out.imag() = vectors_ * b;
        return out;
    };

    if (observer) observer(0.0, psi);
    for (int s = 0; s < steps; ++s) {
        if (s == 0) {
            rotate(re, im, half_c, half_s);
        } else {
            rotate(re, im, full_c, full_s);
        }
        fre.noalias() = vectors_ * re;
        fim.noalias() = vectors_ * im;
        const double u = ramp.value_unchecked((s + 0.5) * h);
        if (u < bound) {
            throw InvalidParameter("U(t) = " + std::to_string(u) + " below the reality bound at t = " +
                                   std::to_string((s + 0.5) * h));
        }
        for (Eigen::Index i = 0; i < m; ++i) {
            const double a = -u * h * interaction_[i];
            const double c = std::cos(a);
            const double sn = std::sin(a);
            const double r0 = fre[i];
            fre[i] = r0 * c - fim[i] * sn;
            fim[i] = r0 * sn + fim[i] * c;
        }
        re.noalias() = vectors_t_ * fre;
        im.noalias() = vectors_t_ * fim;
        if (observer && ((s + 1) % stride == 0 || s + 1 == steps)) {
            Eigen::VectorXd a = re, b = im;
            rotate(a, b, half_c, half_s);
            observer((s + 1) * h, to_fock(a, b));
        }
    }
    rotate(re, im, half_c, half_s);
    return to_fock(re, im);
}

std::shared_ptr<const SplitStepPropagator> shared_propagator(int n_particles, double tunneling,
                                                             Parity sector) {
    static std::mutex mutex;
    static std::map<std::tuple<int, double, int>, std::shared_ptr<const SplitStepPropagator>> cache;
    const auto key = std::make_tuple(n_particles, tunneling, static_cast<int>(sector));
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto made = std::make_shared<const SplitStepPropagator>(n_particles, tunneling, sector);
    std::lock_guard lock(mutex);
    return cache.emplace(key, std::move(made)).first->second;
}

std::string_view to_string(Tracked quantity) {
    switch (quantity) {
        case Tracked::position_variance: return "position_variance";
        case Tracked::imbalance: return "imbalance";
        case Tracked::imbalance_squared: return "imbalance_squared";
        case Tracked::energy: return "energy";
        case Tracked::norm: return "norm";
    }
    return "unknown";
}

EvolutionConfig::EvolutionConfig(Ramp ramp, double time_step, std::vector<Tracked> tracked,
                                 int record_stride)
    : ramp_(std::move(ramp)), tracked_(std::move(tracked)), stride_(record_stride) {
    if (!(time_step > 0.0) || !std::isfinite(time_step)) {
        throw InvalidParameter("time step must be positive");
    }
    if (record_stride < 1) throw InvalidParameter("record stride must be positive");
    const double ratio = ramp_.duration() / time_step;
    if (ratio > 2e9) throw InvalidParameter("too many time steps");
    steps_ = std::max(1, static_cast<int>(std::ceil(ratio - 1e-9)));
    step_ = ramp_.duration() / steps_;
}

EvolutionConfig EvolutionConfig::with_time_step(double time_step) const {
    EvolutionConfig c(ramp_, time_step, tracked_, stride_);
    c.parity_reduction = parity_reduction;
    return c;
}

const std::vector<double>& Trajectory::series_of(Tracked quantity) const {
    for (std::size_t i = 0; i < tracked.size(); ++i) {
        if (tracked[i] == quantity) return series[i];
    }
    throw InvalidParameter("quantity '" + std::string(to_string(quantity)) + "' was not tracked");
}

double position_variance(const StateVector& full_state) {
    const double n = static_cast<double>(full_state.size() - 1);
    return 2.0 / n * jx_squared(full_state);
}

Trajectory evolve(const StateVector& initial_state, const ModelParams& fixed_j,
                  const EvolutionConfig& config) {
    validate({fixed_j.n_particles, fixed_j.tunneling, 0.0});
    if (initial_state.size() != fixed_j.n_particles + 1) {
        throw InvalidParameter("state dimension does not match N + 1");
    }
    const Parity p = config.parity_reduction ? detect_parity(initial_state) : Parity::none;
    return evolve(initial_state, *shared_propagator(fixed_j.n_particles, fixed_j.tunneling, p), config);
}

Trajectory evolve(const StateVector& initial_state, const SplitStepPropagator& propagator,
                  const EvolutionConfig& config) {
    const int n = propagator.n_particles();
    if (initial_state.size() != n + 1) throw InvalidParameter("state dimension does not match N + 1");
    require_normalized(initial_state);
    require_ramp_real(config.ramp(), n, propagator.tunneling());

    const StateVector reduced = propagator.project(initial_state);
    if (std::abs(reduced.norm() - 1.0) > 1e-10) {
        throw InvalidParameter("initial state has no definite parity for the requested sector");
    }

    Trajectory traj;
    traj.tracked = config.tracked();
    traj.series.resize(traj.tracked.size());
    const Eigen::VectorXd imbalance = Eigen::VectorXd::LinSpaced(n + 1, -n, n);
    const Ramp& ramp = config.ramp();
    const ModelParams base{n, propagator.tunneling(), 0.0};

    auto record = [&](double t, const StateVector& psi) {
        traj.times.push_back(t);
        const double norm = psi.norm();
        traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(norm - 1.0));
        if (traj.tracked.empty()) return;
        const StateVector full = propagator.embed(psi);
        for (std::size_t i = 0; i < traj.tracked.size(); ++i) {
            double value = 0.0;
            switch (traj.tracked[i]) {
                case Tracked::position_variance: value = position_variance(full); break;
                case Tracked::imbalance: value = diagonal_expectation(full, imbalance); break;
                case Tracked::imbalance_squared:
                    value = diagonal_expectation(full, imbalance.cwiseProduct(imbalance));
                    break;
                case Tracked::energy: {
                    ModelParams p = base;
                    p.interaction = ramp.value(std::min(t, ramp.duration()));
                    value = expectation(full, build_hamiltonian(p));
                    break;
                }
                case Tracked::norm: value = norm; break;
            }
            traj.series[i].push_back(value);
        }
    };

    const StateVector final_reduced =
        propagator.run(reduced, ramp, config.steps(), record, config.record_stride());
    traj.final_state = propagator.embed(final_reduced);
    return traj;
}

FiniteTimeWork finite_time_work(const ModelParams& initial, const ModelParams& final,
                                const EvolutionConfig& config,
                                std::optional<StepRefinement> refinement) {
    validate(initial);
    validate(final);
    if (initial.n_particles != final.n_particles) {
        throw InvalidParameter("initial and final particle numbers differ");
    }
    if (initial.tunneling != final.tunneling) {
        throw InvalidParameter("finite-time work is defined at fixed J");
    }
    const Ramp& ramp = config.ramp();
    const double tol = 1e-12 * std::max(1.0, std::abs(initial.interaction) + std::abs(final.interaction));
    if (std::abs(ramp.u_initial() - initial.interaction) > tol ||
        std::abs(ramp.u_final() - final.interaction) > tol) {
        throw InvalidParameter("ramp endpoints do not match the initial and final interaction");
    }

    const Spectrum si = diagonalize(build_hamiltonian(initial));
    const Spectrum sf = diagonalize(build_hamiltonian(final));
    const double e0 = si.eigenvalues[0];
    const double ef0 = sf.eigenvalues[0];
    const StateVector psi0 = si.state(0);

    FiniteTimeWork out;
    EvolutionConfig current = config;
    auto excitation_of = [&](const StateVector& psi) {
        const Eigen::VectorXcd c = sf.eigenvectors.transpose().cast<std::complex<double>>() * psi;
        double acc = 0.0;
        for (Eigen::Index q = 0; q < c.size(); ++q) {
            acc += std::norm(c[q]) * (sf.eigenvalues[q] - ef0);
        }
        return acc;
    };

    Trajectory traj = evolve(psi0, initial, current);
    double w_irr = excitation_of(traj.final_state);
    if (refinement) {
        out.converged = false;
        for (int h = 1; h <= refinement->max_halvings; ++h) {
            EvolutionConfig finer = current.with_time_step(0.5 * current.time_step());
            Trajectory next = evolve(psi0, initial, finer);
            const double w_next = excitation_of(next.final_state);
            out.last_change = std::abs(w_next - w_irr);
            current = finer;
            traj = std::move(next);
            w_irr = w_next;
            out.halvings = h;
            if (out.last_change < refinement->tolerance * initial.tunneling) {
                out.converged = true;
                break;
            }
        }
        if (refinement->max_halvings == 0) out.converged = true;
    }

    const StateVector& psi = traj.final_state;
    const Eigen::VectorXcd c = sf.eigenvectors.transpose().cast<std::complex<double>>() * psi;
    std::vector<WorkEntry> raw(static_cast<std::size_t>(c.size()));
    for (Eigen::Index q = 0; q < c.size(); ++q) raw[q] = {sf.eigenvalues[q] - e0, std::norm(c[q])};
    out.distribution = make_work_distribution(std::move(raw), initial.tunneling);
    out.distribution.initial_ground_energy = e0;
    out.distribution.final_ground_energy = ef0;
    out.distribution.initial = initial;
    out.distribution.final = final;

    // Direct moments with H_f - E~_0 applied first to keep the large common
    // diagonal out of the sums.
    const TridiagonalHamiltonian hf = build_hamiltonian(final);
    const StateVector shifted = hf.apply(psi) - ef0 * psi;
    const double excitation = psi.dot(shifted).real();
    out.direct_mean = excitation + (ef0 - e0);
    out.direct_variance = (shifted - excitation * psi).squaredNorm();

    const double du = final.interaction - initial.interaction;
    out.moments.delta_f = ef0 - e0;
    out.moments.w_irr = w_irr;
    out.moments.mean = out.moments.delta_f + w_irr;
    out.moments.variance = out.distribution.variance();
    out.moments.w_class = classical_work(initial.n_particles, du);
    out.moments.w_quant = out.moments.mean - out.moments.w_class;
    out.final_state = psi;
    out.time_step = current.time_step();
    return out;
}

std::vector<std::size_t> local_minima(std::span<const double> values) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        if (values[i] < values[i - 1] && values[i] <= values[i + 1]) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> local_maxima(std::span<const double> values) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        if (values[i] > values[i - 1] && values[i] >= values[i + 1]) out.push_back(i);
    }
    return out;
}

SqueezingSyncReport squeezing_sync_report(const Trajectory& trajectory, const Ramp& ramp,
                                          const ModelParams& fixed_j,
                                          std::span<const double> work_taus,
                                          std::span<const double> work_values,
                                          std::span<const double> reference_variance) {
    const std::vector<double>& x2 = trajectory.series_of(Tracked::position_variance);
    if (x2.size() < 3) throw InvalidParameter("need at least three trajectory samples");
    if (work_taus.size() != work_values.size()) {
        throw InvalidParameter("work samples and tau grid differ in length");
    }
    if (!reference_variance.empty() && reference_variance.size() != x2.size()) {
        throw InvalidParameter("reference curve is not aligned with the trajectory");
    }

    SqueezingSyncReport r;
    r.times = trajectory.times;
    r.deviation.resize(x2.size());
    const double j = fixed_j.tunneling;
    const int n = fixed_j.n_particles;
    for (std::size_t i = 0; i < x2.size(); ++i) {
        const double t = std::min(r.times[i], ramp.duration());
        const double target = j / plasma_frequency(n, j, ramp.value(t));
        r.deviation[i] = x2[i] - target;
        if (!reference_variance.empty()) r.reference_deviation.push_back(reference_variance[i] - target);
        if (i > 0) r.oscillation_amplitude = std::max(r.oscillation_amplitude, std::abs(r.deviation[i]));
        if (i > 0 && r.deviation[i - 1] * r.deviation[i] < 0.0) {
            const double a = r.deviation[i - 1];
            const double b = r.deviation[i];
            r.crossing_times.push_back(r.times[i - 1] + (r.times[i] - r.times[i - 1]) * a / (a - b));
        }
    }
    for (std::size_t i : local_minima(r.deviation)) r.deviation_minima.push_back(r.times[i]);
    for (std::size_t i : local_maxima(r.deviation)) r.deviation_maxima.push_back(r.times[i]);
    for (std::size_t i : local_minima(work_values)) r.work_minima.push_back(work_taus[i]);
    for (std::size_t i : local_maxima(work_values)) r.work_maxima.push_back(work_taus[i]);

    std::vector<double> features = r.deviation_minima;
    features.insert(features.end(), r.deviation_maxima.begin(), r.deviation_maxima.end());
    features.insert(features.end(), r.crossing_times.begin(), r.crossing_times.end());
    for (double tau : r.work_minima) {
        double best = std::numeric_limits<double>::infinity();
        for (double f : features) best = std::min(best, std::abs(f - tau));
        r.alignment.push_back(best);
    }
    return r;
}

}  // namespace bjj
