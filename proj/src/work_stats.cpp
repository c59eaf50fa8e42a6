#include "bjj/work_stats.hpp"

#include "bjj/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bjj {

namespace {

void require_same_n(const ModelParams& initial, const ModelParams& final) {
    validate(initial);
    validate(final);
    if (initial.n_particles != final.n_particles) {
        throw InvalidParameter("initial and final particle numbers differ");
    }
}

}  // namespace

double WorkDistribution::total_probability() const {
    double acc = 0.0;
    for (const auto& e : entries) acc += e.probability;
    return acc;
}

double WorkDistribution::mean() const {
    double acc = 0.0;
    for (const auto& e : entries) acc += e.probability * e.work;
    return acc;
}

double WorkDistribution::variance() const {
    const double mu = mean();
    double acc = 0.0;
    for (const auto& e : entries) acc += e.probability * (e.work - mu) * (e.work - mu);
    return acc;
}

WorkDistribution make_work_distribution(std::vector<WorkEntry> raw, double tunneling,
                                        double merge_tolerance) {
    std::sort(raw.begin(), raw.end(),
              [](const WorkEntry& a, const WorkEntry& b) { return a.work < b.work; });
    WorkDistribution dist;
    const double tol = merge_tolerance * tunneling;
    std::size_t i = 0;
    while (i < raw.size()) {
        std::size_t j = i + 1;
        while (j < raw.size() && raw[j].work - raw[i].work < tol) ++j;
        double p = 0.0;
        double pw = 0.0;
        double w = 0.0;
        for (std::size_t k = i; k < j; ++k) {
            p += raw[k].probability;
            pw += raw[k].probability * raw[k].work;
            w += raw[k].work;
        }
        const double work = p > 0.0 ? pw / p : w / static_cast<double>(j - i);
        dist.entries.push_back({work, p});
        i = j;
    }
    return dist;
}

double classical_work(int n_particles, double delta_u) {
    const double half = 0.5 * n_particles;
    return delta_u * half * (half - 1.0);
}

WorkDistribution sudden_work_distribution(const ModelParams& initial, const ModelParams& final) {
    require_same_n(initial, final);
    const Spectrum si = diagonalize(build_hamiltonian(initial));
    const Spectrum sf = diagonalize(build_hamiltonian(final));
    const Eigen::VectorXd overlaps = sf.eigenvectors.transpose() * si.eigenvectors.col(0);
    const double e0 = si.eigenvalues[0];

    std::vector<WorkEntry> raw(static_cast<std::size_t>(sf.dimension()));
    for (int q = 0; q < sf.dimension(); ++q) {
        raw[q] = {sf.eigenvalues[q] - e0, overlaps[q] * overlaps[q]};
    }
    WorkDistribution dist = make_work_distribution(std::move(raw), initial.tunneling);
    dist.initial_ground_energy = e0;
    dist.final_ground_energy = sf.eigenvalues[0];
    dist.initial = initial;
    dist.final = final;
    return dist;
}

WorkMoments sudden_moments(const ModelParams& initial, const ModelParams& final) {
    require_same_n(initial, final);
    const TridiagonalHamiltonian hi = build_hamiltonian(initial);
    const TridiagonalHamiltonian hf = build_hamiltonian(final);
    const Spectrum si = diagonalize(hi);
    const double e0 = si.eigenvalues[0];
    const double ef0 = diagonalize(hf).eigenvalues[0];
    const StateVector psi = si.state(0);

    // H_f - E_0 = (H_f - H_i) + (H_i - E_0); the difference carries the work
    // without the large common diagonal.
    TridiagonalHamiltonian dh = hf;
    dh.diagonal -= hi.diagonal;
    dh.off_diagonal -= hi.off_diagonal;
    const StateVector residual_i = hi.apply(psi) - e0 * psi;
    const StateVector shifted = dh.apply(psi) + residual_i;

    WorkMoments m;
    m.mean = psi.dot(shifted).real();
    m.variance = (shifted - m.mean * psi).squaredNorm();
    m.delta_f = ef0 - e0;
    m.w_irr = m.mean - m.delta_f;
    const double du = final.interaction - initial.interaction;
    m.w_class = classical_work(initial.n_particles, du);
    m.w_quant = du * jx_squared(psi);
    return m;
}

WorkMoments moments_of(const WorkDistribution& dist, double w_class) {
    WorkMoments m;
    m.mean = dist.mean();
    m.variance = dist.variance();
    m.delta_f = dist.delta_f();
    m.w_irr = m.mean - m.delta_f;
    m.w_class = w_class;
    m.w_quant = m.mean - w_class;
    return m;
}

WorkMoments qho_sudden_moments(const ModelParams& initial, const ModelParams& final) {
    require_same_n(initial, final);
    const double n = initial.n_particles;
    const double j = initial.tunneling;
    const double wi = plasma_frequency(initial);
    const double wf = plasma_frequency(final);
    const double du = final.interaction - initial.interaction;

    WorkMoments m;
    m.w_class = classical_work(initial.n_particles, du);
    m.w_quant = du * 0.5 * n * j / wi;
    m.mean = m.w_class + m.w_quant;
    m.variance = (j * j) / (wi * wi) * 0.5 * n * n * du * du;
    m.w_irr = 0.5 * n * j / wi * du - 0.5 * (wf - wi);
    m.delta_f = m.mean - m.w_irr;
    return m;
}

LimitMoments qho_limit_moments(const ModelParams& initial, const ModelParams& final,
                               QuenchLimit limit) {
    require_same_n(initial, final);
    const double n = initial.n_particles;
    const double j = initial.tunneling;
    const double ui = initial.interaction;
    const double uf = final.interaction;
    const double du = uf - ui;
    const double ratio = ui * n / (2.0 * j);

    WorkMoments m;
    m.w_class = classical_work(initial.n_particles, du);
    if (limit == QuenchLimit::small_initial) {
        const double wf = plasma_frequency(final);
        m.w_quant = du * n * j / (4.0 * j + ui * n);
        m.variance = (uf * uf - 2.0 * uf * ui) * n * n / 8.0 / (ratio + 1.0);
        const double sqrt_expansion = 1.0 + ui * n / (4.0 * j) - ui * ui * n * n / (32.0 * j * j);
        m.w_irr = du * n / 4.0 / (1.0 + ui * n / (4.0 * j)) - (wf - 2.0 * j * sqrt_expansion) / 2.0;
    } else {
        if (!(ui > 0.0) || uf < 0.0) {
            throw InvalidParameter("large-U_i limit needs U_i > 0 and U_f >= 0");
        }
        m.w_quant = du / 4.0 * 2.0 * j * n / ui;
        m.variance = -uf * n * j / 4.0 - du * n * j / 4.0;
        m.w_irr = du / 4.0 * std::sqrt(2.0 * j * n / ui) -
                  std::sqrt(n * j / 2.0) * (std::sqrt(uf) - std::sqrt(ui));
    }
    m.mean = m.w_class + m.w_quant;
    m.delta_f = m.mean - m.w_irr;
    return {m, ratio};
}

QuenchStrengthLimits qho_quench_strength_limits(const ModelParams& final) {
    validate(final);
    const double n = final.n_particles;
    const double uf = final.interaction;
    return {n * n * uf * uf / (32.0 * final.tunneling), n * uf / 4.0};
}

ExponentialWorkDensity::ExponentialWorkDensity(double sigma, bool mirrored)
    : sigma_(sigma), mirrored_(mirrored) {
    if (!(sigma > 0.0)) throw InvalidParameter("exponential density needs sigma > 0");
}

double ExponentialWorkDensity::density(double w) const {
    const double x = mirrored_ ? -w : w;
    if (x <= 0.0) return 0.0;
    return std::exp(-x / sigma_) / std::sqrt(std::numbers::pi * sigma_ * x);
}

double ExponentialWorkDensity::cdf(double w) const {
    if (!mirrored_) return w <= 0.0 ? 0.0 : std::erf(std::sqrt(w / sigma_));
    return w >= 0.0 ? 1.0 : std::erfc(std::sqrt(-w / sigma_));
}

double ExponentialWorkDensity::mean() const { return (mirrored_ ? -0.5 : 0.5) * sigma_; }

double ExponentialWorkDensity::variance() const { return 0.5 * sigma_ * sigma_; }

ExponentialWorkDensity exponential_work_density(const ModelParams& initial,
                                                const ModelParams& final, bool allow_mirrored) {
    require_same_n(initial, final);
    const double du = final.interaction - initial.interaction;
    if (du == 0.0) throw InvalidParameter("exponential density undefined for dU = 0");
    if (du < 0.0 && !allow_mirrored) {
        throw InvalidParameter("exponential density needs dU > 0 (mirrored density not requested)");
    }
    const double sigma =
        initial.tunneling * std::abs(du) * initial.n_particles / plasma_frequency(initial);
    return ExponentialWorkDensity(sigma, du < 0.0);
}

}  // namespace bjj
