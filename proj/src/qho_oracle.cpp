#include "bjj/qho_oracle.hpp"

#include "bjj/error.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace bjj {

namespace {

using OdeState = std::array<double, 3>;

GState rhs(const GState& g, double mass, double omega_sq) {
    return {-2.0 * g.g_zero / mass, mass * omega_sq * g.g_minus - g.g_plus / mass,
            2.0 * mass * omega_sq * g.g_zero};
}

// Hard cap on the automatic truncation of the transition-probability list.
constexpr int kMaxAutomaticLevels = 2'000'000;

}  // namespace

double QhoParams::omega_squared(double interaction) const {
    validate({n_particles, tunneling, interaction});
    return std::max(0.0, 4.0 * tunneling * tunneling + 2.0 * tunneling * interaction * n_particles);
}

double QhoParams::omega(double interaction) const {
    return plasma_frequency(n_particles, tunneling, interaction);
}

double QhoParams::offset(double interaction) const {
    const double n = n_particles;
    return -interaction * n / 2.0 + interaction * n * n / 4.0 - tunneling - tunneling * n;
}

FrequencyProtocol::FrequencyProtocol(double mass, double duration,
                                     std::function<double(double)> omega_squared)
    : mass_(mass), duration_(duration), omega_squared_(std::move(omega_squared)) {
    if (!(mass > 0.0)) throw InvalidParameter("oscillator mass must be positive");
    if (!(duration >= 0.0) || !std::isfinite(duration)) {
        throw InvalidParameter("protocol duration must be non-negative");
    }
    if (!omega_squared_) throw InvalidParameter("empty frequency protocol");
    if (!(omega_initial() > 0.0)) throw InvalidParameter("initial frequency must be positive");
}

FrequencyProtocol FrequencyProtocol::from_ramp(const Ramp& ramp, int n_particles, double tunneling) {
    validate({n_particles, tunneling, ramp.u_initial()});
    validate({n_particles, tunneling, ramp.u_final()});
    if (!ramp.satisfies_reality_bound(n_particles, tunneling)) {
        throw InvalidParameter("ramp violates the reality bound U >= -2J/N");
    }
    const double a = 4.0 * tunneling * tunneling;
    const double b = 2.0 * tunneling * n_particles;
    return FrequencyProtocol(0.5 / tunneling, ramp.duration(), [ramp, a, b](double t) {
        return std::max(0.0, a + b * ramp.value(std::clamp(t, 0.0, ramp.duration())));
    });
}

FrequencyProtocol FrequencyProtocol::constant(double mass, double omega, double duration) {
    const double w2 = omega * omega;
    return FrequencyProtocol(mass, duration, [w2](double) { return w2; });
}

double FrequencyProtocol::omega_initial() const { return std::sqrt(omega_squared_(0.0)); }

double FrequencyProtocol::omega_final() const { return std::sqrt(omega_squared_(duration_)); }

void GFunctions::push(double t, const GState& g, const GState& derivative) {
    times_.push_back(t);
    states_.push_back(g);
    derivatives_.push_back(derivative);
}

GState GFunctions::at(double t) const {
    if (times_.empty()) throw InvalidParameter("empty g-function trajectory");
    if (t < -1e-12 * std::max(1.0, duration()) || t > duration() * (1.0 + 1e-12) + 1e-15) {
        throw InvalidParameter("g-functions evaluated outside the propagated interval");
    }
    if (times_.size() == 1 || t <= times_.front()) return states_.front();
    if (t >= times_.back()) return states_.back();
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times_.begin()) - 1;
    const double h = times_[i + 1] - times_[i];
    const double s = (t - times_[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    auto blend = [&](double y0, double d0, double y1, double d1) {
        return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    };
    const GState& a = states_[i];
    const GState& b = states_[i + 1];
    const GState& da = derivatives_[i];
    const GState& db = derivatives_[i + 1];
    return {blend(a.g_minus, da.g_minus, b.g_minus, db.g_minus),
            blend(a.g_zero, da.g_zero, b.g_zero, db.g_zero),
            blend(a.g_plus, da.g_plus, b.g_plus, db.g_plus)};
}

double GFunctions::invariant_drift() const {
    const double w2 = omega_i_ * omega_i_;
    double worst = 0.0;
    for (const auto& g : states_) {
        worst = std::max(worst, std::abs(g.g_plus * g.g_minus - g.g_zero * g.g_zero - w2) / w2);
    }
    return worst;
}

GFunctions propagate_g(const FrequencyProtocol& protocol, PropagationOptions options) {
    namespace ode = boost::numeric::odeint;
    if (!(options.tolerance > 0.0)) throw InvalidParameter("tolerance must be positive");
    const double m = protocol.mass();
    const double wi = protocol.omega_initial();
    const double tau = protocol.duration();

    GFunctions g(m, wi);
    GState g0{1.0 / m, 0.0, m * wi * wi};
    g.push(0.0, g0, rhs(g0, m, protocol.omega_squared(0.0)));
    if (tau == 0.0) return g;

    auto system = [&](const OdeState& x, OdeState& dx, double t) {
        const GState d = rhs({x[0], x[1], x[2]}, m, protocol.omega_squared(t));
        dx = {d.g_minus, d.g_zero, d.g_plus};
    };
    // Per-step control well below the requested tolerance keeps the
    // accumulated drift of the bilinear within it.
    const double rel = 1e-2 * options.tolerance;
    const double scale = std::min(1.0 / m, m * wi * wi);
    auto stepper = ode::make_controlled(rel * scale, rel, ode::runge_kutta_dopri5<OdeState>());

    OdeState x{g0.g_minus, g0.g_zero, g0.g_plus};
    double t = 0.0;
    double dt = std::min(tau, 1e-3 / std::max(wi, 1e-12));
    if (options.max_step > 0.0) dt = std::min(dt, options.max_step);
    while (t < tau) {
        dt = std::min(dt, tau - t);
        if (options.max_step > 0.0) dt = std::min(dt, options.max_step);
        const double t_before = t;
        const auto result = stepper.try_step(system, x, t, dt);
        if (result == ode::fail) {
            if (dt < options.min_step * std::max(1.0, tau)) {
                throw NumericalFailure("g-function integration step underflow at t = " +
                                       std::to_string(t));
            }
            continue;
        }
        if (tau - t < 1e-14 * tau) t = tau;
        const GState gs{x[0], x[1], x[2]};
        g.push(t, gs, rhs(gs, m, protocol.omega_squared(t)));
        if (!(gs.g_minus > 0.0)) throw NumericalFailure("g- lost positivity");
        if (t == t_before) throw NumericalFailure("g-function integration stalled");
    }

    if (g.invariant_drift() > 10.0 * options.tolerance) {
        throw NumericalFailure("g-function bilinear drifted by " + std::to_string(g.invariant_drift()));
    }
    return g;
}

double evolved_variance(const GFunctions& g, double t) {
    return g.at(t).g_minus / (2.0 * g.omega_initial());
}

std::vector<double> evolved_variance(const GFunctions& g, const std::vector<double>& times) {
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(evolved_variance(g, t));
    return out;
}

double evolved_momentum_variance(const GFunctions& g, double t) {
    return g.at(t).g_plus / (2.0 * g.omega_initial());
}

double TransitionProbabilities::total() const {
    double acc = 0.0;
    for (double p : even) acc += p;
    return acc;
}

double TransitionProbabilities::at(int q) const {
    if (q < 0 || q % 2 != 0 || q > q_max) return 0.0;
    return even[static_cast<std::size_t>(q / 2)];
}

TransitionProbabilities transition_probabilities(const GState& g_tau, double omega_initial,
                                                 double omega_final, double mass,
                                                 std::optional<int> q_max) {
    if (!(omega_initial > 0.0) || !(omega_final > 0.0) || !(mass > 0.0)) {
        throw InvalidParameter("frequencies and mass must be positive");
    }
    if (!(g_tau.g_minus > 0.0)) throw InvalidParameter("g- must be positive");
    if (q_max && (*q_max < 0 || *q_max % 2 != 0)) {
        throw InvalidParameter("q_max must be even and non-negative");
    }
    // Evolved ground state ~ exp(-lambda x^2), final ground state ~ exp(-beta x^2 / 2).
    const std::complex<double> lambda(omega_initial / (2.0 * g_tau.g_minus),
                                      g_tau.g_zero / (2.0 * g_tau.g_minus));
    const double beta = mass * omega_final;
    const std::complex<double> plus = lambda + beta / 2.0;
    const double zeta2 = std::norm((lambda - beta / 2.0) / plus);

    TransitionProbabilities out;
    double p = std::sqrt(2.0 * beta * lambda.real()) / std::abs(plus);
    out.even.push_back(p);
    auto tail = [&](double last) { return zeta2 < 1.0 ? last * zeta2 / (1.0 - zeta2) : 1.0; };
    // Bound on sum_{q > 2k} q^2 p_q from p_{2(k+i)} <= p_{2k} zeta2^i.
    auto moment_tail = [&](double last, int k) {
        if (zeta2 >= 1.0) return 1.0;
        const double r = zeta2, d = 1.0 - r;
        const double s0 = r / d, s1 = r / (d * d), s2 = r * (1.0 + r) / (d * d * d);
        return 4.0 * last * (double(k) * k * s0 + 2.0 * k * s1 + s2);
    };

    const int k_limit = q_max ? *q_max / 2 : kMaxAutomaticLevels;
    int k = 0;
    while (k < k_limit) {
        if (!q_max && tail(p) < kTransitionTailTolerance &&
            moment_tail(p, k) < kTransitionTailTolerance) {
            break;
        }
        ++k;
        p *= (2.0 * k - 1.0) / (2.0 * k) * zeta2;
        out.even.push_back(p);
    }
    out.q_max = 2 * k;
    out.tail_estimate = tail(p);
    if (out.tail_estimate >= kTransitionTailTolerance) {
        throw NumericalFailure("transition probabilities truncated at q_max = " +
                               std::to_string(out.q_max) + " with tail estimate " +
                               std::to_string(out.tail_estimate));
    }
    return out;
}

WorkDistribution qho_work_distribution(const TransitionProbabilities& p, double omega_final,
                                       double delta_f) {
    std::vector<WorkEntry> raw;
    raw.reserve(p.even.size());
    for (std::size_t k = 0; k < p.even.size(); ++k) {
        raw.push_back({delta_f + 2.0 * static_cast<double>(k) * omega_final, p.even[k]});
    }
    WorkDistribution dist = make_work_distribution(std::move(raw), 1.0);
    dist.initial_ground_energy = 0.0;
    dist.final_ground_energy = delta_f;
    return dist;
}

WorkMoments qho_finite_time_moments(const GFunctions& g, const QhoParams& qho, double u_initial,
                                    double u_final) {
    const double m = g.mass();
    const double wi = qho.omega(u_initial);
    const double wf = qho.omega(u_final);
    if (std::abs(wi - g.omega_initial()) > 1e-12 * wi) {
        throw InvalidParameter("g-functions were propagated from a different initial frequency");
    }
    const GState gt = g.final_state();
    const double x2 = gt.g_minus / (2.0 * wi);
    const double p2 = gt.g_plus / (2.0 * wi);

    WorkMoments mom;
    mom.w_irr = std::max(0.0, 0.5 * m * wf * wf * x2 + p2 / (2.0 * m) - 0.5 * wf);
    // A centred Gaussian has Var(H_f) = 2 E_exc (E_exc + omega_f) with E_exc
    // the excitation energy above the final ground state.
    mom.variance = 2.0 * mom.w_irr * (mom.w_irr + wf);
    mom.w_class = qho.offset(u_final) - qho.offset(u_initial);
    mom.delta_f = mom.w_class + 0.5 * (wf - wi);
    mom.mean = mom.delta_f + mom.w_irr;
    mom.w_quant = mom.mean - mom.w_class;
    return mom;
}

std::vector<double> hermite_functions(int q_max, double x, double mass, double omega) {
    if (q_max < 0) throw InvalidParameter("q_max must be non-negative");
    const double a = mass * omega;
    const double xi = std::sqrt(a) * x;
    std::vector<double> psi(static_cast<std::size_t>(q_max) + 1);
    psi[0] = std::pow(a / std::numbers::pi, 0.25) * std::exp(-0.5 * xi * xi);
    if (q_max >= 1) psi[1] = std::sqrt(2.0) * xi * psi[0];
    for (int q = 2; q <= q_max; ++q) {
        psi[q] = std::sqrt(2.0 / q) * xi * psi[q - 1] - std::sqrt((q - 1.0) / q) * psi[q - 2];
    }
    return psi;
}

}  // namespace bjj
