#include "bjj/ramp.hpp"

#include "bjj/error.hpp"
#include "bjj/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

namespace bjj {

std::string_view to_string(RampKind kind) {
    switch (kind) {
        case RampKind::linear: return "linear";
        case RampKind::lcs: return "lcs";
        case RampKind::two_lcs: return "two_lcs";
        case RampKind::cubic: return "cubic";
        case RampKind::quintic: return "quintic";
    }
    return "unknown";
}

RampKind parse_ramp_kind(std::string_view name) {
    std::string key(name);
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    std::replace(key.begin(), key.end(), '-', '_');
    if (key == "linear") return RampKind::linear;
    if (key == "lcs") return RampKind::lcs;
    if (key == "two_lcs" || key == "2lcs") return RampKind::two_lcs;
    if (key == "cubic") return RampKind::cubic;
    if (key == "quintic") return RampKind::quintic;
    throw InvalidParameter("unknown ramp kind '" + std::string(name) + "'");
}

int free_parameter_count(RampKind kind) {
    switch (kind) {
        case RampKind::linear: return 0;
        case RampKind::lcs: return 2;
        case RampKind::cubic: return 2;
        case RampKind::two_lcs: return 4;
        case RampKind::quintic: return 4;
    }
    return 0;
}

std::vector<std::string> free_parameter_names(RampKind kind) {
    switch (kind) {
        case RampKind::linear: return {};
        case RampKind::lcs: return {"A1", "B1"};
        case RampKind::two_lcs: return {"A1", "B1", "A2", "B2"};
        case RampKind::cubic: return {"A2", "A3"};
        case RampKind::quintic: return {"A2", "A3", "A4", "A5"};
    }
    return {};
}

Ramp::Ramp(RampKind kind, double u_initial, double u_final, double duration,
           std::span<const double> free_params)
    : kind_(kind), u_i_(u_initial), u_f_(u_final), tau_(duration),
      free_(free_params.begin(), free_params.end()) {
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw InvalidParameter("ramp duration must be positive and finite");
    }
    if (static_cast<int>(free_.size()) != free_parameter_count(kind)) {
        throw InvalidParameter("ramp kind '" + std::string(to_string(kind)) + "' takes " +
                               std::to_string(free_parameter_count(kind)) + " free parameters, got " +
                               std::to_string(free_.size()));
    }
    const double du = u_final - u_initial;
    switch (kind) {
        case RampKind::linear:
            coef_ = {u_initial, du, 0, 0, 0, 0};
            break;
        case RampKind::cubic: {
            const double a2 = free_[0], a3 = free_[1];
            coef_ = {u_initial, du - a2 - a3, a2, a3, 0, 0};
            break;
        }
        case RampKind::quintic: {
            const double a2 = free_[0], a3 = free_[1], a4 = free_[2], a5 = free_[3];
            coef_ = {u_initial, du - a2 - a3 - a4 - a5, a2, a3, a4, a5};
            break;
        }
        case RampKind::lcs: {
            const double a1 = free_[0], b1 = free_[1];
            coef_ = {u_initial - a1, a1, b1, 0, 0, du + 2.0 * a1};
            break;
        }
        case RampKind::two_lcs: {
            // The period-tau/2 terms take the same value at both ends, so only
            // A1 enters C1.
            const double a1 = free_[0], b1 = free_[1], a2 = free_[2], b2 = free_[3];
            coef_ = {u_initial - a1 - a2, a1, b1, a2, b2, du + 2.0 * a1};
            break;
        }
    }
}

Ramp Ramp::linear(double u_initial, double u_final, double duration) {
    return Ramp(RampKind::linear, u_initial, u_final, duration);
}

double Ramp::value_unchecked(double t) const noexcept {
    const double s = t / tau_;
    switch (kind_) {
        case RampKind::linear:
        case RampKind::cubic:
        case RampKind::quintic: {
            double acc = coef_[5];
            for (int i = 4; i >= 0; --i) acc = acc * s + coef_[i];
            return acc;
        }
        case RampKind::lcs:
        case RampKind::two_lcs: {
            const double x = std::numbers::pi * s;
            return coef_[0] + coef_[1] * std::cos(x) + coef_[2] * std::sin(x) +
                   coef_[3] * std::cos(2.0 * x) + coef_[4] * std::sin(2.0 * x) + coef_[5] * s;
        }
    }
    return 0.0;
}

double Ramp::value(double t) const {
    const double slack = 1e-12 * tau_;
    if (t < -slack || t > tau_ + slack) {
        throw InvalidParameter("ramp evaluated at t = " + std::to_string(t) + " outside [0, " +
                               std::to_string(tau_) + "]");
    }
    // Exact endpoints regardless of rounding in the trigonometric terms.
    if (t <= 0.0) return u_i_;
    if (t >= tau_) return u_f_;
    return value_unchecked(t);
}

double Ramp::min_value(int samples) const {
    if (samples < 2) throw InvalidParameter("need at least two samples");
    double best = std::min(u_i_, u_f_);
    for (int i = 1; i + 1 < samples; ++i) {
        best = std::min(best, value_unchecked(tau_ * i / (samples - 1)));
    }
    return best;
}

bool Ramp::satisfies_reality_bound(int n_particles, double tunneling, int samples) const {
    return min_value(samples) >= reality_bound(n_particles, tunneling) - 1e-12 * tunneling;
}

double ramp_value(const Ramp& ramp, double t) { return ramp.value(t); }

}  // namespace bjj
