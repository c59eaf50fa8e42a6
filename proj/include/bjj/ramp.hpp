// ramp.hpp - time dependence U(t) of the interaction during a finite-time quench
//
// Every ansatz satisfies U(0) = U_i and U(tau) = U_f through its dependent
// coefficients; only the free parameters are stored.
//
//   linear   U_i + (U_f - U_i) s                                     s = t/tau
//   lcs      A0 + A1 cos(pi s) + B1 sin(pi s) + C1 s                 free: A1 B1
//   two_lcs  lcs + A2 cos(2 pi s) + B2 sin(2 pi s)                   free: A1 B1 A2 B2
//   cubic    A0 + A1 s + A2 s^2 + A3 s^3                             free: A2 A3
//   quintic  A0 + A1 s + ... + A5 s^5                                free: A2 A3 A4 A5

#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bjj {

enum class RampKind { linear, lcs, two_lcs, cubic, quintic };

std::string_view to_string(RampKind kind);
RampKind parse_ramp_kind(std::string_view name);
int free_parameter_count(RampKind kind);
// Names of the free parameters, e.g. {"A1", "B1"} for lcs.
std::vector<std::string> free_parameter_names(RampKind kind);

class Ramp {
public:
    Ramp(RampKind kind, double u_initial, double u_final, double duration,
         std::span<const double> free_params = {});

    static Ramp linear(double u_initial, double u_final, double duration);
    static Ramp constant(double u, double duration) { return linear(u, u, duration); }

    RampKind kind() const noexcept { return kind_; }
    double u_initial() const noexcept { return u_i_; }
    double u_final() const noexcept { return u_f_; }
    double duration() const noexcept { return tau_; }
    const std::vector<double>& free_params() const noexcept { return free_; }

    // U(t) for t in [0, tau]; throws InvalidParameter outside that interval.
    double value(double t) const;
    // Same formula without the range check.
    double value_unchecked(double t) const noexcept;

    // Minimum of U(t) over `samples` equally spaced points including both ends.
    double min_value(int samples = kRealityGridPoints) const;
    // U(t) >= -2J/N on the sampling grid.
    bool satisfies_reality_bound(int n_particles, double tunneling,
                                 int samples = kRealityGridPoints) const;

    static constexpr int kRealityGridPoints = 10000;

private:
    RampKind kind_;
    double u_i_;
    double u_f_;
    double tau_;
    std::vector<double> free_;
    // Polynomial coefficients A0..A5 or trigonometric A0, A1, B1, A2, B2, C1.
    std::array<double, 6> coef_{};
};

double ramp_value(const Ramp& ramp, double t);

}  // namespace bjj
