#pragma once

#include <array>
#include <cmath>

#include "mis/constitutive.hpp"

namespace mis {

/// Pointwise fluid state. Only the spatial velocity is stored; u^0 is derived
/// from the normalization u_a u^a = -1 with the Minkowski metric.
struct FluidState {
    double rho = 0.0;
    double n = 0.0;
    double Pi = 0.0;
    std::array<double, 3> u{0.0, 0.0, 0.0};

    double u_sq() const { return u[0] * u[0] + u[1] * u[1] + u[2] * u[2]; }
    double u0() const { return std::sqrt(1.0 + u_sq()); }
    /// g_ab u^a u^b with g = diag(-1, 1, 1, 1); -1 up to rounding.
    double normalization() const {
        const double u0v = u0();
        return -u0v * u0v + u_sq();
    }
};

/// Equilibrium background (rho_bar, n_bar) at rest with vanishing bulk pressure.
struct ConstantState {
    double rho_bar = 1.0;
    double n_bar = 1.0;

    FluidState state() const { return {rho_bar, n_bar, 0.0, {0.0, 0.0, 0.0}}; }
    double pressure(const ConstitutiveSet& set) const { return set.pressure(rho_bar, n_bar); }
    /// c = c_s(rho_bar, n_bar, 0); NaN when undefined or negative.
    double sound_speed(const ConstitutiveSet& set) const;
};

struct PhysicalCheck {
    bool physical = false;
    double min_slack = 0.0;  // min{rho, n, c_s^2, 1 - c_s^2}
    double cs2 = 0.0;        // NaN when rho + p + Pi == 0
};

/// Membership in the physical set: rho > 0, n > 0, 0 < c_s^2 < 1, each with
/// absolute margin delta.
PhysicalCheck is_physical(const FluidState& s, const ConstitutiveSet& set, double delta = 1e-10);

/// e = rho + p + Pi; the weak energy condition holds iff e >= 0.
double wec_value(const FluidState& s, const ConstitutiveSet& set);

struct StressEnergy {
    double T00 = 0.0;
    std::array<double, 3> T0k{};
    std::array<std::array<double, 3>, 3> Tjk{};

    /// T^{ab} v_a v_b for a covector v = (v0, v1, v2, v3).
    double contract(const std::array<double, 4>& v) const;
};

/// T^{ab} = rho u^a u^b + (p + Pi)(g^{ab} + u^a u^b) in Minkowski space.
StressEnergy stress_energy(const FluidState& s, const ConstitutiveSet& set);

}  // namespace mis
