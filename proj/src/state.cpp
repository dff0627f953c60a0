#include "mis/state.hpp"

#include <limits>

namespace mis {

double ConstantState::sound_speed(const ConstitutiveSet& set) const {
    const auto cs2 = sound_speed_sq(set, rho_bar, n_bar, 0.0);
    if (!cs2 || *cs2 < 0.0) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(*cs2);
}

PhysicalCheck is_physical(const FluidState& s, const ConstitutiveSet& set, double delta) {
    PhysicalCheck out;
    const auto cs2 = sound_speed_sq(set, s.rho, s.n, s.Pi);
    out.cs2 = cs2 ? *cs2 : std::numeric_limits<double>::quiet_NaN();
    out.min_slack = physical_slack(set, s.rho, s.n, s.Pi);
    out.physical = out.min_slack > delta;
    return out;
}

double wec_value(const FluidState& s, const ConstitutiveSet& set) { return s.rho + set.pressure(s.rho, s.n) + s.Pi; }

double StressEnergy::contract(const std::array<double, 4>& v) const {
    double sum = T00 * v[0] * v[0];
    for (int k = 0; k < 3; ++k) sum += 2.0 * T0k[k] * v[0] * v[k + 1];
    for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) sum += Tjk[j][k] * v[j + 1] * v[k + 1];
    }
    return sum;
}

StressEnergy stress_energy(const FluidState& s, const ConstitutiveSet& set) {
    const double q = set.pressure(s.rho, s.n) + s.Pi;
    const double e = s.rho + q;
    const double u0 = s.u0();

    StressEnergy t;
    t.T00 = e * u0 * u0 - q;
    for (int k = 0; k < 3; ++k) t.T0k[k] = e * u0 * s.u[k];
    for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) t.Tjk[j][k] = e * s.u[j] * s.u[k] + (j == k ? q : 0.0);
    }
    return t;
}

}  // namespace mis
