#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mis/constitutive.hpp"
#include "mis/state.hpp"

namespace mis {

/// Prescribed expansion scalar theta(tau) = div u along one flow line.
struct FlowlineForcing {
    std::function<double(double)> theta;

    static FlowlineForcing constant(double value);
    /// theta = mean + amplitude * sin(omega * tau + phase)
    static FlowlineForcing sinusoid(double mean, double amplitude, double omega, double phase);
};

struct FlowlineSample {
    double tau = 0.0;
    double rho = 0.0;
    double n = 0.0;
    double Pi = 0.0;
    double e = 0.0;  // rho + p + Pi
};

enum class FlowlineStatus { completed, n_floor_reached, stiff_failure };

struct FlowlinePath {
    std::vector<FlowlineSample> samples;  // one per accepted step, starting with tau = 0
    FlowlineStatus status = FlowlineStatus::completed;
    double last_good_tau = 0.0;
    long steps = 0;
};

struct FlowlineOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double n_floor_rel = 1e-12;  // floor relative to n_ref
    double n_ref = 0.0;          // 0 uses n(0)
};

/// Integrates n' = -n theta, rho' = (rho + p + Pi) n'/n,
/// Pi' = zeta n' / (tau0 n) - (1 + lambda Pi) Pi / tau0 along a flow line.
FlowlinePath integrate_flowline(const FluidState& start, const ConstitutiveSet& set, const FlowlineForcing& forcing,
                                double tau_max, const FlowlineOptions& opts = {});

struct WecCheck {
    bool holds = true;
    double min_e = 0.0;
};

WecCheck wec_propagation_check(const FlowlinePath& path, double tol = 1e-10);

/// Number of leading samples that stay in the physical set; the path is only
/// an admissible solution up to there.
std::size_t admissible_length(const FlowlinePath& path, const ConstitutiveSet& set, double delta = 0.0);

/// |Pi0| + 3 abar
double pi_bound(double Pi0, double abar);

// ---------------------------------------------------------------------------
// Transport solution F with n dF/dn + (rho + p + Pi) dF/drho + (zeta/tau0) dF/dPi = zeta/tau0
// ---------------------------------------------------------------------------

/// Initial profile on the anchor slice n = n0: F0(rho, Pi) = -eps tanh(Pi).
double initial_F(double Pi, double eps);
double initial_F_dPi(double Pi, double eps);

struct CharacteristicAnchor {
    double rho0 = 1.0;
    double n0 = 1.0;
    double Pi0 = 0.0;
};

struct CharacteristicOptions {
    double rtol = 1e-12;
    double atol = 1e-14;
    double samples_per_unit_log_n = 100.0;
    double h_rel = 1e-4;  // neighbour offset h = h_rel * (1 + |x0|) for rho0 and Pi0
};

struct CharacteristicSample {
    double n = 0.0;
    double rho = 0.0;
    double Pi = 0.0;
    double F = 0.0;
    double dF_drho = 0.0;
    double dF_dPi = 0.0;
    double source = 0.0;  // (zeta/tau0) at the sample
};

struct CharacteristicResult {
    std::vector<CharacteristicSample> samples;  // ascending in n, uniform in log n
    double log_n_step = 0.0;
    bool escaped = false;  // integration stopped before covering the requested range
    std::string message;
};

/// Integrates the characteristic through the anchor across n_range (in log n)
/// together with four neighbouring characteristics (rho0 +- h, Pi0 +- h); the
/// gradient (dF/drho, dF/dPi) follows from the 2x2 Jacobian of the neighbours.
CharacteristicResult solve_F_characteristic(const ConstitutiveSet& set, const CharacteristicAnchor& anchor, double eps,
                                            double n_lo, double n_hi, const CharacteristicOptions& opts = {});

/// max |dF/d(log n) - zeta/tau0| over interior samples, using a five-point
/// centred difference of the sampled F.
double characteristic_residual(const CharacteristicResult& result);

struct FValue {
    double F = 0.0;
    double dF_dPi = 0.0;
    bool ok = false;
};

/// F at an arbitrary point, by tracing its characteristic back to n = n0.
FValue evaluate_F(const ConstitutiveSet& set, double rho, double n, double Pi, double n0, double eps,
                  const CharacteristicOptions& opts = {});

}  // namespace mis
