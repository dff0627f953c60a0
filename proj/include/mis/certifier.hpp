#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mis/constitutive.hpp"
#include "mis/state.hpp"

namespace mis {

/// C-infinity step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t);

/// Radially symmetric shell data: velocity sigma * s(r) x/|x| supported in
/// [R0 - ell, R0], with s = 1 on [R0 - ell + w, R0 - w]. Inside the support the
/// density, number density and bulk pressure follow the same mask.
struct ShellData {
    double R0 = 1.0;
    double ell = 0.5;
    double sigma = 1.0;
    double smooth_w = 0.05;  // 0 gives the sharp indicator
    ConstantState background;
    double rho_contrast = 1.0;  // rho = rho_bar (1 + (rho_contrast - 1) s)
    double n_contrast = 1.0;
    double Pi_shell = 0.0;      // Pi = Pi_shell * s
    double perturbation = 0.0;  // sup-norm size of a smooth bump added to s on (0, R0)

    /// Empty when the geometry is admissible, otherwise the reason.
    std::optional<std::string> invalid_reason() const;

    double mask(double r) const;   // s(r) without the perturbation
    double shape(double r) const;  // s(r) + perturbation * bump(r)
    double radial_velocity(double r) const { return sigma * shape(r); }
    FluidState state_at(double r) const;  // velocity along the first axis
    double pi_sup() const;

    /// Points where the profile changes smoothness, ascending, within [0, R0].
    std::vector<double> breakpoints() const;
};

struct IntegralValue {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
};

double ratio_threshold(double c);  // (c + 1)^2 / (2 (c^2 + 1))

struct ShellRatio {
    double ratio = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    double error = 0.0;
    bool defined = false;  // false when the velocity profile vanishes
};

/// int r^3 s^2 e dr / (R0 int r^2 s^2 e dr) with e the rest-frame inertia.
ShellRatio shell_ratio(const ShellData& data, const ConstitutiveSet& set);

/// E = 4 pi int r^2 [e sigma^2 s^2 + rho - rho_bar] dr.
IntegralValue energy_E0(const ShellData& data, const ConstitutiveSet& set);
/// The same energy from 4 pi int r^2 (T00 - rho_bar) dr.
IntegralValue energy_from_stress(const ShellData& data, const ConstitutiveSet& set);
/// Q(0) = 4 pi int r^3 sigma s sqrt(1 + sigma^2 s^2) e dr.
IntegralValue q_initial(const ShellData& data, const ConstitutiveSet& set);
/// int e |u|^2 dx at t = 0.
IntegralValue kinetic_initial(const ShellData& data, const ConstitutiveSet& set);

struct BkConstants {
    double b = 0.0;
    double k = 0.0;
};

BkConstants constants_bk(const ConstitutiveSet& set, const ConstantState& background, double pi_sup, double abar);

struct MuResult {
    double mu = 0.0;
    double integral = 0.0;
    double error = 0.0;
    bool ok = false;
};

/// mu = exp(int_{threshold(c)}^1 dz / (1 - sqrt(1 - z^2) - c z)) * (1 + margin); needs 0 <= c < 1.
MuResult mu_for_c(double c, double margin = 0.05);

struct BlowupConditions {
    double A = 0.0;
    double B = 0.0;
    double discriminant = 0.0;  // A^2 + 2B - B^2
    std::optional<double> z0;
    bool cond1 = false;
    bool cond2 = false;
    double cond2_integral = 0.0;  // NaN when not evaluated
    double cond2_error = 0.0;
    double cond2_bound = 0.0;     // log(Rbar / R0)
};

/// z0 from (A, B): (A(1 - B) + sqrt(A^2 + 2B - B^2)) / (A^2 + 1), empty if complex.
std::optional<double> z0_from(double A, double B);
/// h(z) = 1 - sqrt(1 - z^2) - A z - B
double h_of_z(double z, double A, double B);

BlowupConditions blowup_conditions(double E, double b, double k, double c, double R0, double Rbar);
/// Same checks once A and B are known.
BlowupConditions conditions_from_AB(double A, double B, double R0, double Rbar);

struct CertifyOptions {
    double mu_margin = 0.05;
    double quad_tol = 1e-10;
    double delta = 1e-10;     // physical-set margin for the data check
    int admissibility_samples = 2001;
    AbarOptions abar;         // rho range is replaced by around(rho_bar) unless abar_range_set
    bool abar_range_set = false;
};

struct Certificate {
    // data
    double R0 = 0.0, ell = 0.0, sigma = 0.0, smooth_w = 0.0;
    double rho_bar = 0.0, n_bar = 0.0, p_bar = 0.0, p0 = 0.0, p1 = 0.0, Pi_sup = 0.0;
    // constants
    double E = 0.0, E_error = 0.0;
    double E_stress = 0.0, E_stress_error = 0.0;
    double Q0 = 0.0, Q0_error = 0.0;
    double T_kin0 = 0.0, T_kin0_error = 0.0;
    double Abar = 0.0, Abar_error = 0.0;
    double b = 0.0, k = 0.0, c = 0.0;
    double threshold = 0.0;
    double ratio = 0.0, ratio_error = 0.0;
    double mu = 0.0, mu_integral = 0.0, mu_error = 0.0, mu_margin = 0.0;
    double Rbar = 0.0;
    double A = 0.0, B = 0.0, discriminant = 0.0;
    double z0 = 0.0;  // NaN when complex or not computed
    double cond2_integral = 0.0, cond2_error = 0.0, cond2_bound = 0.0;
    double z_initial = 0.0;  // Q0 / (R0 (E + b R0^3))
    double sigma0 = 0.0;     // NaN unless searched
    double T_upper = 0.0;
    // flags
    bool ratio_ok = false, cond1 = false, cond2 = false, cond3 = false;
    bool preconditions = false;
    bool valid = false;
    std::vector<std::string> reasons;
};

/// Never throws for bad input; failures show up as reasons on an invalid certificate.
Certificate certify(const ShellData& data, const ConstitutiveSet& set, const CertifyOptions& opts = {});

std::string certificate_to_text(const Certificate& cert);
/// Throws std::runtime_error with a line number on malformed input.
Certificate certificate_from_text(const std::string& text);

struct CertificateCheck {
    bool consistent = true;
    std::vector<std::string> mismatches;
};

/// Recomputes every flag and derived constant from the stored base constants.
CertificateCheck verify_certificate(const Certificate& cert);

struct SweepPoint {
    double sigma = 0.0;
    bool valid = false;
};

struct Sigma0Search {
    bool found = false;
    double sigma0 = 0.0;
    Certificate certificate;            // at sigma0 when found
    std::vector<SweepPoint> sweep;      // doubling grid
    std::vector<SweepPoint> bisection;  // in evaluation order
    bool monotone_on_grid = true;       // certified sigma implies certified 2 sigma on the grid
    std::string message;
};

/// Doubling sweep over [lo, hi] followed by bisection to rel_tol between the
/// last uncertified and the first certified grid point.
Sigma0Search find_sigma0(const ShellData& data_template, const ConstitutiveSet& set, double lo, double hi,
                         const CertifyOptions& opts = {}, double rel_tol = 0.01);

}  // namespace mis
