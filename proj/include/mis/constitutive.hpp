#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mis/interp.hpp"

namespace mis {

// ---------------------------------------------------------------------------
// Equation-of-state families p(rho, n)
// ---------------------------------------------------------------------------

/// p = (gamma - 1)(rho - mass * n)
struct IdealGasEos {
    double gamma = 5.0 / 3.0;
    double mass = 1.0;
};

/// p = w * rho (w = 1/3 is the conformal fluid)
struct LinearEos {
    double w = 1.0 / 3.0;
};

struct ConstantEos {
    double value = 0.0;
};

/// Barotropic p(rho) from a two-column table.
struct TabulatedEos {
    MonotoneCubic p_of_rho;
    std::string source;
};

using EosModel = std::variant<IdealGasEos, LinearEos, ConstantEos, TabulatedEos>;

// ---------------------------------------------------------------------------
// Transport families
// ---------------------------------------------------------------------------

struct ConstantZeta {
    double value = 0.0;
};

/// zeta = zeta0 * n^power * exp(-n / n_scale) * g(rho), where the exponential
/// is dropped for n_scale == 0 and g = (1 + tanh(rho / rho_scale)) / 2 for
/// rho_scale > 0, g = 1 otherwise.
struct PowerExpZeta {
    double zeta0 = 1.0;
    double power = 0.0;
    double n_scale = 0.0;
    double rho_scale = 0.0;
};

/// zeta(n) from the second column of an (n, zeta, tau0) table.
struct TabulatedZeta {
    MonotoneCubic zeta_of_n;
    std::string source;
};

using ZetaModel = std::variant<ConstantZeta, PowerExpZeta, TabulatedZeta>;

struct ConstantTau0 {
    double value = 1.0;
};

/// tau0 = tau0 * n^power
struct PowerLawTau0 {
    double tau0 = 1.0;
    double power = 0.0;
};

struct TabulatedTau0 {
    MonotoneCubic tau0_of_n;
    std::string source;
};

using Tau0Model = std::variant<ConstantTau0, PowerLawTau0, TabulatedTau0>;

/// lambda is either identically zero or a positive constant.
struct ConstantLambda {
    double value = 0.0;
};

using LambdaModel = std::variant<ConstantLambda>;

// ---------------------------------------------------------------------------

/// The constitutive closure: p, zeta, tau0, lambda and the pressure bounds
/// p0, p1 with -rho <= p <= rho + p1 and p > -p0 on physical states.
struct ConstitutiveSet {
    EosModel eos = IdealGasEos{};
    ZetaModel zeta_model = ConstantZeta{0.0};
    Tau0Model tau0_model = ConstantTau0{1.0};
    LambdaModel lambda_model = ConstantLambda{0.0};
    double p0 = 0.0;
    double p1 = 0.0;

    double pressure(double rho, double n) const;
    double dp_drho(double rho, double n) const;
    double dp_dn(double rho, double n) const;

    double zeta(double rho, double n) const;
    double tau0(double rho, double n) const;
    double lambda(double rho, double n) const;

    double zeta_over_tau0(double rho, double n) const { return zeta(rho, n) / tau0(rho, n); }
    /// Central differences with h = 1e-6 * max(1, |x|).
    double d_rho_zeta_over_tau0(double rho, double n) const;
    double d_n_zeta_over_tau0(double rho, double n) const;

    /// True when p, zeta and tau0 carry no n-dependence.
    bool is_barotropic() const;
    bool transport_depends_on_rho() const;
    bool zeta_vanishes() const;
    bool lambda_vanishes() const;

    std::string describe() const;
};

// ---------------------------------------------------------------------------
// Sound speeds
// ---------------------------------------------------------------------------

/// c_s^2 = zeta / (tau0 e) + dp/drho + n dp/dn / e with e = rho + p + Pi.
/// Empty when e == 0.
std::optional<double> sound_speed_sq(const ConstitutiveSet& set, double rho, double n, double Pi);

/// dp/drho + n dp/dn / (rho + p). Empty when rho + p == 0.
std::optional<double> euler_sound_speed_sq(const ConstitutiveSet& set, double rho, double n);

/// Minimum of {rho, n, c_s^2, 1 - c_s^2}; -inf when c_s^2 is undefined.
double physical_slack(const ConstitutiveSet& set, double rho, double n, double Pi);

// ---------------------------------------------------------------------------
// Assumption checks
// ---------------------------------------------------------------------------

struct SampleSpec {
    double rho_min = 1e-3;
    double rho_max = 10.0;
    double n_min = 1e-6;
    double n_max = 10.0;
    int rho_count = 41;
    int n_count = 41;                      // log-spaced in n
    std::vector<double> pi_values = {0.0};  // bulk pressures used for the physical-state checks
    double extension_rho_min = -10.0;       // lower end of the rho range for checks over R x R+
    double tau0_floor = 1e-3;
    double lipschitz_bound = 1e3;
    double transport_gradient_bound = 1e3;
    double delta = 1e-10;                   // slack for strict inequalities
};

struct Violation {
    std::string assumption;  // "A1" ... "A5"
    std::string what;
    double rho = 0.0;
    double n = 0.0;
    double Pi = 0.0;
    double value = 0.0;
};

struct CheckTally {
    std::string name;
    long checked = 0;
    long failed = 0;
};

struct ValidationReport {
    SampleSpec spec;
    std::vector<Violation> violations;  // first few offending points of each check
    std::vector<CheckTally> tallies;
    long physical_samples = 0;

    bool passed() const;
    bool violates(const std::string& assumption) const;
};

ValidationReport validate_assumptions(const ConstitutiveSet& set, const SampleSpec& spec);

// ---------------------------------------------------------------------------
// Integrability constant
// ---------------------------------------------------------------------------

struct AbarOptions {
    double rho_min = -10.0;  // sup over rho is taken on [rho_min, rho_max]
    double rho_max = 10.0;
    int rho_samples = 201;
    double safety_factor = 1.0;
    double abs_tol = 1e-10;
    double window0 = 8.0;    // first log(n) half-window
    double window_max = 512.0;

    static AbarOptions around(double rho_bar);  // [-10 rho_bar, 10 rho_bar]
};

struct AbarResult {
    double value = 0.0;     // safety_factor * (integral + error)
    double integral = 0.0;
    double error = 0.0;
    double rho_min = 0.0;
    double rho_max = 0.0;
    double log_n_window = 0.0;
    bool converged = false;  // false signals divergence within the cutoff
};

/// Upper estimate of int_0^inf (1/n) sup_rho |zeta/tau0| dn, integrated in
/// s = log n over expanding windows [-S, S].
AbarResult abar_bound(const ConstitutiveSet& set, const AbarOptions& opts = {});

/// sup over the sampled rho range, with a golden-section refinement around the
/// best sample.
double sup_abs_zeta_over_tau0(const ConstitutiveSet& set, double n, double rho_min, double rho_max,
                              int samples);

}  // namespace mis
