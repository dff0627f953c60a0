#include "mis/constitutive.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "mis/quadrature.hpp"

namespace mis {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double fd_step(double x) { return 1e-6 * std::max(1.0, std::abs(x)); }

// Smooth rho weight of PowerExpZeta.
double rho_weight(const PowerExpZeta& z, double rho) {
    if (z.rho_scale <= 0.0) return 1.0;
    return 0.5 * (1.0 + std::tanh(rho / z.rho_scale));
}

double n_factor(const PowerExpZeta& z, double n) {
    double f = z.power == 0.0 ? 1.0 : std::pow(n, z.power);
    if (z.n_scale > 0.0) f *= std::exp(-n / z.n_scale);
    return f;
}

}  // namespace

double ConstitutiveSet::pressure(double rho, double n) const {
    return std::visit(overloaded{
                          [&](const IdealGasEos& e) { return (e.gamma - 1.0) * (rho - e.mass * n); },
                          [&](const LinearEos& e) { return e.w * rho; },
                          [&](const ConstantEos& e) { return e.value; },
                          [&](const TabulatedEos& e) { return e.p_of_rho(rho); },
                      },
                      eos);
}

double ConstitutiveSet::dp_drho(double rho, double) const {
    return std::visit(overloaded{
                          [&](const IdealGasEos& e) { return e.gamma - 1.0; },
                          [&](const LinearEos& e) { return e.w; },
                          [&](const ConstantEos&) { return 0.0; },
                          [&](const TabulatedEos& e) { return e.p_of_rho.derivative(rho); },
                      },
                      eos);
}

double ConstitutiveSet::dp_dn(double, double) const {
    return std::visit(overloaded{
                          [&](const IdealGasEos& e) { return -(e.gamma - 1.0) * e.mass; },
                          [&](const auto&) { return 0.0; },
                      },
                      eos);
}

double ConstitutiveSet::zeta(double rho, double n) const {
    return std::visit(overloaded{
                          [&](const ConstantZeta& z) { return z.value; },
                          [&](const PowerExpZeta& z) { return z.zeta0 * n_factor(z, n) * rho_weight(z, rho); },
                          [&](const TabulatedZeta& z) { return z.zeta_of_n(n); },
                      },
                      zeta_model);
}

double ConstitutiveSet::tau0(double, double n) const {
    return std::visit(overloaded{
                          [&](const ConstantTau0& t) { return t.value; },
                          [&](const PowerLawTau0& t) { return t.power == 0.0 ? t.tau0 : t.tau0 * std::pow(n, t.power); },
                          [&](const TabulatedTau0& t) { return t.tau0_of_n(n); },
                      },
                      tau0_model);
}

double ConstitutiveSet::lambda(double, double) const {
    return std::get<ConstantLambda>(lambda_model).value;
}

double ConstitutiveSet::d_rho_zeta_over_tau0(double rho, double n) const {
    if (!transport_depends_on_rho()) return 0.0;
    const double h = fd_step(rho);
    return (zeta_over_tau0(rho + h, n) - zeta_over_tau0(rho - h, n)) / (2.0 * h);
}

double ConstitutiveSet::d_n_zeta_over_tau0(double rho, double n) const {
    const double h = std::min(fd_step(n), 0.5 * n);
    return (zeta_over_tau0(rho, n + h) - zeta_over_tau0(rho, n - h)) / (2.0 * h);
}

bool ConstitutiveSet::is_barotropic() const {
    const bool eos_ok = std::visit(overloaded{
                                       [](const IdealGasEos& e) { return e.mass == 0.0; },
                                       [](const auto&) { return true; },
                                   },
                                   eos);
    const bool zeta_ok = std::visit(overloaded{
                                        [](const ConstantZeta&) { return true; },
                                        [](const PowerExpZeta& z) { return z.power == 0.0 && z.n_scale == 0.0; },
                                        [](const TabulatedZeta&) { return false; },
                                    },
                                    zeta_model);
    const bool tau_ok = std::visit(overloaded{
                                       [](const ConstantTau0&) { return true; },
                                       [](const PowerLawTau0& t) { return t.power == 0.0; },
                                       [](const TabulatedTau0&) { return false; },
                                   },
                                   tau0_model);
    return eos_ok && (zeta_ok || zeta_vanishes()) && tau_ok;
}

bool ConstitutiveSet::transport_depends_on_rho() const {
    if (const auto* z = std::get_if<PowerExpZeta>(&zeta_model)) return z->rho_scale > 0.0;
    return false;
}

bool ConstitutiveSet::zeta_vanishes() const {
    return std::visit(overloaded{
                          [](const ConstantZeta& z) { return z.value == 0.0; },
                          [](const PowerExpZeta& z) { return z.zeta0 == 0.0; },
                          [](const TabulatedZeta& z) {
                              return std::all_of(z.zeta_of_n.ys().begin(), z.zeta_of_n.ys().end(),
                                                 [](double v) { return v == 0.0; });
                          },
                      },
                      zeta_model);
}

bool ConstitutiveSet::lambda_vanishes() const { return std::get<ConstantLambda>(lambda_model).value == 0.0; }

std::string ConstitutiveSet::describe() const {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const IdealGasEos& e) { os << "ideal_gas(gamma=" << e.gamma << ", mass=" << e.mass << ")"; },
                   [&](const LinearEos& e) { os << "linear(w=" << e.w << ")"; },
                   [&](const ConstantEos& e) { os << "constant(p=" << e.value << ")"; },
                   [&](const TabulatedEos& e) { os << "table(" << e.source << ")"; },
               },
               eos);
    os << "; zeta=";
    std::visit(overloaded{
                   [&](const ConstantZeta& z) { os << "constant(" << z.value << ")"; },
                   [&](const PowerExpZeta& z) {
                       os << "power_exp(zeta0=" << z.zeta0 << ", power=" << z.power << ", n_scale=" << z.n_scale
                          << ", rho_scale=" << z.rho_scale << ")";
                   },
                   [&](const TabulatedZeta& z) { os << "table(" << z.source << ")"; },
               },
               zeta_model);
    os << "; tau0=";
    std::visit(overloaded{
                   [&](const ConstantTau0& t) { os << "constant(" << t.value << ")"; },
                   [&](const PowerLawTau0& t) { os << "power_law(tau0=" << t.tau0 << ", power=" << t.power << ")"; },
                   [&](const TabulatedTau0& t) { os << "table(" << t.source << ")"; },
               },
               tau0_model);
    os << "; lambda=" << std::get<ConstantLambda>(lambda_model).value;
    return os.str();
}

// ---------------------------------------------------------------------------

std::optional<double> sound_speed_sq(const ConstitutiveSet& set, double rho, double n, double Pi) {
    const double p = set.pressure(rho, n);
    const double e = rho + p + Pi;
    if (e == 0.0) return std::nullopt;
    return set.zeta(rho, n) / (set.tau0(rho, n) * e) + set.dp_drho(rho, n) + n * set.dp_dn(rho, n) / e;
}

std::optional<double> euler_sound_speed_sq(const ConstitutiveSet& set, double rho, double n) {
    const double e = rho + set.pressure(rho, n);
    if (e == 0.0) return std::nullopt;
    return set.dp_drho(rho, n) + n * set.dp_dn(rho, n) / e;
}

double physical_slack(const ConstitutiveSet& set, double rho, double n, double Pi) {
    const auto cs2 = sound_speed_sq(set, rho, n, Pi);
    if (!cs2 || !std::isfinite(*cs2)) return -std::numeric_limits<double>::infinity();
    return std::min({rho, n, *cs2, 1.0 - *cs2});
}

// ---------------------------------------------------------------------------

bool ValidationReport::passed() const {
    return std::all_of(tallies.begin(), tallies.end(), [](const CheckTally& t) { return t.failed == 0; });
}

bool ValidationReport::violates(const std::string& assumption) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.assumption == assumption; });
}

namespace {

constexpr std::size_t kMaxRecordedPerCheck = 8;

enum Check : int {
    kA1Lower,
    kA1Upper,
    kA1Floor,
    kA2DrhoNonzero,
    kA2DnNonzero,
    kA2Lipschitz,
    kA3Tau0Floor,
    kA3ZetaNonneg,
    kA3Monotone,
    kA3Gradient,
    kA5Positive,
    kA5Bound,
    kCheckCount
};

const char* check_name(int c) {
    switch (c) {
        case kA1Lower: return "A1: p >= -rho";
        case kA1Upper: return "A1: p <= rho + p1";
        case kA1Floor: return "A1: p > -p0";
        case kA2DrhoNonzero: return "A2: dp/drho != 0";
        case kA2DnNonzero: return "A2: dp/dn != 0";
        case kA2Lipschitz: return "A2: |grad p| <= lipschitz_bound";
        case kA3Tau0Floor: return "A3: tau0 >= floor";
        case kA3ZetaNonneg: return "A3: zeta >= 0";
        case kA3Monotone: return "A3: d(zeta/tau0)/drho >= 0";
        case kA3Gradient: return "A3: |grad(zeta/tau0)| <= bound";
        case kA5Positive: return "A5: lambda > 0 or lambda == 0";
        case kA5Bound: return "A5: p + rho < 1/lambda";
        default: return "?";
    }
}

const char* check_assumption(int c) {
    if (c <= kA1Floor) return "A1";
    if (c <= kA2Lipschitz) return "A2";
    if (c <= kA3Gradient) return "A3";
    return "A5";
}

struct RowResult {
    std::array<long, kCheckCount> checked{};
    std::array<long, kCheckCount> failed{};
    std::array<std::vector<Violation>, kCheckCount> recorded;
    long physical = 0;

    void test(int c, bool ok, double rho, double n, double Pi, double value) {
        ++checked[c];
        if (ok) return;
        ++failed[c];
        if (recorded[c].size() < kMaxRecordedPerCheck) {
            recorded[c].push_back({check_assumption(c), check_name(c), rho, n, Pi, value});
        }
    }
};

}  // namespace

ValidationReport validate_assumptions(const ConstitutiveSet& set, const SampleSpec& spec) {
    ValidationReport report;
    report.spec = spec;

    const int nr = std::max(spec.rho_count, 2);
    const int nn = std::max(spec.n_count, 2);
    const double log_nmin = std::log(spec.n_min);
    const double log_nmax = std::log(spec.n_max);
    const double lam = set.lambda(0.0, 1.0);

    // Rows over the extended rho range (R x R+) for A2/A3, physical rows for A1/A2/A5.
    const double ext_lo = std::min(spec.extension_rho_min, spec.rho_min);
    std::vector<double> rhos;
    for (int i = 0; i < nr; ++i) rhos.push_back(ext_lo + (spec.rho_max - ext_lo) * i / (nr - 1));
    for (int i = 0; i < nr; ++i) rhos.push_back(spec.rho_min + (spec.rho_max - spec.rho_min) * i / (nr - 1));
    std::sort(rhos.begin(), rhos.end());
    rhos.erase(std::unique(rhos.begin(), rhos.end()), rhos.end());

    std::vector<RowResult> rows(rhos.size());

#pragma omp parallel for schedule(dynamic)
    for (std::size_t ir = 0; ir < rhos.size(); ++ir) {
        RowResult& row = rows[ir];
        const double rho = rhos[ir];
        for (int j = 0; j < nn; ++j) {
            const double n = std::exp(log_nmin + (log_nmax - log_nmin) * j / (nn - 1));

            const double dpr = set.dp_drho(rho, n);
            const double dpn = set.dp_dn(rho, n);
            row.test(kA2Lipschitz, std::abs(dpr) + std::abs(dpn) <= spec.lipschitz_bound, rho, n, 0.0,
                     std::abs(dpr) + std::abs(dpn));

            const double t0 = set.tau0(rho, n);
            const double z = set.zeta(rho, n);
            row.test(kA3Tau0Floor, t0 >= spec.tau0_floor, rho, n, 0.0, t0);
            row.test(kA3ZetaNonneg, z >= 0.0, rho, n, 0.0, z);
            const double dr = set.d_rho_zeta_over_tau0(rho, n);
            const double dn = set.d_n_zeta_over_tau0(rho, n);
            const double fd_noise = 1e-8 * (1.0 + std::abs(z / t0));
            row.test(kA3Monotone, dr >= -fd_noise, rho, n, 0.0, dr);
            row.test(kA3Gradient, std::abs(dr) + std::abs(dn) <= spec.transport_gradient_bound, rho, n, 0.0,
                     std::abs(dr) + std::abs(dn));

            if (rho < spec.rho_min || rho <= 0.0) continue;
            for (double Pi : spec.pi_values) {
                if (physical_slack(set, rho, n, Pi) <= spec.delta) continue;
                ++row.physical;
                const double p = set.pressure(rho, n);
                row.test(kA1Lower, p >= -rho, rho, n, Pi, p);
                row.test(kA1Upper, p <= rho + set.p1, rho, n, Pi, p);
                row.test(kA1Floor, p > -set.p0, rho, n, Pi, p);
                row.test(kA2DrhoNonzero, dpr != 0.0, rho, n, Pi, dpr);
                row.test(kA2DnNonzero, dpn != 0.0, rho, n, Pi, dpn);
                if (!set.lambda_vanishes()) {
                    row.test(kA5Positive, lam > 0.0, rho, n, Pi, lam);
                    row.test(kA5Bound, lam > 0.0 && p + rho < 1.0 / lam, rho, n, Pi, p + rho);
                }
            }
        }
    }

    // Deterministic reduction in row order.
    std::array<long, kCheckCount> checked{};
    std::array<long, kCheckCount> failed{};
    std::array<std::size_t, kCheckCount> kept{};
    for (const auto& row : rows) {
        report.physical_samples += row.physical;
        for (int c = 0; c < kCheckCount; ++c) {
            checked[c] += row.checked[c];
            failed[c] += row.failed[c];
            for (const auto& v : row.recorded[c]) {
                if (kept[c] < kMaxRecordedPerCheck) {
                    report.violations.push_back(v);
                    ++kept[c];
                }
            }
        }
    }
    for (int c = 0; c < kCheckCount; ++c) {
        if (checked[c] == 0) continue;
        report.tallies.push_back({check_name(c), checked[c], failed[c]});
    }
    return report;
}

// ---------------------------------------------------------------------------

AbarOptions AbarOptions::around(double rho_bar) {
    AbarOptions o;
    o.rho_min = -10.0 * std::abs(rho_bar);
    o.rho_max = 10.0 * std::abs(rho_bar);
    return o;
}

double sup_abs_zeta_over_tau0(const ConstitutiveSet& set, double n, double rho_min, double rho_max, int samples) {
    if (!set.transport_depends_on_rho()) return std::abs(set.zeta_over_tau0(0.5 * (rho_min + rho_max), n));

    samples = std::max(samples, 3);
    const double step = (rho_max - rho_min) / (samples - 1);
    double best = -1.0;
    int best_i = 0;
    for (int i = 0; i < samples; ++i) {
        const double v = std::abs(set.zeta_over_tau0(rho_min + step * i, n));
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    // Golden-section refinement on the bracketing cells.
    double a = rho_min + step * std::max(best_i - 1, 0);
    double b = rho_min + step * std::min(best_i + 1, samples - 1);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = std::abs(set.zeta_over_tau0(x1, n)), f2 = std::abs(set.zeta_over_tau0(x2, n));
    for (int it = 0; it < 40; ++it) {
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = std::abs(set.zeta_over_tau0(x1, n));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = std::abs(set.zeta_over_tau0(x2, n));
        }
    }
    return std::max({best, f1, f2});
}

AbarResult abar_bound(const ConstitutiveSet& set, const AbarOptions& opts) {
    AbarResult res;
    res.rho_min = opts.rho_min;
    res.rho_max = opts.rho_max;

    const Integrand g = [&](double s) {
        return sup_abs_zeta_over_tau0(set, std::exp(s), opts.rho_min, opts.rho_max, opts.rho_samples);
    };
    QuadratureOptions q;
    q.abs_tol = opts.abs_tol;
    q.max_intervals = 4000;

    double S = opts.window0;
    auto core = integrate(g, -S, S, q);
    double total = core.value;
    double err = core.error;
    bool ok = core.converged && core.finite;

    // Grow the window until the newly added shells contribute below tolerance.
    while (ok) {
        if (2.0 * S > opts.window_max) {
            ok = false;
            break;
        }
        const auto lo = integrate(g, -2.0 * S, -S, q);
        const auto hi = integrate(g, S, 2.0 * S, q);
        if (!(lo.converged && hi.converged && lo.finite && hi.finite)) {
            ok = false;
            break;
        }
        const double shell = lo.value + hi.value;
        total += shell;
        err += lo.error + hi.error;
        S *= 2.0;
        if (std::abs(shell) <= opts.abs_tol) {
            // Tail beyond the window bounded by the last shell contribution.
            err += std::abs(shell);
            break;
        }
    }

    res.integral = total;
    res.error = err;
    res.log_n_window = S;
    res.converged = ok;
    res.value = ok ? opts.safety_factor * (total + err) : std::numeric_limits<double>::infinity();
    return res;
}

}  // namespace mis
