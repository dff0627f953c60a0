#include "mis/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "mis/io.hpp"
#include "mis/quadrature.hpp"

namespace mis {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kFourPi = 4.0 * std::numbers::pi;

double bump_profile(double r, double R0) {
    // exp(1 - 1/(1 - x^2)) on x = 2r/R0 - 1 in (-1, 1); peak 1 at r = R0/2
    const double x = 2.0 * r / R0 - 1.0;
    if (std::abs(x) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - x * x));
}

IntegralValue radial_integral(const ShellData& data, const std::function<double(double)>& f, double tol) {
    const auto breaks = data.breakpoints();
    QuadratureOptions q;
    q.abs_tol = tol;
    q.rel_tol = 1e-13;
    const auto r = integrate_piecewise(f, breaks, q);
    return {r.value, r.error, r.converged && r.finite};
}

double inertia(const FluidState& s, const ConstitutiveSet& set) { return s.rho + set.pressure(s.rho, s.n) + s.Pi; }

}  // namespace

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

std::optional<std::string> ShellData::invalid_reason() const {
    if (!(R0 > 0.0)) return "R0 must be positive";
    if (!(ell > 0.0 && ell < R0)) return "ell must lie in (0, R0)";
    if (!(sigma >= 0.0)) return "sigma must be nonnegative";
    if (!(smooth_w >= 0.0)) return "smooth_w must be nonnegative";
    if (2.0 * smooth_w > ell) return "smooth_w must not exceed ell/2";
    if (!(background.rho_bar > 0.0 && background.n_bar > 0.0)) return "background densities must be positive";
    if (!(rho_contrast > 0.0 && n_contrast > 0.0)) return "density contrasts must be positive";
    if (!std::isfinite(Pi_shell) || !std::isfinite(perturbation)) return "shell profile values must be finite";
    return std::nullopt;
}

double ShellData::mask(double r) const {
    const double inner = R0 - ell;
    if (r < inner || r > R0) return 0.0;
    if (smooth_w == 0.0) return 1.0;
    return smooth_step((r - inner) / smooth_w) * smooth_step((R0 - r) / smooth_w);
}

double ShellData::shape(double r) const {
    const double s = mask(r);
    if (perturbation == 0.0) return s;
    return s + perturbation * bump_profile(r, R0);
}

FluidState ShellData::state_at(double r) const {
    const double s = mask(r);
    FluidState st;
    st.rho = background.rho_bar * (1.0 + (rho_contrast - 1.0) * s);
    st.n = background.n_bar * (1.0 + (n_contrast - 1.0) * s);
    st.Pi = Pi_shell * s;
    st.u = {radial_velocity(r), 0.0, 0.0};
    return st;
}

double ShellData::pi_sup() const { return std::abs(Pi_shell); }

std::vector<double> ShellData::breakpoints() const {
    std::vector<double> b{0.0, R0 - ell, R0};
    if (smooth_w > 0.0) {
        b.push_back(R0 - ell + smooth_w);
        b.push_back(R0 - smooth_w);
    }
    if (perturbation != 0.0) b.push_back(0.5 * R0);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

double ratio_threshold(double c) { return (c + 1.0) * (c + 1.0) / (2.0 * (c * c + 1.0)); }

ShellRatio shell_ratio(const ShellData& data, const ConstitutiveSet& set) {
    ShellRatio out;
    const double tol = 1e-12;
    auto weight = [&](double r) {
        const double s = data.shape(r);
        return s * s * inertia(data.state_at(r), set);
    };
    const auto num = radial_integral(data, [&](double r) { return r * r * r * weight(r); }, tol);
    const auto den = radial_integral(data, [&](double r) { return r * r * weight(r); }, tol);
    out.numerator = num.value;
    out.denominator = data.R0 * den.value;
    if (!(out.denominator > 0.0)) return out;
    out.defined = true;
    out.ratio = out.numerator / out.denominator;
    out.error = (num.error + std::abs(out.ratio) * data.R0 * den.error) / out.denominator;
    return out;
}

IntegralValue energy_E0(const ShellData& data, const ConstitutiveSet& set) {
    auto f = [&](double r) {
        const auto st = data.state_at(r);
        const double u = st.u[0];
        return kFourPi * r * r * (inertia(st, set) * u * u + st.rho - data.background.rho_bar);
    };
    return radial_integral(data, f, 1e-10);
}

IntegralValue energy_from_stress(const ShellData& data, const ConstitutiveSet& set) {
    auto f = [&](double r) {
        const auto st = data.state_at(r);
        return kFourPi * r * r * (stress_energy(st, set).T00 - data.background.rho_bar);
    };
    return radial_integral(data, f, 1e-10);
}

IntegralValue q_initial(const ShellData& data, const ConstitutiveSet& set) {
    auto f = [&](double r) {
        const auto st = data.state_at(r);
        return kFourPi * r * r * r * st.u[0] * st.u0() * inertia(st, set);
    };
    return radial_integral(data, f, 1e-10);
}

IntegralValue kinetic_initial(const ShellData& data, const ConstitutiveSet& set) {
    auto f = [&](double r) {
        const auto st = data.state_at(r);
        return kFourPi * r * r * inertia(st, set) * st.u_sq();
    };
    return radial_integral(data, f, 1e-10);
}

BkConstants constants_bk(const ConstitutiveSet& set, const ConstantState& background, double pi_sup, double abar) {
    const double v = 4.0 * std::numbers::pi / 3.0;
    const double p_bar = background.pressure(set);
    return {v * (background.rho_bar + set.p1 + pi_sup + 3.0 * abar), v * (pi_sup + 3.0 * abar + set.p0 + p_bar)};
}

MuResult mu_for_c(double c, double margin) {
    MuResult out;
    if (!(c >= 0.0 && c < 1.0) || !(margin > 0.0)) return out;
    const double lo = ratio_threshold(c);
    QuadratureOptions q;
    q.abs_tol = 1e-12;
    const auto r = integrate([c](double z) { return 1.0 / (1.0 - std::sqrt(1.0 - z * z) - c * z); }, lo, 1.0, q);
    out.integral = r.value;
    out.error = r.error;
    out.ok = r.converged && r.finite;
    out.mu = std::exp(r.value) * (1.0 + margin);
    return out;
}

std::optional<double> z0_from(double A, double B) {
    const double disc = A * A + 2.0 * B - B * B;
    if (!(disc >= 0.0)) return std::nullopt;
    return (A * (1.0 - B) + std::sqrt(disc)) / (A * A + 1.0);
}

double h_of_z(double z, double A, double B) { return 1.0 - std::sqrt(1.0 - z * z) - A * z - B; }

BlowupConditions conditions_from_AB(double A, double B, double R0, double Rbar) {
    BlowupConditions out;
    out.A = A;
    out.B = B;
    out.discriminant = A * A + 2.0 * B - B * B;
    out.z0 = z0_from(A, B);
    out.cond2_integral = kNaN;
    out.cond2_bound = std::log(Rbar / R0);
    out.cond1 = out.z0.has_value() && A + B < 1.0 && *out.z0 < 1.0;
    if (!out.cond1) return out;

    QuadratureOptions q;
    q.abs_tol = 1e-12;
    const auto r = integrate([A, B](double z) { return 1.0 / h_of_z(z, A, B); }, 0.5 * (1.0 + *out.z0), 1.0, q);
    out.cond2_integral = r.value;
    out.cond2_error = r.error;
    out.cond2 = r.converged && r.finite && r.value + r.error < out.cond2_bound;
    return out;
}

BlowupConditions blowup_conditions(double E, double b, double k, double c, double R0, double Rbar) {
    if (!(E > 0.0)) {
        BlowupConditions out;
        out.cond2_integral = kNaN;
        return out;
    }
    const double R3 = Rbar * Rbar * Rbar;
    const double denom = E + b * R3;
    return conditions_from_AB(c * (1.0 + 3.0 * b * R3 / denom), k * R3 / denom, R0, Rbar);
}

Certificate certify(const ShellData& data, const ConstitutiveSet& set, const CertifyOptions& opts) {
    Certificate cert;
    cert.R0 = data.R0;
    cert.ell = data.ell;
    cert.sigma = data.sigma;
    cert.smooth_w = data.smooth_w;
    cert.rho_bar = data.background.rho_bar;
    cert.n_bar = data.background.n_bar;
    cert.p0 = set.p0;
    cert.p1 = set.p1;
    cert.Pi_sup = data.pi_sup();
    cert.z0 = kNaN;
    cert.cond2_integral = kNaN;
    cert.sigma0 = kNaN;
    cert.mu_margin = opts.mu_margin;
    auto fail = [&](std::string why) { cert.reasons.push_back(std::move(why)); };

    if (auto why = data.invalid_reason()) {
        fail(*why);
        return cert;
    }
    cert.p_bar = data.background.pressure(set);
    cert.c = data.background.sound_speed(set);
    if (!(cert.c > 0.0 && cert.c < 1.0)) {
        fail("background sound speed c = " + format_double(cert.c) + " is not in (0, 1)");
        return cert;
    }

    const int m = std::max(opts.admissibility_samples, 2);
    for (int i = 0; i < m; ++i) {
        const double r = data.R0 * i / (m - 1);
        const auto st = data.state_at(r);
        const auto chk = is_physical(st, set, opts.delta);
        if (!chk.physical || !(inertia(st, set) > 0.0)) {
            fail("initial data leaves the physical set at r = " + format_double(r));
            return cert;
        }
    }

    AbarOptions ao = opts.abar;
    if (!opts.abar_range_set) {
        const auto around = AbarOptions::around(cert.rho_bar);
        ao.rho_min = around.rho_min;
        ao.rho_max = around.rho_max;
    }
    const auto abar = abar_bound(set, ao);
    if (!abar.converged) {
        fail("integrability constant diverges (zeta/tau0 not integrable in dn/n)");
        return cert;
    }
    cert.Abar = abar.value;
    cert.Abar_error = abar.error;

    const auto bk = constants_bk(set, data.background, cert.Pi_sup, cert.Abar);
    cert.b = bk.b;
    cert.k = bk.k;
    cert.threshold = ratio_threshold(cert.c);

    const auto mu = mu_for_c(cert.c, opts.mu_margin);
    if (!mu.ok) {
        fail("mu integral did not converge");
        return cert;
    }
    cert.mu = mu.mu;
    cert.mu_integral = mu.integral;
    cert.mu_error = mu.error;
    cert.Rbar = mu.mu * data.R0;
    cert.T_upper = (cert.Rbar - data.R0) / cert.c;

    const auto E = energy_E0(data, set);
    const auto Es = energy_from_stress(data, set);
    const auto Q = q_initial(data, set);
    const auto T = kinetic_initial(data, set);
    cert.E = E.value;
    cert.E_error = E.error;
    cert.E_stress = Es.value;
    cert.E_stress_error = Es.error;
    cert.Q0 = Q.value;
    cert.Q0_error = Q.error;
    cert.T_kin0 = T.value;
    cert.T_kin0_error = T.error;
    if (!E.converged || !Q.converged) fail("radial quadrature did not converge");

    const auto ratio = shell_ratio(data, set);
    cert.ratio = ratio.defined ? ratio.ratio : kNaN;
    cert.ratio_error = ratio.error;
    cert.ratio_ok = ratio.defined && ratio.ratio - ratio.error > cert.threshold;
    if (!ratio.defined) fail("velocity profile vanishes identically");
    else if (!cert.ratio_ok) fail("shell ratio " + format_double(ratio.ratio) + " does not exceed threshold " +
                                  format_double(cert.threshold));

    if (!(cert.E > 0.0)) {
        fail("energy E = " + format_double(cert.E) + " is not positive");
    } else {
        cert.preconditions = E.converged && Q.converged;
        const auto bc = blowup_conditions(cert.E, cert.b, cert.k, cert.c, data.R0, cert.Rbar);
        cert.A = bc.A;
        cert.B = bc.B;
        cert.discriminant = bc.discriminant;
        if (bc.z0) cert.z0 = *bc.z0;
        cert.cond1 = bc.cond1;
        cert.cond2 = bc.cond2;
        cert.cond2_integral = bc.cond2_integral;
        cert.cond2_error = bc.cond2_error;
        cert.cond2_bound = bc.cond2_bound;
        if (!bc.cond1) fail("cond1 fails (A = " + format_double(bc.A) + ", B = " + format_double(bc.B) + ")");
        else if (!bc.cond2) fail("cond2 fails: integral " + format_double(bc.cond2_integral) + " >= log(Rbar/R0) " +
                                 format_double(bc.cond2_bound));
    }
    const double d = cert.E + cert.b * data.R0 * data.R0 * data.R0;
    cert.z_initial = d > 0.0 ? cert.Q0 / (data.R0 * d) : kNaN;
    cert.cond3 = std::isfinite(cert.z0) && cert.z_initial > 0.5 * (1.0 + cert.z0);
    if (!cert.cond3) fail("cond3 fails: Q0/(R0(E + b R0^3)) = " + format_double(cert.z_initial));

    cert.valid = cert.preconditions && cert.ratio_ok && cert.cond1 && cert.cond2 && cert.cond3;
    return cert;
}

// ---------------------------------------------------------------------------
// Certificate text form
// ---------------------------------------------------------------------------

namespace {

template <class Cert, class F>
void visit_numbers(Cert& c, F&& f) {
    f("R0", c.R0);
    f("ell", c.ell);
    f("sigma", c.sigma);
    f("smooth_w", c.smooth_w);
    f("rho_bar", c.rho_bar);
    f("n_bar", c.n_bar);
    f("p_bar", c.p_bar);
    f("p0", c.p0);
    f("p1", c.p1);
    f("Pi_sup", c.Pi_sup);
    f("E", c.E);
    f("E_error", c.E_error);
    f("E_stress", c.E_stress);
    f("E_stress_error", c.E_stress_error);
    f("Q0", c.Q0);
    f("Q0_error", c.Q0_error);
    f("T_kin0", c.T_kin0);
    f("T_kin0_error", c.T_kin0_error);
    f("Abar", c.Abar);
    f("Abar_error", c.Abar_error);
    f("b", c.b);
    f("k", c.k);
    f("c", c.c);
    f("threshold", c.threshold);
    f("ratio", c.ratio);
    f("ratio_error", c.ratio_error);
    f("mu", c.mu);
    f("mu_integral", c.mu_integral);
    f("mu_error", c.mu_error);
    f("mu_margin", c.mu_margin);
    f("Rbar", c.Rbar);
    f("A", c.A);
    f("B", c.B);
    f("discriminant", c.discriminant);
    f("z0", c.z0);
    f("cond2_integral", c.cond2_integral);
    f("cond2_error", c.cond2_error);
    f("cond2_bound", c.cond2_bound);
    f("z_initial", c.z_initial);
    f("sigma0", c.sigma0);
    f("T_upper", c.T_upper);
}

template <class Cert, class F>
void visit_flags(Cert& c, F&& f) {
    f("ratio_ok", c.ratio_ok);
    f("cond1", c.cond1);
    f("cond2", c.cond2);
    f("cond3", c.cond3);
    f("preconditions", c.preconditions);
    f("valid", c.valid);
}

}  // namespace

std::string certificate_to_text(const Certificate& cert) {
    std::ostringstream os;
    os << "# blowup certificate\n";
    visit_numbers(cert, [&](const char* key, double v) { os << key << " = " << format_double(v) << '\n'; });
    visit_flags(cert, [&](const char* key, bool v) { os << key << " = " << (v ? "true" : "false") << '\n'; });
    for (const auto& r : cert.reasons) os << "reason = " << r << '\n';
    return os.str();
}

Certificate certificate_from_text(const std::string& text) {
    Certificate cert;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    std::vector<std::string> seen;
    while (std::getline(is, line)) {
        ++lineno;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos)
            throw std::runtime_error("certificate line " + std::to_string(lineno) + ": expected key = value");
        const std::string key(trim(body.substr(0, eq)));
        const auto value = trim(body.substr(eq + 1));
        if (key == "reason") {
            cert.reasons.emplace_back(value);
            continue;
        }
        bool matched = false;
        visit_numbers(cert, [&](const char* k, double& slot) {
            if (matched || key != k) return;
            const auto v = parse_double(value);
            if (!v)
                throw std::runtime_error("certificate line " + std::to_string(lineno) + ": bad number for " + key);
            slot = *v;
            matched = true;
        });
        visit_flags(cert, [&](const char* k, bool& slot) {
            if (matched || key != k) return;
            if (value == "true") slot = true;
            else if (value == "false") slot = false;
            else throw std::runtime_error("certificate line " + std::to_string(lineno) + ": bad flag for " + key);
            matched = true;
        });
        if (!matched) throw std::runtime_error("certificate line " + std::to_string(lineno) + ": unknown key " + key);
        if (std::find(seen.begin(), seen.end(), key) != seen.end())
            throw std::runtime_error("certificate line " + std::to_string(lineno) + ": duplicate key " + key);
        seen.push_back(key);
    }
    std::vector<std::string> missing;
    visit_numbers(cert, [&](const char* k, double&) {
        if (std::find(seen.begin(), seen.end(), k) == seen.end()) missing.emplace_back(k);
    });
    visit_flags(cert, [&](const char* k, bool&) {
        if (std::find(seen.begin(), seen.end(), k) == seen.end()) missing.emplace_back(k);
    });
    if (!missing.empty()) throw std::runtime_error("certificate is missing key " + missing.front());
    return cert;
}

CertificateCheck verify_certificate(const Certificate& cert) {
    CertificateCheck out;
    auto close = [](double a, double b) {
        if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
        return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
    };
    auto num = [&](const char* key, double stored, double recomputed) {
        if (!close(stored, recomputed))
            out.mismatches.push_back(std::string(key) + ": stored " + format_double(stored) + ", recomputed " +
                                     format_double(recomputed));
    };
    auto flag = [&](const char* key, bool stored, bool recomputed) {
        if (stored != recomputed)
            out.mismatches.push_back(std::string(key) + ": stored " + (stored ? "true" : "false") + ", recomputed " +
                                     (recomputed ? "true" : "false"));
    };

    const double v = 4.0 * std::numbers::pi / 3.0;
    const double b = v * (cert.rho_bar + cert.p1 + cert.Pi_sup + 3.0 * cert.Abar);
    const double k = v * (cert.Pi_sup + 3.0 * cert.Abar + cert.p0 + cert.p_bar);
    num("b", cert.b, b);
    num("k", cert.k, k);
    const double threshold = ratio_threshold(cert.c);
    num("threshold", cert.threshold, threshold);
    if (cert.preconditions) {
        const auto mu = mu_for_c(cert.c, cert.mu_margin);
        num("mu_integral", cert.mu_integral, mu.integral);
        num("mu", cert.mu, mu.mu);
        num("Rbar", cert.Rbar, cert.mu * cert.R0);
        num("T_upper", cert.T_upper, (cert.Rbar - cert.R0) / cert.c);
        const auto bc = blowup_conditions(cert.E, b, k, cert.c, cert.R0, cert.Rbar);
        num("A", cert.A, bc.A);
        num("B", cert.B, bc.B);
        num("z0", cert.z0, bc.z0 ? *bc.z0 : kNaN);
        flag("cond1", cert.cond1, bc.cond1);
        flag("cond2", cert.cond2, bc.cond2);
        const double d = cert.E + b * cert.R0 * cert.R0 * cert.R0;
        const double zi = d > 0.0 ? cert.Q0 / (cert.R0 * d) : kNaN;
        num("z_initial", cert.z_initial, zi);
        const bool cond3 = bc.z0.has_value() && zi > 0.5 * (1.0 + *bc.z0);
        flag("cond3", cert.cond3, cond3);
        const bool ratio_ok = cert.ratio - cert.ratio_error > threshold;
        flag("ratio_ok", cert.ratio_ok, ratio_ok);
        flag("valid", cert.valid, ratio_ok && bc.cond1 && bc.cond2 && cond3);
    } else {
        flag("valid", cert.valid, false);
    }
    out.consistent = out.mismatches.empty();
    return out;
}

// ---------------------------------------------------------------------------

Sigma0Search find_sigma0(const ShellData& data_template, const ConstitutiveSet& set, double lo, double hi,
                         const CertifyOptions& opts, double rel_tol) {
    Sigma0Search out;
    if (!(lo > 0.0 && hi >= lo)) {
        out.message = "sigma range must satisfy 0 < lo <= hi";
        return out;
    }
    std::vector<double> grid;
    for (double s = lo; s <= hi * (1.0 + 1e-12); s *= 2.0) grid.push_back(s);

    auto run = [&](double sigma) {
        ShellData d = data_template;
        d.sigma = sigma;
        return certify(d, set, opts);
    };

    std::vector<Certificate> certs(grid.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(grid.size()); ++i) certs[i] = run(grid[i]);

    for (std::size_t i = 0; i < grid.size(); ++i) out.sweep.push_back({grid[i], certs[i].valid});
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (certs[i].valid && !certs[i + 1].valid) out.monotone_on_grid = false;
    }

    const auto first = std::find_if(certs.begin(), certs.end(), [](const Certificate& c) { return c.valid; });
    if (first == certs.end()) {
        out.message = "no certified sigma in [" + format_double(lo) + ", " + format_double(hi) + "]";
        if (!certs.empty() && !certs.back().reasons.empty()) out.message += "; at hi: " + certs.back().reasons.front();
        return out;
    }
    const auto idx = static_cast<std::size_t>(first - certs.begin());
    double good = grid[idx];
    Certificate best = *first;
    if (idx > 0) {
        double bad = grid[idx - 1];
        while ((good - bad) > rel_tol * good) {
            const double mid = 0.5 * (good + bad);
            auto c = run(mid);
            out.bisection.push_back({mid, c.valid});
            if (c.valid) {
                good = mid;
                best = std::move(c);
            } else {
                bad = mid;
            }
        }
    } else {
        out.message = "lower end of the range is already certified";
    }
    out.found = true;
    out.sigma0 = good;
    best.sigma0 = good;
    out.certificate = std::move(best);
    return out;
}

}  // namespace mis
