#include "mis/flowline.hpp"

#include <algorithm>
#include <cmath>

#include "mis/ode.hpp"

namespace mis {

FlowlineForcing FlowlineForcing::constant(double value) {
    return {[value](double) { return value; }};
}

FlowlineForcing FlowlineForcing::sinusoid(double mean, double amplitude, double omega, double phase) {
    return {[=](double tau) { return mean + amplitude * std::sin(omega * tau + phase); }};
}

FlowlinePath integrate_flowline(const FluidState& start, const ConstitutiveSet& set, const FlowlineForcing& forcing,
                                double tau_max, const FlowlineOptions& opts) {
    FlowlinePath path;
    const double n_floor = opts.n_floor_rel * (opts.n_ref > 0.0 ? opts.n_ref : start.n);

    auto sample = [&](double tau, const Vec<3>& y) {
        return FlowlineSample{tau, y[0], y[1], y[2], y[0] + set.pressure(y[0], y[1]) + y[2]};
    };

    Vec<3> y{start.rho, start.n, start.Pi};
    path.samples.push_back(sample(0.0, y));

    auto rhs = [&](double tau, const Vec<3>& s) -> Vec<3> {
        const double rho = s[0], n = s[1], Pi = s[2];
        const double theta = forcing.theta(tau);
        const double t0 = set.tau0(rho, n);
        const double e = rho + set.pressure(rho, n) + Pi;
        const double lam = set.lambda(rho, n);
        return {-e * theta, -n * theta, -set.zeta(rho, n) / t0 * theta - (1.0 + lam * Pi) * Pi / t0};
    };

    bool floored = false;
    OdeOptions o;
    o.rtol = opts.rtol;
    o.atol = opts.atol;
    const auto rep = integrate_dopri<3>(rhs, 0.0, y, tau_max, o, [&](double tau, const Vec<3>& s) {
        path.samples.push_back(sample(tau, s));
        if (s[1] <= n_floor) {
            floored = true;
            return false;
        }
        return true;
    });

    path.steps = rep.accepted;
    path.last_good_tau = path.samples.back().tau;
    if (floored) {
        path.status = FlowlineStatus::n_floor_reached;
    } else if (rep.status == OdeStatus::step_collapse || rep.status == OdeStatus::non_finite ||
               rep.status == OdeStatus::max_steps) {
        path.status = FlowlineStatus::stiff_failure;
    }
    return path;
}

WecCheck wec_propagation_check(const FlowlinePath& path, double tol) {
    WecCheck out;
    out.min_e = path.samples.empty() ? 0.0 : path.samples.front().e;
    for (const auto& s : path.samples) out.min_e = std::min(out.min_e, s.e);
    out.holds = out.min_e >= -tol;
    return out;
}

std::size_t admissible_length(const FlowlinePath& path, const ConstitutiveSet& set, double delta) {
    std::size_t k = 0;
    while (k < path.samples.size()) {
        const auto& s = path.samples[k];
        if (!is_physical({s.rho, s.n, s.Pi, {}}, set, delta).physical) break;
        ++k;
    }
    return k;
}

double pi_bound(double Pi0, double abar) { return std::abs(Pi0) + 3.0 * abar; }

// ---------------------------------------------------------------------------

double initial_F(double Pi, double eps) { return -eps * std::tanh(Pi); }

double initial_F_dPi(double Pi, double eps) {
    const double c = std::cosh(Pi);
    return -eps / (c * c);
}

namespace {

// Five characteristics integrated as one system in s = log n so that the
// neighbours share the step sequence: (rho, Pi, G) per copy, G = int zeta/tau0 ds.
constexpr std::size_t kCopies = 5;
using Bundle = Vec<3 * kCopies>;

Bundle bundle_rhs(const ConstitutiveSet& set, double s, const Bundle& y) {
    Bundle d{};
    const double n = std::exp(s);
    for (std::size_t c = 0; c < kCopies; ++c) {
        const double rho = y[3 * c], Pi = y[3 * c + 1];
        const double src = set.zeta_over_tau0(rho, n);
        d[3 * c] = rho + set.pressure(rho, n) + Pi;
        d[3 * c + 1] = src;
        d[3 * c + 2] = src;
    }
    return d;
}

}  // namespace

CharacteristicResult solve_F_characteristic(const ConstitutiveSet& set, const CharacteristicAnchor& anchor, double eps,
                                            double n_lo, double n_hi, const CharacteristicOptions& opts) {
    CharacteristicResult res;
    const double s0 = std::log(anchor.n0);
    const double ds = 1.0 / opts.samples_per_unit_log_n;
    res.log_n_step = ds;

    const double hr = opts.h_rel * (1.0 + std::abs(anchor.rho0));
    const double hp = opts.h_rel * (1.0 + std::abs(anchor.Pi0));
    // copies: 0 centre, 1 rho+, 2 rho-, 3 Pi+, 4 Pi-
    const std::array<std::pair<double, double>, kCopies> starts = {{{anchor.rho0, anchor.Pi0},
                                                                     {anchor.rho0 + hr, anchor.Pi0},
                                                                     {anchor.rho0 - hr, anchor.Pi0},
                                                                     {anchor.rho0, anchor.Pi0 + hp},
                                                                     {anchor.rho0, anchor.Pi0 - hp}}};
    Bundle y0{};
    std::array<double, kCopies> F0{};
    for (std::size_t c = 0; c < kCopies; ++c) {
        y0[3 * c] = starts[c].first;
        y0[3 * c + 1] = starts[c].second;
        F0[c] = initial_F(starts[c].second, eps);
    }

    auto make_sample = [&](double s, const Bundle& y) {
        CharacteristicSample cs;
        cs.n = std::exp(s);
        cs.rho = y[0];
        cs.Pi = y[1];
        cs.F = F0[0] + y[2];
        cs.source = set.zeta_over_tau0(cs.rho, cs.n);

        auto F = [&](std::size_t c) { return F0[c] + y[3 * c + 2]; };
        // Jacobian of (rho, Pi) at this n with respect to the anchor (rho0, Pi0).
        const double drho_drho0 = (y[3] - y[6]) / (2 * hr);
        const double dPi_drho0 = (y[4] - y[7]) / (2 * hr);
        const double drho_dPi0 = (y[9] - y[12]) / (2 * hp);
        const double dPi_dPi0 = (y[10] - y[13]) / (2 * hp);
        const double dF_drho0 = (F(1) - F(2)) / (2 * hr);
        const double dF_dPi0 = (F(3) - F(4)) / (2 * hp);
        // [drho/drho0 dPi/drho0; drho/dPi0 dPi/dPi0] [F_rho; F_Pi] = [dF/drho0; dF/dPi0]
        const double det = drho_drho0 * dPi_dPi0 - dPi_drho0 * drho_dPi0;
        cs.dF_drho = (dF_drho0 * dPi_dPi0 - dPi_drho0 * dF_dPi0) / det;
        cs.dF_dPi = (drho_drho0 * dF_dPi0 - dF_drho0 * drho_dPi0) / det;
        return cs;
    };

    OdeOptions o;
    o.rtol = opts.rtol;
    o.atol = opts.atol;
    auto rhs = [&](double s, const Bundle& y) { return bundle_rhs(set, s, y); };

    // Sweep away from the anchor in one direction, sampling on the uniform grid.
    auto sweep = [&](double s_end, std::vector<CharacteristicSample>& out) {
        Bundle y = y0;
        double s = s0;
        const double dir = s_end > s0 ? 1.0 : -1.0;
        const long count = static_cast<long>(std::floor(std::abs(s_end - s0) / ds + 1e-9));
        double h = 0.0;
        for (long k = 1; k <= count; ++k) {
            const double s_next = s0 + dir * ds * static_cast<double>(k);
            o.h_init = h;
            const auto rep = integrate_dopri<3 * kCopies>(rhs, s, y, s_next, o);
            if (rep.status != OdeStatus::completed) {
                res.escaped = true;
                res.message = "characteristic integration failed near n = " + std::to_string(std::exp(rep.t));
                return;
            }
            h = rep.h_next;
            s = s_next;
            bool finite = true;
            for (double v : y) finite = finite && std::isfinite(v);
            if (!finite) {
                res.escaped = true;
                res.message = "characteristic left the finite range near n = " + std::to_string(std::exp(s));
                return;
            }
            out.push_back(make_sample(s, y));
        }
    };

    std::vector<CharacteristicSample> below, above;
    sweep(std::log(n_lo), below);
    sweep(std::log(n_hi), above);

    res.samples.assign(below.rbegin(), below.rend());
    res.samples.push_back(make_sample(s0, y0));
    res.samples.insert(res.samples.end(), above.begin(), above.end());
    return res;
}

double characteristic_residual(const CharacteristicResult& result) {
    const auto& s = result.samples;
    const double h = result.log_n_step;
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < s.size(); ++i) {
        const double dF = (s[i - 2].F - 8.0 * s[i - 1].F + 8.0 * s[i + 1].F - s[i + 2].F) / (12.0 * h);
        worst = std::max(worst, std::abs(dF - s[i].source));
    }
    return worst;
}

FValue evaluate_F(const ConstitutiveSet& set, double rho, double n, double Pi, double n0, double eps,
                  const CharacteristicOptions& opts) {
    auto trace = [&](double Pi_start, double& F) {
        Vec<3> y{rho, Pi_start, 0.0};
        OdeOptions o;
        o.rtol = opts.rtol;
        o.atol = opts.atol;
        auto rhs = [&](double s, const Vec<3>& v) -> Vec<3> {
            const double nn = std::exp(s);
            const double src = set.zeta_over_tau0(v[0], nn);
            return {v[0] + set.pressure(v[0], nn) + v[1], src, src};
        };
        const auto rep = integrate_dopri<3>(rhs, std::log(n), y, std::log(n0), o);
        // y[2] = int_{log n}^{log n0} source, so F(point) = F0(anchor) - y[2].
        F = initial_F(y[1], eps) - y[2];
        return rep.status == OdeStatus::completed && std::isfinite(F);
    };

    FValue out;
    double F = 0.0, Fp = 0.0, Fm = 0.0;
    const double h = opts.h_rel * (1.0 + std::abs(Pi));
    out.ok = trace(Pi, F) && trace(Pi + h, Fp) && trace(Pi - h, Fm);
    out.F = F;
    out.dF_dPi = (Fp - Fm) / (2.0 * h);
    return out;
}

}  // namespace mis
