#include "mis/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mis {

namespace {

constexpr int G = Fields::ghosts;

double ko(const std::vector<double>& f, std::size_t k) {
    return f[k - 2] - 4.0 * f[k - 1] + 6.0 * f[k] - 4.0 * f[k + 1] + f[k + 2];
}

void compute_q(const ConstitutiveSet& set, const Fields& in, std::vector<double>& q, std::size_t k) {
    q[k] = set.pressure(in.rho[k], in.n[k]) + in.Pi[k];
}

// Radial (d = 3) or planar (d = 1) reduction with unknowns (rho, n, Pi, u), u the
// spatial velocity component. With D = u0 d_t + u d_r and theta = d_t u0 + d_r u + (d-1) u/r:
//   D rho = -e theta,  D n = -n theta,  D Pi = -(Pi + lambda Pi^2)/tau0 - (zeta/tau0) theta,
//   e D u + u D q + d_r q = 0,  D q = -c_s^2 e theta - (Pi + lambda Pi^2)/tau0,
// which is solved for a = d_t u first.
void cell_rhs(const Grid1D& grid, const ConstitutiveSet& set, const SchemeOptions& sc, const Fields& in,
              const std::vector<double>& q, Fields& out, int i) {
    const auto k = static_cast<std::size_t>(i + G);
    const double h = grid.spacing;
    const double inv2h = 0.5 / h;

    const double rho = in.rho[k], n = in.n[k], Pi = in.Pi[k], u = in.u[k];
    const double d_rho = (in.rho[k + 1] - in.rho[k - 1]) * inv2h;
    const double d_n = (in.n[k + 1] - in.n[k - 1]) * inv2h;
    const double d_Pi = (in.Pi[k + 1] - in.Pi[k - 1]) * inv2h;
    const double d_u = (in.u[k + 1] - in.u[k - 1]) * inv2h;
    const double d_q = (q[k + 1] - q[k - 1]) * inv2h;

    const double e = rho + set.pressure(rho, n) + Pi;
    const double p_rho = set.dp_drho(rho, n);
    const double p_n = set.dp_dn(rho, n);
    const double geo = grid.kind == GridKind::radial ? 2.0 * u / grid.coord(i) : 0.0;

    double cs2 = 0.0, relax = 0.0, zt = 0.0;
    if (sc.freeze_bulk) {
        cs2 = p_rho + n * p_n / e;
    } else {
        const double tau0 = set.tau0(rho, n);
        zt = set.zeta(rho, n) / tau0;
        cs2 = zt / e + p_rho + n * p_n / e;
        relax = (Pi + set.lambda(rho, n) * Pi * Pi) / tau0;
    }

    const double u0 = std::sqrt(1.0 + u * u);
    const double a = (-e * u * d_u + u * cs2 * e * (d_u + geo) + u * relax - d_q) * u0 /
                     (e * (1.0 + u * u * (1.0 - cs2)));
    const double theta = u / u0 * a + d_u + geo;

    const double diss = -sc.dissipation / (16.0 * h);
    out.rho[k] = (-e * theta - u * d_rho) / u0 + diss * ko(in.rho, k);
    out.n[k] = (-n * theta - u * d_n) / u0 + diss * ko(in.n, k);
    out.u[k] = a + diss * ko(in.u, k);
    out.Pi[k] = sc.freeze_bulk ? 0.0 : (-relax - zt * theta - u * d_Pi) / u0 + diss * ko(in.Pi, k);
}

thread_local std::vector<double> q_buffer;

void combine(Fields& dst, const Fields& base, const Fields& k, double w, bool parallel) {
    const long m = static_cast<long>(base.rho.size());
    auto body = [&](long j) {
        dst.rho[j] = base.rho[j] + w * k.rho[j];
        dst.n[j] = base.n[j] + w * k.n[j];
        dst.Pi[j] = base.Pi[j] + w * k.Pi[j];
        dst.u[j] = base.u[j] + w * k.u[j];
    };
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (long j = G; j < m - G; ++j) body(j);
    } else {
        for (long j = G; j < m - G; ++j) body(j);
    }
}

double deviation(const FluidState& s, const ConstantState& bg) {
    return std::max({std::abs(s.rho - bg.rho_bar), std::abs(s.n - bg.n_bar), std::abs(s.Pi), std::abs(s.u[0])});
}

}  // namespace

// ---------------------------------------------------------------------------

Grid1D Grid1D::make(GridKind kind, int cells, double length) {
    Grid1D g;
    g.kind = kind;
    g.cells = cells;
    g.length = length;
    g.spacing = (kind == GridKind::radial ? length : 2.0 * length) / cells;
    return g;
}

double Grid1D::coord(int i) const {
    const double c = (i + 0.5) * spacing;
    return kind == GridKind::radial ? c : c - length;
}

double Grid1D::volume(int i) const {
    if (kind == GridKind::planar) return spacing;
    const double r = coord(i);
    return 4.0 * std::numbers::pi * r * r * spacing;
}

Fields::Fields(int cells)
    : rho(cells + 2 * G, 0.0), n(cells + 2 * G, 0.0), Pi(cells + 2 * G, 0.0), u(cells + 2 * G, 0.0) {}

void Fields::set(int i, const FluidState& s) {
    const auto k = static_cast<std::size_t>(i + G);
    rho[k] = s.rho;
    n[k] = s.n;
    Pi[k] = s.Pi;
    u[k] = s.u[0];
}

Fields initial_fields(const Grid1D& grid, const Profile& profile) {
    Fields f(grid.cells);
    for (int i = 0; i < grid.cells; ++i) f.set(i, profile(grid.coord(i)));
    return f;
}

void fill_ghosts(const Grid1D& grid, const ConstantState& bg, Fields& f) {
    const int N = grid.cells;
    for (int g = 1; g <= G; ++g) {
        const auto hi = static_cast<std::size_t>(N + G - 1 + g);
        f.rho[hi] = bg.rho_bar;
        f.n[hi] = bg.n_bar;
        f.Pi[hi] = 0.0;
        f.u[hi] = 0.0;

        const auto lo = static_cast<std::size_t>(G - g);
        if (grid.kind == GridKind::radial) {
            const auto mirror = static_cast<std::size_t>(G + g - 1);
            f.rho[lo] = f.rho[mirror];
            f.n[lo] = f.n[mirror];
            f.Pi[lo] = f.Pi[mirror];
            f.u[lo] = -f.u[mirror];
        } else {
            f.rho[lo] = bg.rho_bar;
            f.n[lo] = bg.n_bar;
            f.Pi[lo] = 0.0;
            f.u[lo] = 0.0;
        }
    }
}

void rhs_serial(const Grid1D& grid, const ConstitutiveSet& set, const SchemeOptions& scheme, const Fields& in,
                Fields& out) {
    auto& q = q_buffer;
    q.resize(in.rho.size());
    for (std::size_t k = 0; k < q.size(); ++k) compute_q(set, in, q, k);
    for (int i = 0; i < grid.cells; ++i) cell_rhs(grid, set, scheme, in, q, out, i);
}

void rhs_parallel(const Grid1D& grid, const ConstitutiveSet& set, const SchemeOptions& scheme, const Fields& in,
                  Fields& out) {
    auto& q = q_buffer;
    q.resize(in.rho.size());
    const long m = static_cast<long>(q.size());
    const std::vector<double>& qc = q;
#pragma omp parallel
    {
#pragma omp for schedule(static)
        for (long k = 0; k < m; ++k) compute_q(set, in, q, static_cast<std::size_t>(k));
#pragma omp for schedule(static)
        for (int i = 0; i < grid.cells; ++i) cell_rhs(grid, set, scheme, in, qc, out, i);
    }
}

void rk4_step(const Grid1D& grid, const ConstitutiveSet& set, const ConstantState& background,
              const SchemeOptions& scheme, double dt, Fields& f, StepWorkspace& ws, bool parallel) {
    if (ws.k1.rho.size() != f.rho.size()) ws = StepWorkspace(f.cells());
    auto eval = [&](Fields& x, Fields& k) {
        fill_ghosts(grid, background, x);
        if (parallel) rhs_parallel(grid, set, scheme, x, k);
        else rhs_serial(grid, set, scheme, x, k);
    };
    eval(f, ws.k1);
    combine(ws.stage, f, ws.k1, 0.5 * dt, parallel);
    eval(ws.stage, ws.k2);
    combine(ws.stage, f, ws.k2, 0.5 * dt, parallel);
    eval(ws.stage, ws.k3);
    combine(ws.stage, f, ws.k3, dt, parallel);
    eval(ws.stage, ws.k4);

    const long m = static_cast<long>(f.rho.size());
    const double w = dt / 6.0;
    auto body = [&](long j) {
        f.rho[j] += w * (ws.k1.rho[j] + 2.0 * ws.k2.rho[j] + 2.0 * ws.k3.rho[j] + ws.k4.rho[j]);
        f.n[j] += w * (ws.k1.n[j] + 2.0 * ws.k2.n[j] + 2.0 * ws.k3.n[j] + ws.k4.n[j]);
        f.Pi[j] += w * (ws.k1.Pi[j] + 2.0 * ws.k2.Pi[j] + 2.0 * ws.k3.Pi[j] + ws.k4.Pi[j]);
        f.u[j] += w * (ws.k1.u[j] + 2.0 * ws.k2.u[j] + 2.0 * ws.k3.u[j] + ws.k4.u[j]);
    };
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (long j = G; j < m - G; ++j) body(j);
    } else {
        for (long j = G; j < m - G; ++j) body(j);
    }
    fill_ghosts(grid, background, f);
}

double max_characteristic_speed(const Grid1D& grid, const ConstitutiveSet& set, const Fields& f) {
    double best = 0.0;
    for (int i = 0; i < grid.cells; ++i) {
        const auto s = f.at(i);
        const double v = s.u[0] / s.u0();
        const auto cs2 = sound_speed_sq(set, s.rho, s.n, s.Pi);
        const double cs = cs2 && *cs2 > 0.0 ? std::sqrt(*cs2) : 0.0;
        const double plus = (v + cs) / (1.0 + v * cs);
        const double minus = (v - cs) / (1.0 - v * cs);
        best = std::max({best, std::abs(v), std::abs(plus), std::abs(minus)});
    }
    return best;
}

// ---------------------------------------------------------------------------

Integrals volume_integrals(const Grid1D& grid, const ConstitutiveSet& set, const ConstantState& bg, const Fields& f) {
    Integrals out;
    const double p_bar = bg.pressure(set);
    for (int i = 0; i < grid.cells; ++i) {
        const auto s = f.at(i);
        const double x = grid.coord(i);
        const double vol = grid.volume(i);
        const double q = set.pressure(s.rho, s.n) + s.Pi;
        const double e = s.rho + q;
        const double u = s.u[0];
        const double u0 = std::sqrt(1.0 + u * u);
        const double dT00 = (s.rho - bg.rho_bar) + e * u * u;  // e u0^2 - q - rho_bar
        out.E += dT00 * vol;
        out.I += 0.5 * x * x * dT00 * vol;
        out.Q += x * e * u0 * u * vol;
        out.T_kin += e * u * u * vol;
        out.pressure += (q - p_bar) * vol;
    }
    out.pressure *= grid.dimension();
    return out;
}

const std::vector<std::string>& diagnostics_columns() {
    static const std::vector<std::string> cols{"t",         "E",         "I",          "Q",          "T_kin",
                                               "virial_residual", "Idot_minus_Q", "max_grad_u", "min_cs2",
                                               "max_cs2",   "min_e",     "max_abs_Pi", "support_radius", "z"};
    return cols;
}

std::vector<double> diagnostics_values(const DiagnosticsRow& r) {
    return {r.t,       r.E,       r.I,     r.Q,          r.T_kin,          r.virial_residual, r.Idot_minus_Q,
            r.max_grad_u, r.min_cs2, r.max_cs2, r.min_e, r.max_abs_Pi, r.support_radius, r.z};
}

void fill_residuals(std::vector<DiagnosticsRow>& rows) {
    for (std::size_t j = 1; j + 1 < rows.size(); ++j) {
        const double h1 = rows[j].t - rows[j - 1].t;
        const double h2 = rows[j + 1].t - rows[j].t;
        if (!(h1 > 0.0) || std::abs(h2 - h1) > 1e-9 * h1) continue;
        const double Idot = (rows[j + 1].I - rows[j - 1].I) / (2.0 * h1);
        const double Iddot = (rows[j + 1].I - 2.0 * rows[j].I + rows[j - 1].I) / (h1 * h1);
        rows[j].Idot_minus_Q = std::abs(Idot - rows[j].Q);
        rows[j].virial_residual = std::abs(Iddot - rows[j].T_kin - rows[j].pressure_integral);
    }
}

QBoundCheck check_q_bounds(double Q, double T_kin, double E, double b, double R, double tol) {
    QBoundCheck out;
    const double M = E + b * R * R * R;
    out.quadratic_margin = R * R * (2.0 * M - T_kin) * T_kin - Q * Q;
    out.linear_margin = R * M - std::abs(Q);
    const double scale = std::max(1.0, R * M);
    out.holds = out.quadratic_margin >= -tol * scale * scale && out.linear_margin >= -tol * scale;
    return out;
}

double finite_propagation_deviation(const Grid1D& grid, const ConstantState& bg, const Fields& f, double radius) {
    double worst = 0.0;
    for (int i = 0; i < grid.cells; ++i) {
        if (std::abs(grid.coord(i)) <= radius) continue;
        worst = std::max(worst, deviation(f.at(i), bg));
    }
    return worst;
}

// ---------------------------------------------------------------------------

std::string to_string(BreakdownCause cause) {
    switch (cause) {
        case BreakdownCause::none: return "none";
        case BreakdownCause::gradient_blowup: return "gradient_blowup";
        case BreakdownCause::left_physical_set: return "left_physical_set";
        case BreakdownCause::wec_violation: return "wec_violation";
        case BreakdownCause::pi_bound_violation: return "pi_bound_violation";
        case BreakdownCause::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

double c1_measure(const Grid1D& grid, const Fields& f, double* max_grad_u) {
    const int N = grid.cells;
    const double h = grid.spacing;
    auto sup_c1 = [&](const std::vector<double>& v) {
        double val = 0.0, der = 0.0;
        for (int i = 0; i < N; ++i) {
            const auto k = static_cast<std::size_t>(i + G);
            val = std::max(val, std::abs(v[k]));
            if (i + 2 < N) der = std::max(der, std::abs(-3.0 * v[k] + 4.0 * v[k + 1] - v[k + 2]) / (2.0 * h));
            if (i >= 2) der = std::max(der, std::abs(3.0 * v[k] - 4.0 * v[k - 1] + v[k - 2]) / (2.0 * h));
        }
        return std::pair{val, der};
    };
    double total = 0.0;
    for (const auto* v : {&f.rho, &f.n, &f.Pi}) {
        const auto [val, der] = sup_c1(*v);
        total += val + der;
    }
    auto [uval, uder] = sup_c1(f.u);
    if (max_grad_u) *max_grad_u = uder;
    double ur = 0.0;
    if (grid.kind == GridKind::radial) {
        for (int i = 0; i < N; ++i) ur = std::max(ur, std::abs(f.u[static_cast<std::size_t>(i + G)] / grid.coord(i)));
    }
    return total + std::max(uder, ur);
}

BreakdownReport detect_breakdown(const Grid1D& grid, const ConstitutiveSet& set, const Fields& f,
                                 const BreakdownThresholds& th, double grad_limit, double pi_bound,
                                 bool pi_bound_enabled) {
    BreakdownReport rep;
    rep.pi_bound_enabled = pi_bound_enabled;
    auto trigger = [&](BreakdownCause cause, int i, double value) {
        rep.triggered = true;
        rep.cause = cause;
        rep.cell = i;
        rep.coord = i >= 0 ? grid.coord(i) : 0.0;
        rep.value = value;
    };

    // Each pass scans the whole grid so the reported cause follows the fixed order.
    for (int i = 0; i < grid.cells; ++i) {
        const auto s = f.at(i);
        if (!std::isfinite(s.rho) || !std::isfinite(s.n) || !std::isfinite(s.Pi) || !std::isfinite(s.u[0])) {
            trigger(BreakdownCause::numerical_failure, i, std::numeric_limits<double>::quiet_NaN());
            return rep;
        }
    }
    for (int i = 0; i < grid.cells; ++i) {
        const auto s = f.at(i);
        const double slack = physical_slack(set, s.rho, s.n, s.Pi);
        if (!(slack >= th.delta)) {
            trigger(BreakdownCause::left_physical_set, i, slack);
            return rep;
        }
    }
    for (int i = 0; i < grid.cells; ++i) {
        const double e = wec_value(f.at(i), set);
        if (e < -th.delta) {
            trigger(BreakdownCause::wec_violation, i, e);
            return rep;
        }
    }
    if (pi_bound_enabled) {
        for (int i = 0; i < grid.cells; ++i) {
            const double p = std::abs(f.at(i).Pi);
            if (p > pi_bound + th.delta) {
                trigger(BreakdownCause::pi_bound_violation, i, p);
                return rep;
            }
        }
    }
    const double g = c1_measure(grid, f);
    if (g > grad_limit) trigger(BreakdownCause::gradient_blowup, -1, g);
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

DiagnosticsRow make_row(const Grid1D& grid, const ConstitutiveSet& set, const RunSetup& setup, const Fields& f,
                        double t, double E0) {
    DiagnosticsRow row;
    row.t = t;
    const auto in = volume_integrals(grid, set, setup.background, f);
    row.E = in.E;
    row.I = in.I;
    row.Q = in.Q;
    row.T_kin = in.T_kin;
    row.pressure_integral = in.pressure;
    c1_measure(grid, f, &row.max_grad_u);

    row.min_cs2 = std::numeric_limits<double>::infinity();
    row.max_cs2 = -std::numeric_limits<double>::infinity();
    row.min_e = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid.cells; ++i) {
        const auto s = f.at(i);
        const auto cs2 = sound_speed_sq(set, s.rho, s.n, s.Pi);
        const double c2 = cs2 ? *cs2 : std::numeric_limits<double>::quiet_NaN();
        row.min_cs2 = std::min(row.min_cs2, c2);
        row.max_cs2 = std::max(row.max_cs2, c2);
        row.min_e = std::min(row.min_e, wec_value(s, set));
        row.max_abs_Pi = std::max(row.max_abs_Pi, std::abs(s.Pi));
        if (deviation(s, setup.background) > 1e-12) row.support_radius = std::abs(grid.coord(i));
    }
    const double R = setup.R0 + setup.c * t;
    const double M = E0 + setup.b * R * R * R;
    row.z = M != 0.0 ? row.Q / (R * M) : std::numeric_limits<double>::quiet_NaN();
    return row;
}

}  // namespace

SolutionRun simulate(const Grid1D& grid, const ConstitutiveSet& set, const RunSetup& setup, const Fields& initial,
                     const RunOptions& opts) {
    SolutionRun run;
    run.grid = grid;
    Fields f = initial;
    fill_ghosts(grid, setup.background, f);
    StepWorkspace ws(grid.cells);

    // Characteristic speeds of physical states never exceed 1, so dt = cfl h
    // satisfies the CFL bound everywhere; the step divides the output interval.
    const double dt_cfl = opts.scheme.cfl * grid.spacing;
    const long per_output = std::max(1L, static_cast<long>(std::ceil(opts.output_interval / dt_cfl - 1e-9)));
    run.dt = opts.output_interval / static_cast<double>(per_output);
    const long total = static_cast<long>(std::ceil(opts.t_max / run.dt - 1e-9));

    const double E0 = volume_integrals(grid, set, setup.background, f).E;
    run.initial_c1 = c1_measure(grid, f);
    const double grad_limit = opts.thresholds.grad_max > 0.0 ? opts.thresholds.grad_max
                                                              : opts.thresholds.grad_factor * run.initial_c1;

    auto record = [&](double t) {
        auto row = make_row(grid, set, setup, f, t, E0);
        MonitorRow mon;
        mon.t = t;
        mon.leak = finite_propagation_deviation(grid, setup.background, f, setup.R0 + setup.c * t);
        const double R = setup.R0 + setup.c * t;
        mon.q_bounds = check_q_bounds(row.Q, row.T_kin, E0, setup.b, R);
        run.rows.push_back(row);
        run.monitors.push_back(mon);
        if (opts.keep_snapshots) run.snapshots.push_back({t, f});
    };

    record(0.0);
    run.breakdown = detect_breakdown(grid, set, f, opts.thresholds, grad_limit, setup.pi_bound,
                                     setup.pi_bound_enabled);
    if (!setup.pi_bound_enabled) run.breakdown.note = "Pi bound monitor disabled: integrability constant diverges";

    for (long step = 1; step <= total && !(run.breakdown.triggered && opts.stop_at_breakdown); ++step) {
        rk4_step(grid, set, setup.background, opts.scheme, run.dt, f, ws, opts.parallel);
        run.steps = step;
        const double t = static_cast<double>(step) * run.dt;
        if (!run.breakdown.triggered) {
            auto rep = detect_breakdown(grid, set, f, opts.thresholds, grad_limit, setup.pi_bound,
                                        setup.pi_bound_enabled);
            if (rep.triggered) {
                rep.time = t;
                rep.note = run.breakdown.note;
                run.breakdown = rep;
                if (step % per_output != 0) record(t);
            }
        }
        if (step % per_output == 0) record(t);
    }
    fill_residuals(run.rows);
    run.final_fields = std::move(f);
    return run;
}

}  // namespace mis
