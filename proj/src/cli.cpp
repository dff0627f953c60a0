#include "mis/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "mis/flowline.hpp"
#include "mis/io.hpp"
#include "mis/riemann.hpp"

namespace mis::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum Exit { ok = 0, domain_failure = 1, usage = 2 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double x) { return format_double(x); }

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path);
    if (!f) throw UsageError("cannot write '" + path.string() + "'");
    return f;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_certificate_report(const Certificate& c, std::ostream& out) {
    out << "certificate: " << (c.valid ? "VALID" : "INVALID") << '\n';
    out << "  data: R0 = " << fmt(c.R0) << ", ell = " << fmt(c.ell) << ", sigma = " << fmt(c.sigma)
        << ", smooth_w = " << fmt(c.smooth_w) << '\n';
    out << "  background: rho = " << fmt(c.rho_bar) << ", n = " << fmt(c.n_bar) << ", p = " << fmt(c.p_bar)
        << ", c = " << fmt(c.c) << '\n';
    out << "  Abar = " << fmt(c.Abar) << "  b = " << fmt(c.b) << "  k = " << fmt(c.k) << '\n';
    out << "  E = " << fmt(c.E) << " (stress route " << fmt(c.E_stress) << ")  Q0 = " << fmt(c.Q0) << '\n';
    out << "  ratio = " << fmt(c.ratio) << " vs threshold " << fmt(c.threshold) << "  ["
        << (c.ratio_ok ? "ok" : "fails") << "]\n";
    out << "  mu = " << fmt(c.mu) << "  Rbar = " << fmt(c.Rbar) << "  T_upper = " << fmt(c.T_upper) << '\n';
    out << "  A = " << fmt(c.A) << "  B = " << fmt(c.B) << "  z0 = " << fmt(c.z0) << '\n';
    out << "  cond1 " << (c.cond1 ? "holds" : "fails") << ", cond2 " << (c.cond2 ? "holds" : "fails") << " ("
        << fmt(c.cond2_integral) << " < " << fmt(c.cond2_bound) << "), cond3 " << (c.cond3 ? "holds" : "fails")
        << " (z_initial = " << fmt(c.z_initial) << ")\n";
    if (std::isfinite(c.sigma0)) out << "  sigma0 = " << fmt(c.sigma0) << '\n';
    for (const auto& r : c.reasons) out << "  reason: " << r << '\n';
}

RunConfig load(const std::string& path) { return parse_config(path); }

// ---------------------------------------------------------------------------

int cmd_validate_eos(const RunConfig& cfg, std::ostream& out) {
    const auto rep = validate_assumptions(cfg.set, cfg.validation);
    out << "constitutive set: " << cfg.set.describe() << '\n';
    out << "physical samples: " << rep.physical_samples << '\n';
    for (const auto& t : rep.tallies)
        out << "  " << std::left << std::setw(40) << t.name << " checked " << t.checked << ", failed " << t.failed
            << '\n';
    for (const auto& v : rep.violations)
        out << "  violation " << v.assumption << ": " << v.what << " at rho = " << fmt(v.rho) << ", n = " << fmt(v.n)
            << ", Pi = " << fmt(v.Pi) << " (value " << fmt(v.value) << ")\n";

    const double c = cfg.background.sound_speed(cfg.set);
    out << "background sound speed c = " << fmt(c) << '\n';
    const auto abar = abar_bound(cfg.set, cfg.certify.abar_range_set ? cfg.certify.abar
                                                                      : AbarOptions::around(cfg.background.rho_bar));
    out << "integrability constant Abar = " << fmt(abar.value) << " (error " << fmt(abar.error) << ", "
        << (abar.converged ? "converged" : "diverges") << ")\n";
    out << "result: " << (rep.passed() ? "PASS" : "FAIL") << '\n';
    return rep.passed() ? ok : domain_failure;
}

int cmd_certify(const RunConfig& cfg, const std::string& out_path, std::optional<double> sigma, std::ostream& out) {
    auto data = cfg.data;
    if (sigma) data.sigma = *sigma;
    const auto cert = certify(data, cfg.set, cfg.certify);
    print_certificate_report(cert, out);
    const auto path = out_path.empty() ? std::filesystem::path(cfg.output_directory) / "certificate.txt"
                                       : std::filesystem::path(out_path);
    open_output(path) << certificate_to_text(cert);
    out << "certificate written to " << path.string() << '\n';
    return cert.valid ? ok : domain_failure;
}

int cmd_verify(const std::string& path, std::ostream& out, std::ostream& err) {
    Certificate cert;
    try {
        cert = certificate_from_text(read_file(path));
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& e) {
        err << path << ": " << e.what() << '\n';
        return usage;
    }
    const auto chk = verify_certificate(cert);
    for (const auto& m : chk.mismatches) out << "mismatch: " << m << '\n';
    out << "certificate " << (chk.consistent ? "consistent" : "INCONSISTENT") << ", claims "
        << (cert.valid ? "valid" : "invalid") << '\n';
    return chk.consistent && cert.valid ? ok : domain_failure;
}

int cmd_find_sigma0(const RunConfig& cfg, const std::string& out_path, std::ostream& out) {
    const auto res = find_sigma0(cfg.data, cfg.set, cfg.sigma_min, cfg.sigma_max, cfg.certify, cfg.sigma_rel_tol);
    out << "sweep:\n";
    for (const auto& p : res.sweep) out << "  sigma = " << fmt(p.sigma) << (p.valid ? "  certified" : "  -") << '\n';
    if (!res.bisection.empty()) {
        out << "bisection:\n";
        for (const auto& p : res.bisection)
            out << "  sigma = " << fmt(p.sigma) << (p.valid ? "  certified" : "  -") << '\n';
    }
    if (!res.monotone_on_grid) out << "note: certification is not monotone in sigma on the sweep grid\n";
    if (!res.message.empty()) out << res.message << '\n';
    if (!res.found) {
        out << "no certified sigma in [" << fmt(cfg.sigma_min) << ", " << fmt(cfg.sigma_max) << "]\n";
        return domain_failure;
    }
    out << "sigma0 = " << fmt(res.sigma0) << '\n';
    print_certificate_report(res.certificate, out);
    const auto path = out_path.empty() ? std::filesystem::path(cfg.output_directory) / "certificate.txt"
                                       : std::filesystem::path(out_path);
    open_output(path) << certificate_to_text(res.certificate);
    out << "certificate written to " << path.string() << '\n';
    return ok;
}

int cmd_flowline(const RunConfig& cfg, const std::string& out_path, std::ostream& out) {
    const auto& fc = cfg.flowline;
    const auto forcing = fc.theta == "constant"
                             ? FlowlineForcing::constant(fc.theta_mean)
                             : FlowlineForcing::sinusoid(fc.theta_mean, fc.theta_amplitude, fc.theta_omega,
                                                         fc.theta_phase);
    const FluidState start{fc.rho, fc.n, fc.Pi, {0.0, 0.0, 0.0}};
    FlowlineOptions fo;
    fo.rtol = fc.rtol;
    const auto path = integrate_flowline(start, cfg.set, forcing, fc.tau_max, fo);
    const auto abar = abar_bound(cfg.set, cfg.certify.abar_range_set ? cfg.certify.abar
                                                                      : AbarOptions::around(cfg.background.rho_bar));
    const double bound = abar.converged ? pi_bound(fc.Pi, abar.value) : kNaN;

    std::ofstream file;
    if (!out_path.empty()) file = open_output(out_path);
    std::ostream& csv_out = out_path.empty() ? out : file;
    CsvWriter csv(csv_out, {"tau", "rho", "n", "Pi", "e", "bound_Pi", "F"});
    for (const auto& s : path.samples) {
        const auto F = evaluate_F(cfg.set, s.rho, s.n, s.Pi, fc.n0, fc.eps);
        csv.row({s.tau, s.rho, s.n, s.Pi, s.e, bound, F.ok ? F.F : kNaN});
    }
    const auto wec = wec_propagation_check(path);
    std::ostream& report = out_path.empty() ? std::cerr : out;
    report << "flowline: " << path.samples.size() << " samples, status "
           << (path.status == FlowlineStatus::completed       ? "completed"
               : path.status == FlowlineStatus::n_floor_reached ? "n floor reached"
                                                                : "stiff failure")
           << ", min e = " << fmt(wec.min_e) << (wec.holds ? "" : " (WEC violated)") << '\n';
    if (!out_path.empty()) report << "written to " << out_path << '\n';
    return path.status == FlowlineStatus::stiff_failure ? domain_failure : ok;
}

void write_snapshot(const std::filesystem::path& file, const Grid1D& grid, const ConstitutiveSet& set,
                    const Fields& f) {
    auto os = open_output(file);
    CsvWriter csv(os, {grid.kind == GridKind::radial ? "r" : "x", "rho", "n", "Pi", "u", "cs2", "e"});
    for (int i = 0; i < grid.cells; ++i) {
        const auto s = f.at(i);
        const auto cs2 = sound_speed_sq(set, s.rho, s.n, s.Pi);
        csv.row({grid.coord(i), s.rho, s.n, s.Pi, s.u[0], cs2.value_or(kNaN), wec_value(s, set)});
    }
}

struct SimulateArgs {
    std::optional<double> t_max;
    std::optional<int> cells;
    bool serial = false;
};

int cmd_simulate(const RunConfig& cfg, const SimulateArgs& args, std::ostream& out) {
    if (auto why = cfg.data.invalid_reason()) {
        out << "data rejected: " << *why << '\n';
        return domain_failure;
    }
    const auto prep = prepare_shell_run(cfg.data, cfg.set, cfg.certify);
    for (const auto& n : prep.notes) out << "note: " << n << '\n';

    double t_max = args.t_max.value_or(cfg.t_max);
    if (!(t_max > 0.0)) {
        if (!std::isfinite(prep.T_upper)) {
            out << "no T_upper available; set [run] t_max or pass --tmax\n";
            return domain_failure;
        }
        t_max = prep.T_upper;
    }
    const int cells = args.cells.value_or(cfg.cells);
    const auto grid = Grid1D::make(cfg.mode, cells, cfg.length);
    const auto initial = initial_fields(grid, shell_profile(cfg.data, cfg.mode));
    for (int i = 0; i < grid.cells; ++i) {
        const auto chk = is_physical(initial.at(i), cfg.set, cfg.certify.delta);
        if (!chk.physical) {
            out << "initial data leaves the physical set at " << fmt(grid.coord(i)) << '\n';
            return domain_failure;
        }
    }

    RunOptions ro;
    ro.scheme = cfg.scheme;
    ro.thresholds = cfg.thresholds;
    ro.t_max = t_max;
    ro.output_interval = cfg.output_interval > 0.0 ? cfg.output_interval : 10.0 * cfg.scheme.cfl * grid.spacing;
    ro.parallel = !args.serial;
    ro.keep_snapshots = cfg.snapshots;
    const auto run = simulate(grid, cfg.set, prep.setup, initial, ro);

    const std::filesystem::path dir(cfg.output_directory);
    {
        auto os = open_output(dir / "diagnostics.csv");
        CsvWriter csv(os, diagnostics_columns());
        for (const auto& r : run.rows) csv.row(diagnostics_values(r));
    }
    double max_leak = 0.0;
    bool q_ok = true;
    {
        auto os = open_output(dir / "monitors.csv");
        CsvWriter csv(os, {"t", "leak", "q_bounds_hold", "quadratic_margin", "linear_margin"});
        for (const auto& m : run.monitors) {
            csv.row({m.t, m.leak, m.q_bounds.holds ? 1.0 : 0.0, m.q_bounds.quadratic_margin,
                     m.q_bounds.linear_margin});
            max_leak = std::max(max_leak, m.leak);
            q_ok = q_ok && m.q_bounds.holds;
        }
    }
    for (std::size_t i = 0; i < run.snapshots.size(); ++i)
        write_snapshot(dir / ("snap_" + std::to_string(i) + ".csv"), grid, cfg.set, run.snapshots[i].fields);

    const auto& b = run.breakdown;
    std::ostringstream rep;
    rep << "cells = " << grid.cells << "\nspacing = " << fmt(grid.spacing) << "\ndt = " << fmt(run.dt)
        << "\nsteps = " << run.steps << "\nt_max = " << fmt(t_max) << "\nT_upper = " << fmt(prep.T_upper)
        << "\ninitial_c1 = " << fmt(run.initial_c1) << "\nbreakdown = " << (b.triggered ? "yes" : "no") << '\n';
    if (b.triggered) {
        rep << "breakdown_time = " << fmt(b.time) << "\ncause = " << to_string(b.cause) << "\ncell = " << b.cell
            << "\ncoord = " << fmt(b.coord) << "\nvalue = " << fmt(b.value) << '\n';
    }
    rep << "pi_bound = " << fmt(prep.setup.pi_bound) << "\npi_bound_enabled = "
        << (prep.setup.pi_bound_enabled ? "true" : "false") << "\nmax_leak = " << fmt(max_leak)
        << "\nleak_within_tolerance = " << (max_leak <= cfg.leak_tol ? "true" : "false")
        << "\nq_bounds_hold = " << (q_ok ? "true" : "false") << '\n';
    if (!b.note.empty()) rep << "note = " << b.note << '\n';
    open_output(dir / "breakdown.txt") << rep.str();
    out << rep.str() << "outputs written to " << dir.string() << '\n';
    return ok;
}

int cmd_riemann(const RunConfig& cfg, std::ostream& out) {
    const auto& rc = cfg.riemann;
    const BarotropicView view(cfg.set, rc.n_ref);
    std::vector<PlanarState> states;
    auto lin = [](double a, double b, int i, int m) { return m == 1 ? a : a + (b - a) * i / (m - 1); };
    const int m = rc.samples;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                const double rho = lin(rc.rho_min, rc.rho_max, i, m);
                const double u1 = lin(-rc.u_max, rc.u_max, j, m);
                const double Pi = lin(rc.Pi_min, rc.Pi_max, k, m);
                states.push_back({rho, u1, view.pressure(rho) + Pi});
            }
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> urho(rc.rho_min, rc.rho_max), uu(-rc.u_max, rc.u_max),
        upi(rc.Pi_min, rc.Pi_max);
    for (int i = 0; i < rc.random_states; ++i) {
        const double rho = urho(rng);
        const double u1 = uu(rng);
        states.push_back({rho, u1, view.pressure(rho) + upi(rng)});
    }

    if (view.frozen_n()) out << "note: constitutive set depends on n; evaluated at n = " << fmt(rc.n_ref) << '\n';
    CsvWriter csv(out, {"rho", "u1", "q", "lambda1", "lambda2", "lambda3", "eigen_residual", "necessary_residual",
                        "curl_defect"});
    double worst_eig = 0.0, worst_curl = 0.0;
    double min_nec = std::numeric_limits<double>::infinity();
    long skipped = 0;
    for (const auto& s : states) {
        double eig = kNaN;
        Vec3 lam{kNaN, kNaN, kNaN};
        try {
            const auto es = eigensystem(view, s);
            lam = es.lambdas;
            eig = eigen_residual(view, s);
        } catch (const std::domain_error&) {
            ++skipped;
        }
        const double nec = necessary_condition_residual(view, s.rho, s.q).value_or(kNaN);
        const double curl = curl_obstruction(view, {s});
        csv.row({s.rho, s.u1, s.q, lam[0], lam[1], lam[2], eig, nec, curl});
        if (std::isfinite(eig)) worst_eig = std::max(worst_eig, eig);
        if (std::isfinite(nec)) min_nec = std::min(min_nec, std::abs(nec));
        if (std::isfinite(curl)) worst_curl = std::max(worst_curl, curl);
    }
    out << "# states = " << states.size() << ", skipped = " << skipped << '\n';
    out << "# max eigen residual = " << fmt(worst_eig) << '\n';
    out << "# min |necessary residual| = " << fmt(min_nec) << '\n';
    out << "# max curl defect = " << fmt(worst_curl) << '\n';
    out << "# Riemann invariants " << (worst_curl > 0.0 ? "obstructed" : "not obstructed") << " on this grid\n";
    return ok;
}

}  // namespace

Profile shell_profile(const ShellData& data, GridKind mode) {
    if (mode == GridKind::radial) return [data](double r) { return data.state_at(r); };
    return [data](double x) {
        auto s = data.state_at(std::abs(x));
        if (x < 0.0) s.u[0] = -s.u[0];
        return s;
    };
}

PreparedRun prepare_shell_run(const ShellData& data, const ConstitutiveSet& set, const CertifyOptions& opts) {
    PreparedRun prep;
    auto& st = prep.setup;
    st.background = data.background;
    st.R0 = data.R0;
    st.c = data.background.sound_speed(set);
    prep.T_upper = kNaN;
    if (st.c > 0.0 && st.c < 1.0) {
        const auto mu = mu_for_c(st.c, opts.mu_margin);
        if (mu.ok) prep.T_upper = (mu.mu - 1.0) * data.R0 / st.c;
    } else {
        prep.notes.push_back("background sound speed " + fmt(st.c) + " is not in (0, 1)");
        st.c = 1.0;
    }

    AbarOptions ao = opts.abar;
    if (!opts.abar_range_set) {
        const auto around = AbarOptions::around(data.background.rho_bar);
        ao.rho_min = around.rho_min;
        ao.rho_max = around.rho_max;
    }
    const auto abar = abar_bound(set, ao);
    if (abar.converged) {
        st.pi_bound = pi_bound(data.pi_sup(), abar.value);
        st.pi_bound_enabled = true;
        st.b = constants_bk(set, data.background, data.pi_sup(), abar.value).b;
    } else {
        st.pi_bound_enabled = false;
        st.b = std::numeric_limits<double>::infinity();
        prep.notes.push_back("integrability constant diverges; Pi bound and Q bounds not monitored");
    }
    return prep;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bulk-viscous relativistic fluid solver and blowup certifier", "mis"};
    app.require_subcommand(1);
    app.fallthrough(false);

    std::string config;
    std::string output;
    std::string verify;
    std::optional<double> sigma;
    SimulateArgs sim;

    auto* v = app.add_subcommand("validate-eos", "Check the constitutive assumptions on a sample grid");
    v->add_option("-c,--config", config, "configuration file")->required();

    auto* c = app.add_subcommand("certify", "Evaluate the breakdown conditions for the configured data");
    c->add_option("-c,--config", config, "configuration file");
    c->add_option("-o,--output", output, "certificate path (default <output.directory>/certificate.txt)");
    c->add_option("--sigma", sigma, "override [data] sigma");
    c->add_option("--verify-certificate", verify, "re-check an existing certificate file");

    auto* f = app.add_subcommand("find-sigma0", "Smallest certified velocity amplitude");
    f->add_option("-c,--config", config, "configuration file")->required();
    f->add_option("-o,--output", output, "certificate path");

    auto* l = app.add_subcommand("flowline", "Integrate the transport system along one flow line");
    l->add_option("-c,--config", config, "configuration file")->required();
    l->add_option("-o,--output", output, "CSV path (default stdout)");

    auto* s = app.add_subcommand("simulate", "Evolve the shell data and monitor breakdown");
    s->add_option("-c,--config", config, "configuration file")->required();
    s->add_option("--tmax", sim.t_max, "final time (default [run] t_max, else T_upper)");
    s->add_option("--cells", sim.cells, "override [grid] cells")->check(CLI::Range(8, 100000000));
    s->add_flag("--serial", sim.serial, "use the serial reference kernel");

    auto* r = app.add_subcommand("riemann-check", "Eigen-structure and Riemann-invariant obstruction table");
    r->add_option("-c,--config", config, "configuration file")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return usage;
    }

    try {
        if (c->parsed()) {
            if (!verify.empty()) return cmd_verify(verify, out, err);
            if (config.empty()) {
                err << "error: certify needs --config or --verify-certificate\n";
                return usage;
            }
            return cmd_certify(load(config), output, sigma, out);
        }
        const auto cfg = load(config);
        if (v->parsed()) return cmd_validate_eos(cfg, out);
        if (f->parsed()) return cmd_find_sigma0(cfg, output, out);
        if (l->parsed()) return cmd_flowline(cfg, output, out);
        if (s->parsed()) return cmd_simulate(cfg, sim, out);
        if (r->parsed()) return cmd_riemann(cfg, out);
    } catch (const ConfigParseError& e) {
        for (const auto& ce : e.errors())
            err << config << (ce.line > 0 ? ":" + std::to_string(ce.line) : std::string{}) << ": " << ce.message
                << '\n';
        return usage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    }
    err << app.help();
    return usage;
}

}  // namespace mis::cli
