#include "mis/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "mis/io.hpp"

namespace mis {

namespace {

std::string join_errors(const std::vector<ConfigError>& errors) {
    std::ostringstream os;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (i) os << '\n';
        if (errors[i].line > 0) os << "line " << errors[i].line << ": ";
        os << errors[i].message;
    }
    return os.str();
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

struct Range {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool lo_open = false;
    bool hi_open = false;

    static Range positive() { return {0.0, std::numeric_limits<double>::infinity(), true, false}; }
    static Range nonnegative() { return {0.0, std::numeric_limits<double>::infinity(), false, false}; }
    static Range open(double a, double b) { return {a, b, true, true}; }

    bool contains(double v) const {
        const bool lo_ok = lo_open ? v > lo : v >= lo;
        const bool hi_ok = hi_open ? v < hi : v <= hi;
        return lo_ok && hi_ok;
    }
    std::string describe() const {
        std::string s;
        if (std::isfinite(lo)) s += (lo_open ? "> " : ">= ") + format_double(lo);
        if (std::isfinite(hi)) s += std::string(s.empty() ? "" : " and ") + (hi_open ? "< " : "<= ") + format_double(hi);
        return s;
    }
};

const std::map<std::string, std::vector<std::string>>& schema() {
    static const std::map<std::string, std::vector<std::string>> s{
        {"eos", {"model", "gamma", "mass", "w", "value", "table", "p0", "p1"}},
        {"transport",
         {"zeta", "zeta_value", "zeta0", "zeta_power", "zeta_n_scale", "zeta_rho_scale", "tau0", "tau0_value",
          "tau0_power", "lambda", "table"}},
        {"background", {"rho", "n"}},
        {"data",
         {"R0", "ell", "sigma", "smooth_w", "rho_contrast", "n_contrast", "Pi_shell", "perturbation"}},
        {"grid", {"mode", "cells", "length", "cfl", "dissipation"}},
        {"thresholds", {"grad_factor", "grad_max", "delta", "leak_tol", "physical_delta"}},
        {"output", {"directory", "interval", "snapshots"}},
        {"run", {"t_max", "seed"}},
        {"certify", {"mu_margin", "sigma_min", "sigma_max", "rel_tol", "abar_rho_min", "abar_rho_max"}},
        {"flowline",
         {"rho", "n", "Pi", "tau_max", "theta", "theta_mean", "theta_amplitude", "theta_omega", "theta_phase", "eps",
          "n0", "rtol"}},
        {"riemann", {"n_ref", "rho_min", "rho_max", "u_max", "Pi_min", "Pi_max", "samples", "random_states"}},
        {"validation",
         {"rho_min", "rho_max", "n_min", "n_max", "rho_count", "n_count", "pi_values", "extension_rho_min",
          "tau0_floor", "lipschitz_bound", "transport_gradient_bound", "delta"}},
    };
    return s;
}

class Binder {
public:
    Binder(const IniDocument& doc, std::vector<ConfigError>& errors) : doc_(doc), errors_(errors) {}

    const IniEntry* find(const std::string& sec, const std::string& key) {
        used_[sec].insert(key);
        const auto s = doc_.sections.find(sec);
        if (s == doc_.sections.end()) return nullptr;
        const auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    }

    bool has(const std::string& sec, const std::string& key) {
        const auto s = doc_.sections.find(sec);
        return s != doc_.sections.end() && s->second.count(key);
    }

    bool has_section(const std::string& sec) const { return doc_.sections.count(sec) > 0; }

    int section_line(const std::string& sec) const {
        const auto it = doc_.section_lines.find(sec);
        return it == doc_.section_lines.end() ? 0 : it->second;
    }

    double num(const std::string& sec, const std::string& key, double def, Range range = {}) {
        const auto* e = find(sec, key);
        if (!e) return def;
        const auto v = parse_double(e->value);
        if (!v || !std::isfinite(*v)) {
            error(e->line, "[" + sec + "] " + key + ": expected a finite number, got '" + e->value + "'");
            return def;
        }
        if (!range.contains(*v)) {
            error(e->line, "[" + sec + "] " + key + " = " + e->value + " is out of range (must be " +
                               range.describe() + ")");
            return def;
        }
        return *v;
    }

    long integer(const std::string& sec, const std::string& key, long def, long lo, long hi) {
        const auto* e = find(sec, key);
        if (!e) return def;
        long v = 0;
        std::istringstream is(e->value);
        if (!(is >> v) || !is.eof()) {
            error(e->line, "[" + sec + "] " + key + ": expected an integer, got '" + e->value + "'");
            return def;
        }
        if (v < lo || v > hi) {
            error(e->line, "[" + sec + "] " + key + " = " + e->value + " is out of range (must be in [" +
                               std::to_string(lo) + ", " + std::to_string(hi) + "])");
            return def;
        }
        return v;
    }

    std::string word(const std::string& sec, const std::string& key, const std::string& def,
                     const std::vector<std::string>& choices) {
        const auto* e = find(sec, key);
        if (!e) return def;
        if (!choices.empty() && std::find(choices.begin(), choices.end(), e->value) == choices.end()) {
            std::string msg = "[" + sec + "] " + key + ": unknown value '" + e->value + "'";
            const auto s = suggest(e->value, choices);
            msg += s.empty() ? " (expected one of:" : " (did you mean '" + s + "'? expected one of:";
            for (const auto& c : choices) msg += " " + c;
            msg += ")";
            error(e->line, msg);
            return def;
        }
        return e->value;
    }

    std::string text(const std::string& sec, const std::string& key, const std::string& def) {
        const auto* e = find(sec, key);
        return e ? e->value : def;
    }

    bool flag(const std::string& sec, const std::string& key, bool def) {
        const auto* e = find(sec, key);
        if (!e) return def;
        if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
        if (e->value == "false" || e->value == "no" || e->value == "0") return false;
        error(e->line, "[" + sec + "] " + key + ": expected true or false, got '" + e->value + "'");
        return def;
    }

    /// Keys that are valid in general but meaningless for the chosen model.
    void reject_unless_used(const std::string& sec, const std::vector<std::string>& keys, const std::string& why) {
        for (const auto& k : keys) {
            if (used_[sec].count(k)) continue;
            used_[sec].insert(k);
            if (const auto* e = lookup(sec, k)) error(e->line, "[" + sec + "] " + k + " does not apply " + why);
        }
    }

    void error(int line, std::string msg) { errors_.push_back({line, std::move(msg)}); }

    void finish() {
        const auto& known = schema();
        for (const auto& [sec, keys] : doc_.sections) {
            const auto ks = known.find(sec);
            if (ks == known.end()) {
                std::vector<std::string> names;
                for (const auto& [n, _] : known) names.push_back(n);
                const auto s = suggest(sec, names);
                error(section_line(sec),
                      "unknown section [" + sec + "]" + (s.empty() ? "" : " (did you mean [" + s + "]?)"));
                continue;
            }
            for (const auto& [key, entry] : keys) {
                if (std::find(ks->second.begin(), ks->second.end(), key) != ks->second.end()) continue;
                const auto s = suggest(key, ks->second);
                error(entry.line,
                      "unknown key '" + key + "' in [" + sec + "]" + (s.empty() ? "" : " (did you mean '" + s + "'?)"));
            }
        }
    }

private:
    const IniEntry* lookup(const std::string& sec, const std::string& key) const {
        const auto s = doc_.sections.find(sec);
        if (s == doc_.sections.end()) return nullptr;
        const auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    }

    const IniDocument& doc_;
    std::vector<ConfigError>& errors_;
    std::map<std::string, std::set<std::string>> used_;
};

std::string resolve(const std::string& base_dir, const std::string& path) {
    const std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(base_dir) / p).string();
}

void bind_eos(Binder& b, RunConfig& cfg, const std::string& base_dir) {
    const auto model = b.word("eos", "model", "ideal_gas", {"ideal_gas", "linear", "constant", "table"});
    if (model == "ideal_gas") {
        IdealGasEos e;
        e.gamma = b.num("eos", "gamma", e.gamma, {1.0, 2.0, true, false});
        e.mass = b.num("eos", "mass", e.mass, Range::nonnegative());
        cfg.set.eos = e;
    } else if (model == "linear") {
        cfg.set.eos = LinearEos{b.num("eos", "w", 1.0 / 3.0, {-1.0, 1.0, false, false})};
    } else if (model == "constant") {
        cfg.set.eos = ConstantEos{b.num("eos", "value", 0.0)};
    } else {
        const auto* e = b.find("eos", "table");
        if (!e) {
            b.error(b.section_line("eos"), "[eos] model = table requires a 'table' path");
        } else {
            try {
                const auto cols = read_table(resolve(base_dir, e->value), 2);
                cfg.set.eos = TabulatedEos{MonotoneCubic(cols[0], cols[1]), e->value};
            } catch (const std::exception& ex) {
                b.error(e->line, std::string("[eos] table: ") + ex.what());
            }
        }
    }
    b.reject_unless_used("eos", {"gamma", "mass", "w", "value", "table"}, "to [eos] model = " + model);
    cfg.set.p0 = b.num("eos", "p0", 0.0, Range::nonnegative());
    cfg.set.p1 = b.num("eos", "p1", 0.0, Range::nonnegative());
}

void bind_transport(Binder& b, RunConfig& cfg, const std::string& base_dir) {
    const auto zeta = b.word("transport", "zeta", "constant", {"constant", "power_exp", "table"});
    const auto tau0 = b.word("transport", "tau0", "constant", {"constant", "power_law", "table"});

    std::vector<std::vector<double>> table;
    if (zeta == "table" || tau0 == "table") {
        const auto* e = b.find("transport", "table");
        if (!e) {
            b.error(b.section_line("transport"), "[transport] tabulated zeta or tau0 requires a 'table' path");
        } else {
            try {
                table = read_table(resolve(base_dir, e->value), 3);
            } catch (const std::exception& ex) {
                b.error(e->line, std::string("[transport] table: ") + ex.what());
            }
        }
    }
    const std::string source = b.text("transport", "table", "");

    if (zeta == "constant") {
        cfg.set.zeta_model = ConstantZeta{b.num("transport", "zeta_value", 0.0, Range::nonnegative())};
    } else if (zeta == "power_exp") {
        PowerExpZeta z;
        z.zeta0 = b.num("transport", "zeta0", 1.0, Range::nonnegative());
        z.power = b.num("transport", "zeta_power", 0.0);
        z.n_scale = b.num("transport", "zeta_n_scale", 0.0, Range::nonnegative());
        z.rho_scale = b.num("transport", "zeta_rho_scale", 0.0, Range::nonnegative());
        cfg.set.zeta_model = z;
    } else if (!table.empty()) {
        cfg.set.zeta_model = TabulatedZeta{MonotoneCubic(table[0], table[1]), source};
    }

    if (tau0 == "constant") {
        cfg.set.tau0_model = ConstantTau0{b.num("transport", "tau0_value", 1.0, Range::positive())};
    } else if (tau0 == "power_law") {
        PowerLawTau0 t;
        t.tau0 = b.num("transport", "tau0_value", 1.0, Range::positive());
        t.power = b.num("transport", "tau0_power", 0.0);
        cfg.set.tau0_model = t;
    } else if (!table.empty()) {
        cfg.set.tau0_model = TabulatedTau0{MonotoneCubic(table[0], table[2]), source};
    }
    b.reject_unless_used("transport",
                         {"zeta_value", "zeta0", "zeta_power", "zeta_n_scale", "zeta_rho_scale", "tau0_value",
                          "tau0_power", "table"},
                         "to the selected zeta/tau0 models");
    cfg.set.lambda_model = ConstantLambda{b.num("transport", "lambda", 0.0, Range::nonnegative())};
}

}  // namespace

ConfigParseError::ConfigParseError(std::vector<ConfigError> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

std::string suggest(const std::string& word, const std::vector<std::string>& candidates) {
    std::string best;
    std::size_t best_d = std::numeric_limits<std::size_t>::max();
    for (const auto& c : candidates) {
        auto d = edit_distance(word, c);
        const bool prefix = std::min(word.size(), c.size()) >= 3 &&
                            (word.rfind(c, 0) == 0 || c.rfind(word, 0) == 0);
        if (prefix) d = std::min<std::size_t>(d, 1);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    const std::size_t limit = std::max<std::size_t>(2, word.size() / 3);
    return best_d <= limit ? best : std::string{};
}

IniDocument parse_ini(const std::string& text) {
    IniDocument doc;
    std::vector<ConfigError> errors;
    std::istringstream is(text);
    std::string raw;
    std::string section;
    int lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back({lineno, "malformed section header '" + std::string(line) + "'"});
                continue;
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section.empty()) {
                errors.push_back({lineno, "empty section name"});
            } else if (doc.section_lines.count(section)) {
                errors.push_back({lineno, "section [" + section + "] repeated (first at line " +
                                              std::to_string(doc.section_lines[section]) + ")"});
            } else {
                doc.section_lines[section] = lineno;
                doc.sections[section];
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            errors.push_back({lineno, "expected 'key = value', got '" + std::string(line) + "'"});
            continue;
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (section.empty()) {
            errors.push_back({lineno, "key '" + key + "' appears before any [section]"});
            continue;
        }
        if (key.empty() || value.empty()) {
            errors.push_back({lineno, "empty key or value"});
            continue;
        }
        auto& sec = doc.sections[section];
        if (const auto it = sec.find(key); it != sec.end()) {
            errors.push_back({lineno, "duplicate key '" + key + "' in [" + section + "] (first at line " +
                                          std::to_string(it->second.line) + ")"});
            continue;
        }
        sec[key] = {value, lineno};
    }
    if (!errors.empty()) throw ConfigParseError(std::move(errors));
    return doc;
}

RunConfig parse_config_text(const std::string& text, const std::string& base_dir) {
    const auto doc = parse_ini(text);
    std::vector<ConfigError> errors;
    Binder b(doc, errors);
    RunConfig cfg;

    for (const char* required : {"eos", "background"}) {
        if (!b.has_section(required)) errors.push_back({0, std::string("missing required section [") + required + "]"});
    }

    bind_eos(b, cfg, base_dir);
    bind_transport(b, cfg, base_dir);

    cfg.background.rho_bar = b.num("background", "rho", 1.0, Range::positive());
    cfg.background.n_bar = b.num("background", "n", 1.0, Range::positive());

    auto& d = cfg.data;
    d.background = cfg.background;
    d.R0 = b.num("data", "R0", 1.0, Range::positive());
    d.ell = b.num("data", "ell", 0.5, Range::positive());
    d.sigma = b.num("data", "sigma", 1.0, Range::nonnegative());
    d.smooth_w = b.num("data", "smooth_w", d.ell / 10.0, Range::nonnegative());
    d.rho_contrast = b.num("data", "rho_contrast", 1.0, Range::positive());
    d.n_contrast = b.num("data", "n_contrast", 1.0, Range::positive());
    d.Pi_shell = b.num("data", "Pi_shell", 0.0);
    d.perturbation = b.num("data", "perturbation", 0.0);
    if (b.has_section("data")) {
        if (const auto why = d.invalid_reason()) b.error(b.section_line("data"), "[data] " + *why);
    }

    cfg.mode = b.word("grid", "mode", "radial", {"radial", "planar"}) == "planar" ? GridKind::planar : GridKind::radial;
    cfg.cells = static_cast<int>(b.integer("grid", "cells", 2000, 8, 10'000'000));
    cfg.length = b.num("grid", "length", 1.2, Range::positive());
    cfg.scheme.cfl = b.num("grid", "cfl", 0.4, {0.0, 1.0, true, false});
    cfg.scheme.dissipation = b.num("grid", "dissipation", 0.05, {0.0, 1.0, false, false});
    if (b.has("grid", "length") && cfg.length <= d.R0) {
        b.error(b.find("grid", "length")->line, "[grid] length must exceed the data radius R0");
    }

    cfg.thresholds.grad_factor = b.num("thresholds", "grad_factor", 1e3, {1.0, 1e300, true, false});
    cfg.thresholds.grad_max = b.num("thresholds", "grad_max", 0.0, Range::nonnegative());
    cfg.thresholds.delta = b.num("thresholds", "delta", 1e-6, Range::nonnegative());
    cfg.leak_tol = b.num("thresholds", "leak_tol", 1e-6, Range::nonnegative());
    cfg.certify.delta = b.num("thresholds", "physical_delta", 1e-10, Range::nonnegative());

    cfg.output_directory = b.text("output", "directory", "out");
    cfg.output_interval = b.num("output", "interval", 0.0, Range::nonnegative());
    cfg.snapshots = b.flag("output", "snapshots", false);

    cfg.t_max = b.num("run", "t_max", 0.0, Range::nonnegative());
    cfg.seed = static_cast<std::uint64_t>(b.integer("run", "seed", 1, 0, std::numeric_limits<long>::max()));

    cfg.certify.mu_margin = b.num("certify", "mu_margin", 0.05, Range::positive());
    cfg.sigma_min = b.num("certify", "sigma_min", 0.25, Range::positive());
    cfg.sigma_max = b.num("certify", "sigma_max", 1e6, Range::positive());
    cfg.sigma_rel_tol = b.num("certify", "rel_tol", 0.01, Range::open(0.0, 1.0));
    if (b.has("certify", "abar_rho_min") || b.has("certify", "abar_rho_max")) {
        const auto around = AbarOptions::around(cfg.background.rho_bar);
        cfg.certify.abar.rho_min = b.num("certify", "abar_rho_min", around.rho_min);
        cfg.certify.abar.rho_max = b.num("certify", "abar_rho_max", around.rho_max);
        cfg.certify.abar_range_set = true;
        if (!(cfg.certify.abar.rho_min < cfg.certify.abar.rho_max))
            b.error(b.section_line("certify"), "[certify] abar_rho_min must be below abar_rho_max");
    }
    if (cfg.sigma_min > cfg.sigma_max) b.error(b.section_line("certify"), "[certify] sigma_min exceeds sigma_max");

    auto& fl = cfg.flowline;
    fl.rho = b.num("flowline", "rho", cfg.background.rho_bar);
    fl.n = b.num("flowline", "n", cfg.background.n_bar, Range::positive());
    fl.Pi = b.num("flowline", "Pi", 0.0);
    fl.tau_max = b.num("flowline", "tau_max", 5.0, Range::positive());
    fl.theta = b.word("flowline", "theta", "sinusoid", {"constant", "sinusoid"});
    fl.theta_mean = b.num("flowline", "theta_mean", 0.2);
    fl.theta_amplitude = b.num("flowline", "theta_amplitude", fl.theta == "constant" ? 0.0 : 0.5);
    fl.theta_omega = b.num("flowline", "theta_omega", 2.0);
    fl.theta_phase = b.num("flowline", "theta_phase", 0.0);
    fl.eps = b.num("flowline", "eps", 1e-3, Range::positive());
    fl.n0 = b.num("flowline", "n0", cfg.background.n_bar, Range::positive());
    fl.rtol = b.num("flowline", "rtol", 1e-9, Range::open(0.0, 1.0));

    auto& rc = cfg.riemann;
    rc.n_ref = b.num("riemann", "n_ref", 1.0, Range::positive());
    rc.rho_min = b.num("riemann", "rho_min", 0.5, Range::positive());
    rc.rho_max = b.num("riemann", "rho_max", 5.0, Range::positive());
    rc.u_max = b.num("riemann", "u_max", 2.0, Range::nonnegative());
    rc.Pi_min = b.num("riemann", "Pi_min", -0.1);
    rc.Pi_max = b.num("riemann", "Pi_max", 0.1);
    rc.samples = static_cast<int>(b.integer("riemann", "samples", 5, 1, 1000));
    rc.random_states = static_cast<int>(b.integer("riemann", "random_states", 0, 0, 10'000'000));
    if (rc.rho_min > rc.rho_max) b.error(b.section_line("riemann"), "[riemann] rho_min exceeds rho_max");
    if (rc.Pi_min > rc.Pi_max) b.error(b.section_line("riemann"), "[riemann] Pi_min exceeds Pi_max");

    auto& v = cfg.validation;
    v.rho_min = b.num("validation", "rho_min", v.rho_min, Range::positive());
    v.rho_max = b.num("validation", "rho_max", v.rho_max, Range::positive());
    v.n_min = b.num("validation", "n_min", v.n_min, Range::positive());
    v.n_max = b.num("validation", "n_max", v.n_max, Range::positive());
    v.rho_count = static_cast<int>(b.integer("validation", "rho_count", v.rho_count, 2, 100000));
    v.n_count = static_cast<int>(b.integer("validation", "n_count", v.n_count, 2, 100000));
    if (const auto* e = b.find("validation", "pi_values")) {
        std::vector<double> values;
        std::istringstream is(e->value);
        std::string tok;
        bool ok = true;
        while (std::getline(is, tok, ',')) {
            const auto x = parse_double(tok);
            if (!x) ok = false;
            else values.push_back(*x);
        }
        if (!ok || values.empty()) b.error(e->line, "[validation] pi_values: expected comma-separated numbers");
        else v.pi_values = values;
    }
    v.extension_rho_min = b.num("validation", "extension_rho_min", v.extension_rho_min);
    v.tau0_floor = b.num("validation", "tau0_floor", v.tau0_floor, Range::positive());
    v.lipschitz_bound = b.num("validation", "lipschitz_bound", v.lipschitz_bound, Range::positive());
    v.transport_gradient_bound =
        b.num("validation", "transport_gradient_bound", v.transport_gradient_bound, Range::positive());
    v.delta = b.num("validation", "delta", v.delta, Range::nonnegative());
    if (v.rho_min >= v.rho_max) b.error(b.section_line("validation"), "[validation] rho_min must be below rho_max");
    if (v.n_min >= v.n_max) b.error(b.section_line("validation"), "[validation] n_min must be below n_max");

    b.finish();
    if (!errors.empty()) {
        std::stable_sort(errors.begin(), errors.end(),
                         [](const ConfigError& a, const ConfigError& c) { return a.line < c.line; });
        throw ConfigParseError(std::move(errors));
    }
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigParseError({{0, "cannot open config file '" + path + "'"}});
    std::stringstream ss;
    ss << in.rdbuf();
    auto base = std::filesystem::path(path).parent_path().string();
    if (base.empty()) base = ".";
    auto cfg = parse_config_text(ss.str(), base);
    cfg.source = path;
    return cfg;
}

}  // namespace mis
