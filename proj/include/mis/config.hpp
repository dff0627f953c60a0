#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mis/certifier.hpp"
#include "mis/constitutive.hpp"
#include "mis/flowline.hpp"
#include "mis/solver.hpp"
#include "mis/state.hpp"

namespace mis {

struct ConfigError {
    int line = 0;  // 0 when the error is not tied to a line
    std::string message;
};

class ConfigParseError : public std::runtime_error {
public:
    explicit ConfigParseError(std::vector<ConfigError> errors);
    const std::vector<ConfigError>& errors() const { return errors_; }

private:
    std::vector<ConfigError> errors_;
};

/// Raw `[section]` / `key = value` document. Keys keep their line numbers.
struct IniEntry {
    std::string value;
    int line = 0;
};

struct IniDocument {
    std::map<std::string, std::map<std::string, IniEntry>> sections;
    std::map<std::string, int> section_lines;
};

/// Syntax-level parse; collects every malformed line before throwing.
IniDocument parse_ini(const std::string& text);

/// Closest candidate by edit distance, empty when nothing is close.
std::string suggest(const std::string& word, const std::vector<std::string>& candidates);

struct FlowlineConfig {
    double rho = 1.0, n = 0.5, Pi = 0.0;
    double tau_max = 5.0;
    std::string theta = "sinusoid";  // constant | sinusoid
    double theta_mean = 0.2, theta_amplitude = 0.5, theta_omega = 2.0, theta_phase = 0.0;
    double eps = 1e-3;
    double n0 = 0.0;  // 0 uses the background n
    double rtol = 1e-9;
};

struct RiemannConfig {
    double n_ref = 1.0;
    double rho_min = 0.5, rho_max = 5.0;
    double u_max = 2.0;
    double Pi_min = -0.1, Pi_max = 0.1;
    int samples = 5;         // per axis of the state grid
    int random_states = 0;   // extra uniformly sampled states, seeded
};

struct RunConfig {
    std::string source;
    ConstitutiveSet set;
    SampleSpec validation;
    ConstantState background;
    ShellData data;

    GridKind mode = GridKind::radial;
    int cells = 2000;
    double length = 1.2;
    SchemeOptions scheme;
    BreakdownThresholds thresholds;
    double leak_tol = 1e-6;

    std::string output_directory = "out";
    double output_interval = 0.0;  // 0 means 10 time steps
    bool snapshots = false;

    double t_max = 0.0;  // 0 uses T_upper from the certificate
    std::uint64_t seed = 1;

    CertifyOptions certify;
    double sigma_min = 0.25, sigma_max = 1e6, sigma_rel_tol = 0.01;

    FlowlineConfig flowline;
    RiemannConfig riemann;
};

/// Throws ConfigParseError listing every problem found.
RunConfig parse_config_text(const std::string& text, const std::string& base_dir = ".");
RunConfig parse_config(const std::string& path);

}  // namespace mis
