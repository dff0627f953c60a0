#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mis/cli.hpp"

using namespace mis;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream o, e;
    const int code = cli::dispatch(args, o, e);
    return {code, o.str(), e.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch() {
    const auto dir = fs::temp_directory_path() / "mis_cli_test";
    fs::create_directories(dir);
    return dir;
}

fs::path shell_config(const std::string& out_dir, const std::string& extra = "") {
    const auto path = scratch() / ("shell_" + fs::path(out_dir).filename().string() + ".cfg");
    std::ofstream(path) << slurp(fs::path(MIS_SOURCE_DIR) / "configs" / "shell.cfg") << "\n[run]\nseed = 3\n"
                        << extra;
    // redirect output
    auto text = slurp(path);
    const auto pos = text.find("directory = ");
    text.replace(pos, text.find('\n', pos) - pos, "directory = " + out_dir);
    std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST_CASE("usage errors exit 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"certify"}).code == 2);
    CHECK(run({"simulate"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("config errors exit 2 with line numbers") {
    const auto path = scratch() / "bad.cfg";
    std::ofstream(path) << "[eos]\nmodel = ideal_gas\ngamma_adx = 2\n[background]\nrho = 1\nn = 1\n";
    const auto r = run({"certify", "--config", path.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find(":3: unknown key 'gamma_adx'") != std::string::npos);
    CHECK(run({"certify", "--config", (scratch() / "absent.cfg").string()}).code == 2);
}

TEST_CASE("certify writes a certificate that verifies") {
    const auto out = (scratch() / "cert").string();
    const auto cfg = shell_config(out);
    const auto r = run({"certify", "--config", cfg.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("VALID") != std::string::npos);
    const auto cert = fs::path(out) / "certificate.txt";
    REQUIRE(fs::exists(cert));
    CHECK(run({"certify", "--verify-certificate", cert.string()}).code == 0);

    // tampered certificate fails the re-check
    auto text = slurp(cert);
    const auto pos = text.find("\nb = ");
    text.insert(pos + 5, "1");
    const auto bad = scratch() / "tampered.txt";
    std::ofstream(bad) << text;
    CHECK(run({"certify", "--verify-certificate", bad.string()}).code == 1);

    // invalid certificate is a domain failure
    CHECK(run({"certify", "--config", cfg.string(), "--sigma", "1"}).code == 1);
}

TEST_CASE("simulate writes diagnostics and a breakdown report, deterministically") {
    const auto out_a = (scratch() / "sim_a").string();
    const auto out_b = (scratch() / "sim_b").string();
    const auto cfg_a = shell_config(out_a);
    const auto cfg_b = shell_config(out_b);
    const auto r = run({"simulate", "--config", cfg_a.string(), "--tmax", "0.02", "--cells", "400"});
    CHECK(r.code == 0);
    CHECK(r.out.find("breakdown = ") != std::string::npos);
    REQUIRE(fs::exists(fs::path(out_a) / "diagnostics.csv"));
    CHECK(slurp(fs::path(out_a) / "diagnostics.csv").rfind("t,E,I,Q,T_kin,virial_residual,Idot_minus_Q", 0) == 0);
    CHECK(fs::exists(fs::path(out_a) / "breakdown.txt"));
    CHECK(fs::exists(fs::path(out_a) / "monitors.csv"));

    CHECK(run({"simulate", "--config", cfg_b.string(), "--tmax", "0.02", "--cells", "400", "--serial"}).code == 0);
    CHECK(slurp(fs::path(out_a) / "diagnostics.csv") == slurp(fs::path(out_b) / "diagnostics.csv"));
    CHECK(slurp(fs::path(out_a) / "monitors.csv") == slurp(fs::path(out_b) / "monitors.csv"));
}

TEST_CASE("snapshots and non-integrable viscosity") {
    const auto path = scratch() / "const_zeta.cfg";
    const auto out = scratch() / "const_zeta";
    std::ofstream(path) << "[eos]\nmodel = ideal_gas\ngamma = 1.3333333333333333\nmass = 0\n"
                           "[transport]\nzeta = constant\nzeta_value = 0.01\n"
                           "[background]\nrho = 1\nn = 1\n[data]\nsigma = 0.01\n"
                           "[grid]\ncells = 100\n[run]\nt_max = 0.05\n[output]\nsnapshots = true\ndirectory = "
                        << out.string() << "\n";
    const auto r = run({"simulate", "--config", path.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("pi_bound_enabled = false") != std::string::npos);
    CHECK(r.out.find("Pi bound monitor disabled") != std::string::npos);
    CHECK(fs::exists(out / "snap_0.csv"));
    CHECK(slurp(out / "snap_0.csv").rfind("r,rho,n,Pi,u,cs2,e\n", 0) == 0);
}

TEST_CASE("flowline, validate-eos and riemann-check") {
    const auto out = (scratch() / "misc").string();
    const auto cfg = shell_config(out);
    const auto csv = scratch() / "flow.csv";
    CHECK(run({"flowline", "--config", cfg.string(), "--output", csv.string()}).code == 0);
    CHECK(slurp(csv).rfind("tau,rho,n,Pi,e,bound_Pi,F\n", 0) == 0);

    const auto v = run({"validate-eos", "--config", cfg.string()});
    CHECK((v.code == 0 || v.code == 1));
    CHECK(v.out.find("result: ") != std::string::npos);

    const auto r = run({"riemann-check", "--config", cfg.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("curl_defect") != std::string::npos);
    CHECK(r.out.find("obstructed") != std::string::npos);
}
