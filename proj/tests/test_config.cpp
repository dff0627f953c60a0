#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "mis/config.hpp"

using namespace mis;

namespace {

const char* minimal = "[eos]\nmodel = ideal_gas\n\n[background]\nrho = 1\nn = 1\n";

std::vector<ConfigError> errors_of(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigParseError& e) {
        return e.errors();
    }
    return {};
}

}  // namespace

TEST_CASE("minimal config loads with defaults") {
    const auto cfg = parse_config_text(minimal);
    CHECK(std::holds_alternative<IdealGasEos>(cfg.set.eos));
    CHECK(std::get<IdealGasEos>(cfg.set.eos).gamma == doctest::Approx(5.0 / 3.0));
    CHECK(cfg.set.zeta_vanishes());
    CHECK(cfg.cells == 2000);
    CHECK(cfg.mode == GridKind::radial);
    CHECK(cfg.data.smooth_w == doctest::Approx(cfg.data.ell / 10.0));
    CHECK(cfg.scheme.cfl == 0.4);
}

TEST_CASE("negative sigma is a range error naming the key") {
    const auto errs = errors_of(std::string(minimal) + "[data]\nsigma = -1\n");
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].line == 8);
    CHECK(errs[0].message.find("sigma") != std::string::npos);
}

TEST_CASE("unknown key is rejected with a suggestion") {
    const auto errs = errors_of("[eos]\nmodel = ideal_gas\ngamma_adx = 1.4\n[background]\nrho = 1\nn = 1\n");
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].line == 3);
    CHECK(errs[0].message.find("did you mean 'gamma'") != std::string::npos);
}

TEST_CASE("every problem is reported, with line numbers") {
    const auto errs = errors_of("[eos]\nmodel = ideal_gaz\n[grid]\ncells = many\nmode = sphere\n[bogus]\nx = 1\n");
    // model, cells, mode, unknown section, missing [background]
    CHECK(errs.size() == 5);
    bool missing = false, section = false;
    for (const auto& e : errs) {
        missing = missing || e.message.find("[background]") != std::string::npos;
        section = section || e.message.find("unknown section [bogus]") != std::string::npos;
    }
    CHECK(missing);
    CHECK(section);
}

TEST_CASE("syntax errors") {
    CHECK_THROWS_AS(parse_ini("[eos\n"), ConfigParseError);
    CHECK_THROWS_AS(parse_ini("key = 1\n"), ConfigParseError);
    CHECK_THROWS_AS(parse_ini("[a]\nnot a pair\n"), ConfigParseError);
    CHECK_THROWS_AS(parse_ini("[a]\nk = 1\nk = 2\n"), ConfigParseError);
    const auto doc = parse_ini("# comment\n[a]\nk = v # trailing\n");
    CHECK(doc.sections.at("a").at("k").value == "v");
    CHECK(doc.sections.at("a").at("k").line == 3);
}

TEST_CASE("keys that do not apply to the chosen model are rejected") {
    const auto errs = errors_of("[eos]\nmodel = linear\ngamma = 1.4\n[background]\nrho = 1\nn = 1\n");
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].message.find("does not apply") != std::string::npos);
}

TEST_CASE("tabulated sets load relative to the config directory") {
    const auto dir = std::filesystem::temp_directory_path() / "mis_cfg_test";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "eos.txt") << "# rho p\n0 0\n1 0.3\n2 0.6\n4 1.2\n";
    std::ofstream(dir / "transport.txt") << "# n zeta tau0\n0.1 0.01 1\n1 0.1 1\n10 0.01 1\n";
    std::ofstream(dir / "run.cfg") << "[eos]\nmodel = table\ntable = eos.txt\n[transport]\nzeta = table\ntau0 = table\n"
                                      "table = transport.txt\n[background]\nrho = 1\nn = 1\n";
    const auto cfg = parse_config((dir / "run.cfg").string());
    CHECK(cfg.set.pressure(1.5, 1.0) == doctest::Approx(0.45));
    CHECK(cfg.set.zeta(1.0, 1.0) == doctest::Approx(0.1));

    std::ofstream(dir / "broken.cfg") << "[eos]\nmodel = table\ntable = missing.txt\n[background]\nrho = 1\nn = 1\n";
    try {
        parse_config((dir / "broken.cfg").string());
        FAIL("expected failure");
    } catch (const ConfigParseError& e) {
        REQUIRE(e.errors().size() == 1);
        CHECK(e.errors()[0].line == 3);
    }
}

TEST_CASE("suggestions") {
    CHECK(suggest("gama", {"gamma", "mass"}) == "gamma");
    CHECK(suggest("zzzzzz", {"gamma", "mass"}).empty());
}
