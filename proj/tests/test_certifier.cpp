#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mis/certifier.hpp"

using namespace mis;

namespace {

constexpr double pi = std::numbers::pi;

ConstitutiveSet shell_set() {
    ConstitutiveSet s;
    s.eos = IdealGasEos{4.0 / 3.0, 1.0};
    s.zeta_model = PowerExpZeta{1.0, 1.0, 1.0, 0.0};
    s.p0 = 0.75;
    return s;
}

ShellData dense_shell(double sigma) {
    ShellData d;
    d.R0 = 1.0;
    d.ell = 0.06;
    d.smooth_w = 0.03;
    d.sigma = sigma;
    d.background = {1.0, 0.5};
    d.rho_contrast = 100.0;
    d.n_contrast = 100.0;
    return d;
}

ShellData sharp_shell(double ell) {
    ShellData d;
    d.R0 = 1.0;
    d.ell = ell;
    d.smooth_w = 0.0;
    d.sigma = 1.0;
    d.background = {1.0, 0.5};
    return d;
}

}  // namespace

TEST_CASE("ratio threshold endpoints and range") {
    CHECK(ratio_threshold(0.0) == 0.5);
    CHECK(ratio_threshold(1.0) == 1.0);
    for (double c = 0.05; c < 1.0; c += 0.05) {
        CHECK(ratio_threshold(c) > 0.5);
        CHECK(ratio_threshold(c) < 1.0);
        // denominator positivity of the mu integrand
        CHECK(ratio_threshold(c) > 2 * c / (c * c + 1));
    }
}

TEST_CASE("uniform half shell has ratio 45/56") {
    const auto r = shell_ratio(sharp_shell(0.5), shell_set());
    REQUIRE(r.defined);
    CHECK(std::abs(r.ratio - 45.0 / 56.0) < 1e-8);
}

TEST_CASE("ratio increases to 1 as the shell thins and crosses every threshold") {
    const auto set = shell_set();
    double prev = 0.0;
    for (double ell : {0.8, 0.4, 0.2, 0.1, 0.05, 0.01, 0.001}) {
        const double r = shell_ratio(sharp_shell(ell), set).ratio;
        CHECK(r > prev);
        prev = r;
    }
    CHECK(prev > 0.999);
    for (double c : {0.1, 0.5, 0.9, 0.99}) {
        bool crossed = false;
        for (double ell = 0.5; ell > 1e-5 && !crossed; ell *= 0.5)
            crossed = shell_ratio(sharp_shell(ell), set).ratio > ratio_threshold(c);
        CHECK(crossed);
    }
}

TEST_CASE("energy of shell data") {
    const auto set = shell_set();
    auto d = sharp_shell(0.5);
    d.sigma = 0.0;
    CHECK(std::abs(energy_E0(d, set).value) < 1e-12);
    CHECK(q_initial(d, set).value == 0.0);

    d.sigma = 1.0;
    const double e = 1.0 + d.background.pressure(set);
    const double exact = e * 4.0 * pi / 3.0 * (1.0 - std::pow(0.5, 3));
    CHECK(energy_E0(d, set).value == doctest::Approx(exact).epsilon(1e-10));
    CHECK(q_initial(d, set).value > 0.0);

    const double e1 = energy_E0(d, set).value;
    d.sigma = 2.0;
    CHECK(energy_E0(d, set).value / e1 == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("energy from T00 matches the reduced formula") {
    const auto set = shell_set();
    for (double sigma : {0.5, 3.0, 40.0}) {
        const auto d = dense_shell(sigma);
        const auto a = energy_E0(d, set);
        const auto b = energy_from_stress(d, set);
        CHECK(std::abs(a.value - b.value) <= 1e-9 * std::max(1.0, std::abs(a.value)));
    }
}

TEST_CASE("Q0 / (R0 (E + b R0^3)) tends to the shell ratio") {
    const auto set = shell_set();
    const auto d0 = dense_shell(1.0);
    const auto bk = constants_bk(set, d0.background, 0.0, 1.0);
    const double ratio = shell_ratio(d0, set).ratio;
    double prev_gap = INFINITY;
    for (double sigma : {10.0, 100.0, 1000.0, 10000.0}) {
        const auto d = dense_shell(sigma);
        const double z = q_initial(d, set).value / (d.R0 * (energy_E0(d, set).value + bk.b));
        const double gap = std::abs(z - ratio);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-6);
}

TEST_CASE("constants b and k") {
    ConstitutiveSet zero_p;
    zero_p.eos = ConstantEos{0.0};
    const auto bk = constants_bk(zero_p, {1.0, 1.0}, 0.0, 0.0);
    CHECK(bk.b == doctest::Approx(4 * pi / 3));

    ConstitutiveSet unit_p;
    unit_p.eos = ConstantEos{1.0};
    CHECK(constants_bk(unit_p, {1.0, 1.0}, 0.0, 0.0).k == doctest::Approx(4 * pi / 3));

    double pb = -1.0, pk = -1.0;
    for (double a : {0.0, 0.5, 1.0, 2.0}) {
        const auto v = constants_bk(shell_set(), {1.0, 0.5}, 0.1, a);
        CHECK(v.b > pb);
        CHECK(v.k > pk);
        pb = v.b;
        pk = v.k;
    }
}

TEST_CASE("mu at c = 0 has a closed form") {
    // int_{1/2}^1 dz / (1 - sqrt(1 - z^2)) = 1 + sqrt(3) - pi / 3 (substitute z = sin t)
    const auto m = mu_for_c(0.0, 0.05);
    REQUIRE(m.ok);
    const double I = 1.0 + std::sqrt(3.0) - pi / 3.0;
    CHECK(m.integral == doctest::Approx(I).epsilon(1e-10));
    CHECK(m.mu == doctest::Approx(std::exp(I) * 1.05).epsilon(1e-10));
}

TEST_CASE("mu integral decreases with c") {
    // reference values from an independent quadrature
    CHECK(mu_for_c(0.5).integral == doctest::Approx(0.49610236512604605).epsilon(1e-9));
    CHECK(mu_for_c(0.9).integral == doctest::Approx(0.05915480518086133).epsilon(1e-9));
    double prev = INFINITY;
    for (int i = 1; i <= 9; ++i) {
        const auto m = mu_for_c(0.1 * i);
        REQUIRE(m.ok);
        CHECK(m.integral < prev);
        prev = m.integral;
    }
    CHECK_FALSE(mu_for_c(1.0).ok);
}

TEST_CASE("z0 formula") {
    CHECK(*z0_from(0.0, 0.0) == 0.0);
    CHECK(std::abs(*z0_from(0.5, 0.1) - (0.45 + std::sqrt(0.44)) / 1.25) < 1e-15);
    CHECK(std::abs(*z0_from(0.5, 0.1) - 0.89066) < 1e-5);
    for (double c = 0.1; c < 0.95; c += 0.1) CHECK(std::abs(*z0_from(c, 0.0) - 2 * c / (c * c + 1)) < 1e-12);
    CHECK_FALSE(z0_from(0.0, 3.0));  // A^2 + 2B - B^2 < 0
    // z0 is a root of h
    CHECK(std::abs(h_of_z(*z0_from(0.3, 0.05), 0.3, 0.05)) < 1e-14);
}

TEST_CASE("non-positive energy fails every condition") {
    const auto bc = blowup_conditions(-1.0, 1.0, 1.0, 0.5, 1.0, 1.3);
    CHECK_FALSE(bc.cond1);
    CHECK_FALSE(bc.cond2);
}

TEST_CASE("sigma = 0 cannot certify") {
    const auto cert = certify(dense_shell(0.0), shell_set());
    CHECK_FALSE(cert.cond3);
    CHECK_FALSE(cert.valid);
}

TEST_CASE("dense shell certifies at large sigma and h stays positive past the midpoint") {
    const auto cert = certify(dense_shell(40.0), shell_set());
    CHECK(cert.valid);
    CHECK(cert.T_upper == doctest::Approx((cert.mu - 1.0) * cert.R0 / cert.c).epsilon(1e-14));
    const double lo = 0.5 * (1.0 + cert.z0);
    for (int i = 1; i <= 1000; ++i) {
        const double z = lo + (1.0 - lo) * i / 1000.0;
        CHECK(h_of_z(z, cert.A, cert.B) > 0.0);
    }
}

TEST_CASE("certificate becomes valid for large sigma") {
    const auto set = shell_set();
    bool seen = false;
    for (int k = 0; k <= 20; k += 2) {
        const bool v = certify(dense_shell(0.25 * std::pow(2.0, k)), set).valid;
        if (seen) CHECK(v);
        seen = seen || v;
    }
    CHECK(seen);
}

TEST_CASE("small perturbations keep the certificate") {
    const auto set = shell_set();
    auto d = dense_shell(40.0);
    REQUIRE(certify(d, set).valid);
    for (double delta : {1e-3, -1e-3, 1e-2}) {
        d.perturbation = delta;
        CHECK(certify(d, set).valid);
    }
}

TEST_CASE("certificate text round-trips bit-exactly and re-verifies") {
    const auto cert = certify(dense_shell(40.0), shell_set());
    const auto text = certificate_to_text(cert);
    const auto back = certificate_from_text(text);
    CHECK(certificate_to_text(back) == text);
    CHECK(back.E == cert.E);
    CHECK(back.valid == cert.valid);
    CHECK(verify_certificate(back).consistent);

    auto tampered = back;
    tampered.b *= 0.5;
    CHECK_FALSE(verify_certificate(tampered).consistent);
    tampered = back;
    tampered.cond2 = !tampered.cond2;
    CHECK_FALSE(verify_certificate(tampered).consistent);
}

TEST_CASE("certificate parser reports line numbers") {
    const auto text = certificate_to_text(certify(dense_shell(40.0), shell_set()));
    try {
        certificate_from_text(text + "bogus = 1\n");
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
    CHECK_THROWS(certificate_from_text("E = 1\n"));
}

TEST_CASE("find_sigma0: not found, then reproducible") {
    const auto set = shell_set();
    const auto miss = find_sigma0(dense_shell(1.0), set, 0.25, 2.0);
    CHECK_FALSE(miss.found);

    const auto a = find_sigma0(dense_shell(1.0), set, 0.25, 1e4);
    const auto b = find_sigma0(dense_shell(1.0), set, 0.25, 1e4);
    REQUIRE(a.found);
    CHECK(a.sigma0 == b.sigma0);
    CHECK(a.certificate.valid);
    CHECK(certify(dense_shell(2 * a.sigma0), set).valid);
    // the certified bracket is tight to 1%
    CHECK_FALSE(certify(dense_shell(a.sigma0 * 0.99), set).valid);
}
