#include <doctest.h>

#include <cmath>
#include <random>

#include "mis/constitutive.hpp"
#include "mis/state.hpp"

using namespace mis;

namespace {

ConstitutiveSet ideal_gas(double gamma, double mass = 1.0) {
    ConstitutiveSet s;
    s.eos = IdealGasEos{gamma, mass};
    return s;
}

}  // namespace

TEST_CASE("ideal gas sound speed at rho = 2, n = 1") {
    const auto set = ideal_gas(2.0);
    CHECK(set.pressure(2.0, 1.0) == 1.0);
    CHECK(*sound_speed_sq(set, 2.0, 1.0, 0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(*euler_sound_speed_sq(set, 2.0, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

    // independent oracle: finite-difference derivatives of p
    const double h = 1e-5;
    const double dpr = (set.pressure(2.0 + h, 1.0) - set.pressure(2.0 - h, 1.0)) / (2 * h);
    const double dpn = (set.pressure(2.0, 1.0 + h) - set.pressure(2.0, 1.0 - h)) / (2 * h);
    CHECK(dpr + 1.0 * dpn / 3.0 == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("sound speed sits on the causality boundary") {
    // zeta = tau0 = 1, e = 2, dp/drho = 1/4, n dp/dn = 1/2: p = (rho + n)/4 at rho = 1.2, n = 1 gives p = 0.55,
    // Pi chosen so e = 2
    ConstitutiveSet set;
    set.eos = IdealGasEos{1.25, -1.0};
    set.zeta_model = ConstantZeta{1.0};
    const double rho = 1.2, n = 2.0;
    const double p = set.pressure(rho, n);
    CHECK(set.dp_drho(rho, n) == doctest::Approx(0.25));
    CHECK(n * set.dp_dn(rho, n) == doctest::Approx(0.5));
    const double Pi = 2.0 - rho - p;
    CHECK(*sound_speed_sq(set, rho, n, Pi) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_FALSE(is_physical({rho, n, Pi, {}}, set).physical);
}

TEST_CASE("euler sound speed for simple families") {
    ConstitutiveSet c;
    c.eos = ConstantEos{0.3};
    CHECK(*euler_sound_speed_sq(c, 1.0, 1.0) == 0.0);
    ConstitutiveSet l;
    l.eos = LinearEos{1.0 / 3.0};
    CHECK(*euler_sound_speed_sq(l, 0.7, 3.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("zero viscosity reduces to the euler sound speed") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ur(0.1, 10.0), un(0.01, 5.0), ug(1.05, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const auto set = ideal_gas(ug(rng), 0.5);
        const double rho = ur(rng), n = un(rng);
        const auto a = sound_speed_sq(set, rho, n, 0.0);
        const auto b = euler_sound_speed_sq(set, rho, n);
        if (a && b) worst = std::max(worst, std::abs(*a - *b));
    }
    CHECK(worst <= 1e-14);
}

TEST_CASE("sound speed decreases in Pi when zeta/tau0 + n dp/dn > 0") {
    ConstitutiveSet set = ideal_gas(4.0 / 3.0, 0.0);
    set.zeta_model = ConstantZeta{0.3};
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ur(0.5, 5.0), un(0.1, 3.0), up(-0.3, 0.3);
    for (int i = 0; i < 2000; ++i) {
        const double rho = ur(rng), n = un(rng), a = up(rng), b = a + 0.05;
        const double e = rho + set.pressure(rho, n) + a;
        if (e <= 0.0) continue;
        CHECK(*sound_speed_sq(set, rho, n, b) < *sound_speed_sq(set, rho, n, a));
    }
}

TEST_CASE("declared pressure derivatives converge at second order") {
    ConstitutiveSet set;
    set.eos = TabulatedEos{MonotoneCubic({0.0, 1.0, 2.0, 4.0, 8.0}, {0.0, 0.2, 0.5, 1.3, 2.9}), "inline"};
    const auto ideal = ideal_gas(1.4, 0.7);
    for (const ConstitutiveSet* s : {static_cast<const ConstitutiveSet*>(&set), &ideal}) {
        const double rho = 2.7, n = 0.9;
        double errs[3];
        const double hs[3] = {1e-2, 5e-3, 2.5e-3};
        for (int k = 0; k < 3; ++k) {
            const double h = hs[k];
            const double fd = (s->pressure(rho + h, n) - s->pressure(rho - h, n)) / (2 * h);
            errs[k] = std::abs(fd - s->dp_drho(rho, n));
        }
        if (errs[0] < 1e-13) continue;  // linear in rho: exact
        CHECK(std::log2(errs[0] / errs[1]) >= 1.9);
        CHECK(std::log2(errs[1] / errs[2]) >= 1.9);
    }
}

TEST_CASE("ideal gas passes every assumption check") {
    const auto set = ideal_gas(5.0 / 3.0);
    SampleSpec spec;
    spec.rho_count = 21;
    spec.n_count = 21;
    const auto rep = validate_assumptions(set, spec);
    CHECK(rep.passed());
    CHECK(rep.physical_samples > 0);
}

TEST_CASE("tau0 without a positive floor violates A3") {
    auto set = ideal_gas(5.0 / 3.0);
    set.tau0_model = PowerLawTau0{1.0, 1.0};
    SampleSpec spec;
    spec.rho_count = 11;
    spec.n_count = 11;
    const auto rep = validate_assumptions(set, spec);
    CHECK(rep.violates("A3"));
}

TEST_CASE("lambda = 1 at a state with p + rho = 2 violates A5") {
    ConstitutiveSet set;
    set.eos = LinearEos{1.0 / 3.0};
    set.lambda_model = ConstantLambda{1.0};
    SampleSpec spec;
    spec.rho_min = 1.5;
    spec.rho_max = 1.5;
    spec.rho_count = 2;
    spec.n_count = 3;
    const auto rep = validate_assumptions(set, spec);  // p + rho = 2 at rho = 1.5
    CHECK(rep.violates("A5"));
}

TEST_CASE("integrability constant") {
    ConstitutiveSet set = ideal_gas(4.0 / 3.0);
    set.zeta_model = PowerExpZeta{1.0, 1.0, 1.0, 0.0};
    const auto one = abar_bound(set);
    CHECK(one.converged);
    CHECK(std::abs(one.value - 1.0) < 1e-6);

    set.zeta_model = ConstantZeta{0.0};
    const auto zero = abar_bound(set);
    CHECK(zero.converged);
    CHECK(zero.value == 0.0);

    set.zeta_model = ConstantZeta{1.0};
    CHECK_FALSE(abar_bound(set).converged);
}

TEST_CASE("integrability constant is monotone in zeta/tau0") {
    ConstitutiveSet a = ideal_gas(4.0 / 3.0), b = a;
    for (double scale : {0.5, 1.0, 2.0}) {
        a.zeta_model = PowerExpZeta{scale, 1.0, 1.0, 0.0};
        b.zeta_model = PowerExpZeta{scale * 1.3, 1.0, 1.0, 0.0};
        CHECK(abar_bound(a).value <= abar_bound(b).value);
        b.zeta_model = PowerExpZeta{scale, 1.0, 2.0, 0.0};  // exp(-n/2) >= exp(-n)
        CHECK(abar_bound(a).value <= abar_bound(b).value);
    }
}

TEST_CASE("physical set membership") {
    const auto set = ideal_gas(2.0);
    CHECK(is_physical({2.0, 1.0, 0.0, {}}, set).physical);
    CHECK_FALSE(is_physical({-1.0, 1.0, 0.0, {}}, set).physical);
    CHECK_FALSE(is_physical({2.0, -1.0, 0.0, {}}, set).physical);
}

TEST_CASE("weak energy condition value") {
    ConstitutiveSet zero_p;
    zero_p.eos = ConstantEos{0.0};
    CHECK(wec_value({1.0, 1.0, -1.0, {}}, zero_p) == 0.0);
    CHECK(wec_value({2.0, 1.0, 0.0, {}}, ideal_gas(2.0)) == 3.0);
    ConstitutiveSet unit_p;
    unit_p.eos = ConstantEos{1.0};
    CHECK(wec_value({1.0, 1.0, -5.0, {}}, unit_p) == -3.0);
}
