#include <doctest.h>

#include <cmath>
#include <random>

#include "mis/riemann.hpp"

using namespace mis;

namespace {

ConstitutiveSet gas(double gamma, double zeta) {
    ConstitutiveSet s;
    s.eos = IdealGasEos{gamma, 0.0};
    s.zeta_model = ConstantZeta{zeta};
    return s;
}

}  // namespace

TEST_CASE("rest-frame matrices") {
    const auto set = gas(4.0 / 3.0, 0.0);
    const BarotropicView v(set);
    const auto sys = quasilinear_matrices(v, {2.0, 0.0, 0.5});
    CHECK(sys.A0[0] == Vec3{1.0, 0.0, 0.0});
    CHECK(sys.A0[1] == Vec3{0.0, 2.5, 0.0});
    CHECK(sys.A0[2] == Vec3{0.0, 0.0, 1.0});
}

TEST_CASE("source vanishes with Pi") {
    const auto set = gas(4.0 / 3.0, 0.2);
    const BarotropicView v(set);
    const double rho = 1.3;
    CHECK(quasilinear_matrices(v, {rho, 0.4, v.pressure(rho)}).B[2] == 0.0);
    CHECK(quasilinear_matrices(v, {rho, 0.4, v.pressure(rho) + 0.1}).B[2] == doctest::Approx(0.1));
}

TEST_CASE("A0 stays invertible on physical states") {
    const auto set = gas(4.0 / 3.0, 0.1);
    const BarotropicView v(set);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ur(0.2, 5.0), uu(-3.0, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const PlanarState s{ur(rng), uu(rng), 0.0};
        PlanarState t = s;
        t.q = v.pressure(s.rho);
        const auto sys = quasilinear_matrices(v, t);
        if (!(sys.c_sq < 1.0)) continue;
        const double w = t.rho + t.q, u0 = t.u0();
        const double expected = u0 * (w / u0) * (u0 - sys.c_sq * t.u1 * t.u1 / u0);
        CHECK(determinant(sys.A0) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(determinant(sys.A0) != 0.0);
    }
}

TEST_CASE("eigenvalues in the rest frame and at light speed") {
    const auto set = gas(4.0 / 3.0, 0.0);
    const BarotropicView v(set);
    const auto es = eigensystem(v, {1.0, 0.0, v.pressure(1.0)});
    CHECK(es.lambdas[0] == 0.0);
    CHECK(es.lambdas[1] == doctest::Approx(es.c));
    CHECK(es.lambdas[2] == doctest::Approx(-es.c));

    const auto stiff = gas(2.0, 0.0);  // c = 1
    const BarotropicView w(stiff);
    for (double u1 : {-2.0, 0.0, 0.7, 5.0}) {
        const auto e = eigensystem(w, {1.0, u1, w.pressure(1.0)});
        CHECK(e.lambdas[1] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(e.lambdas[2] == doctest::Approx(-1.0).epsilon(1e-14));
    }
}

TEST_CASE("left eigenvectors, causality and determinant on random states") {
    const auto set = gas(4.0 / 3.0, 0.3);
    const BarotropicView v(set);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ur(0.2, 5.0), uu(-3.0, 3.0), up(-0.05, 0.05);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double rho = ur(rng);
        const PlanarState s{rho, uu(rng), v.pressure(rho) + up(rng)};
        if (!(v.c_sq(s.rho, s.q) < 1.0)) continue;
        worst = std::max(worst, eigen_residual(v, s));
        const auto es = eigensystem(v, s);
        for (double l : es.lambdas) CHECK(std::abs(l) <= 1.0 + 1e-15);
        CHECK(left_vector_determinant(es) ==
              doctest::Approx(-2.0 * es.c * es.c * es.c * (s.rho + s.q) / s.u0()).epsilon(1e-12));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("necessary condition residual") {
    ConstitutiveSet flat;
    flat.eos = ConstantEos{0.2};
    const BarotropicView f(flat);
    CHECK(*necessary_condition_residual(f, 1.0, 0.2) == 0.0);

    const auto viscous = gas(4.0 / 3.0, 0.1);
    CHECK(*necessary_condition_residual(BarotropicView(viscous), 1.0, 0.4) > 0.0);

    const auto ideal = gas(1.5, 0.0);
    const BarotropicView g(ideal);
    for (double rho = 0.1; rho < 10.0; rho *= 1.7) CHECK(*necessary_condition_residual(g, rho, g.pressure(rho)) >= 0.5);
    CHECK_FALSE(necessary_condition_residual(g, 1.0, -1.0));
}

TEST_CASE("curl obstruction") {
    ConstitutiveSet flat;
    flat.eos = ConstantEos{0.2};
    const BarotropicView f(flat);
    std::vector<PlanarState> grid;
    for (double rho : {0.5, 1.0, 2.0})
        for (double u : {-1.0, 0.0, 1.0})
            for (double dq : {-0.05, 0.0, 0.05}) grid.push_back({rho, u, 0.2 + dq});
    CHECK(curl_obstruction(f, grid) == 0.0);

    const auto stiff = gas(2.0, 0.0);
    const BarotropicView g(stiff);
    for (const auto& s : grid) {
        // c = 1 independent of q, so dh/dq = 1 / u0
        CHECK(curl_obstruction(g, {s}) == doctest::Approx(1.0 / s.u0()).epsilon(1e-8));
    }
    CHECK(curl_obstruction(BarotropicView(gas(4.0 / 3.0, 0.2)), grid) > 0.01);
}
