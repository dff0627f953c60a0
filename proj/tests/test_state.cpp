#include <doctest.h>

#include <cmath>
#include <random>

#include "mis/state.hpp"

using namespace mis;

namespace {

ConstitutiveSet gas() {
    ConstitutiveSet s;
    s.eos = IdealGasEos{4.0 / 3.0, 1.0};
    return s;
}

}  // namespace

TEST_CASE("four-velocity normalization") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        FluidState s{1.0, 1.0, 0.0, {u(rng), u(rng), u(rng)}};
        CHECK(std::abs(s.normalization() + 1.0) < 1e-14);
    }
}

TEST_CASE("rest-frame stress energy") {
    const auto set = gas();
    const FluidState s{2.0, 1.0, 0.1, {}};
    const auto T = stress_energy(s, set);
    const double q = set.pressure(2.0, 1.0) + 0.1;
    CHECK(T.T00 == 2.0);
    for (int j = 0; j < 3; ++j) {
        CHECK(T.T0k[j] == 0.0);
        for (int k = 0; k < 3; ++k) CHECK(T.Tjk[j][k] == (j == k ? q : 0.0));
    }
}

TEST_CASE("dust with |u|^2 = 3 has T00 = 4") {
    ConstitutiveSet dust;
    dust.eos = ConstantEos{0.0};
    const auto T = stress_energy({1.0, 1.0, 0.0, {1.0, 1.0, 1.0}}, dust);
    CHECK(T.T00 == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("background T00 is rho_bar exactly") {
    const ConstantState bg{1.7, 0.3};
    CHECK(stress_energy(bg.state(), gas()).T00 == 1.7);
}

TEST_CASE("WEC: T(v, v) >= 0 for timelike v when e >= 0") {
    const auto set = gas();
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-2.0, 2.0), r(0.5, 3.0), pi(-0.2, 0.2);
    for (int i = 0; i < 1000; ++i) {
        FluidState s{r(rng), 0.2, pi(rng), {u(rng), u(rng), u(rng)}};
        if (wec_value(s, set) < 0.0) continue;
        const std::array<double, 3> w{u(rng), u(rng), u(rng)};
        const double norm = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
        const double v0 = norm * (1.0 + std::abs(u(rng)));  // |v0| > |v|
        const double val = stress_energy(s, set).contract({v0, w[0], w[1], w[2]});
        CHECK(val >= -1e-12 * (1.0 + std::abs(v0 * v0 * s.rho)));
    }
}

TEST_CASE("stress energy is rotation covariant") {
    const auto set = gas();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0), ang(0.0, 6.283185307179586);
    for (int i = 0; i < 200; ++i) {
        FluidState s{2.0, 0.5, 0.05, {u(rng), u(rng), u(rng)}};
        const double a = ang(rng);
        // rotation about the z axis
        const double c = std::cos(a), sn = std::sin(a);
        FluidState rot = s;
        rot.u = {c * s.u[0] - sn * s.u[1], sn * s.u[0] + c * s.u[1], s.u[2]};
        const auto T = stress_energy(s, set);
        const auto R = stress_energy(rot, set);
        CHECK(std::abs(T.T00 - R.T00) < 1e-12);
        CHECK(std::abs(c * T.T0k[0] - sn * T.T0k[1] - R.T0k[0]) < 1e-12);
        // trace and T^{zz} are invariant under rotations about z
        CHECK(std::abs(T.Tjk[0][0] + T.Tjk[1][1] - R.Tjk[0][0] - R.Tjk[1][1]) < 1e-12);
        CHECK(std::abs(T.Tjk[2][2] - R.Tjk[2][2]) < 1e-12);
    }
}
