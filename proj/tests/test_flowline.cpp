#include <doctest.h>

#include <cmath>
#include <random>

#include "mis/flowline.hpp"
#include "mis/ode.hpp"

using namespace mis;

namespace {

ConstitutiveSet gas(double zeta0 = 0.0) {
    ConstitutiveSet s;
    s.eos = IdealGasEos{4.0 / 3.0, 1.0};
    if (zeta0 > 0.0) s.zeta_model = PowerExpZeta{zeta0, 1.0, 1.0, 0.0};
    return s;
}

Vec<3> flow_rhs(const ConstitutiveSet& set, const FlowlineForcing& f, double tau, const Vec<3>& y) {
    const double rho = y[0], n = y[1], Pi = y[2];
    const double th = f.theta(tau);
    const double t0 = set.tau0(rho, n);
    const double e = rho + set.pressure(rho, n) + Pi;
    return {-e * th, -n * th, -set.zeta(rho, n) / t0 * th - (1.0 + set.lambda(rho, n) * Pi) * Pi / t0};
}

}  // namespace

TEST_CASE("pure relaxation decays like exp(-tau)") {
    ConstitutiveSet set;
    set.eos = LinearEos{1.0 / 3.0};
    const auto path = integrate_flowline({1.0, 1.0, 0.3, {}}, set, FlowlineForcing::constant(0.0), 4.0);
    REQUIRE(path.status == FlowlineStatus::completed);
    for (const auto& s : path.samples) {
        CHECK(s.rho == 1.0);
        CHECK(s.n == 1.0);
        CHECK(std::abs(s.Pi - 0.3 * std::exp(-s.tau)) < 1e-9);
    }
}

TEST_CASE("zero expansion freezes rho and n for any set") {
    const auto set = gas(1.0);
    const auto path = integrate_flowline({2.0, 0.7, -0.1, {}}, set, FlowlineForcing::constant(0.0), 3.0);
    CHECK(path.samples.back().rho == 2.0);
    CHECK(path.samples.back().n == 0.7);
}

TEST_CASE("adaptive path matches a fixed-step RK4 reference") {
    const auto set = gas(1.0);
    const auto forcing = FlowlineForcing::sinusoid(0.2, 0.5, 2.0, 0.3);
    const double tol = 1e-9, tau_max = 2.0;
    FlowlineOptions fo;
    fo.rtol = tol;
    const auto path = integrate_flowline({1.5, 0.5, 0.05, {}}, set, forcing, tau_max, fo);

    Vec<3> y{1.5, 0.5, 0.05};
    const int steps = 4000;
    const double h = tau_max / steps;
    for (int i = 0; i < steps; ++i) {
        const double t = i * h;
        const auto k1 = flow_rhs(set, forcing, t, y);
        Vec<3> a, b, c;
        for (int j = 0; j < 3; ++j) a[j] = y[j] + 0.5 * h * k1[j];
        const auto k2 = flow_rhs(set, forcing, t + 0.5 * h, a);
        for (int j = 0; j < 3; ++j) b[j] = y[j] + 0.5 * h * k2[j];
        const auto k3 = flow_rhs(set, forcing, t + 0.5 * h, b);
        for (int j = 0; j < 3; ++j) c[j] = y[j] + h * k3[j];
        const auto k4 = flow_rhs(set, forcing, t + h, c);
        for (int j = 0; j < 3; ++j) y[j] += h / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
    }
    const auto& last = path.samples.back();
    CHECK(last.tau == doctest::Approx(tau_max));
    CHECK(std::abs(last.rho - y[0]) <= 10 * tol * std::max(1.0, std::abs(y[0])));
    CHECK(std::abs(last.n - y[1]) <= 10 * tol * std::max(1.0, std::abs(y[1])));
    CHECK(std::abs(last.Pi - y[2]) <= 10 * tol * std::max(1.0, std::abs(y[2])));
}

TEST_CASE("p + Pi obeys the sound-speed identity along the path") {
    const auto set = gas(1.0);
    auto theta = [](double tau) { return 0.1 + 0.4 * std::sin(tau); };
    const auto path = integrate_flowline({1.5, 0.5, 0.05, {}}, set, FlowlineForcing{theta}, 1.0);
    REQUIRE(path.samples.size() > 4);
    FlowlineOptions fo;
    fo.rtol = 1e-13;
    fo.atol = 1e-15;
    const double h = 1e-3;
    for (std::size_t i = 0; i < path.samples.size(); i += 3) {
        const auto& s = path.samples[i];
        const FlowlineForcing shifted{[&](double t) { return theta(s.tau + t); }};
        auto q_at = [&](double dt) {
            const auto p = integrate_flowline({s.rho, s.n, s.Pi, {}}, set, shifted, dt, fo).samples.back();
            return set.pressure(p.rho, p.n) + p.Pi;
        };
        const double q0 = set.pressure(s.rho, s.n) + s.Pi;
        const double dq = (-3.0 * q0 + 4.0 * q_at(h) - q_at(2 * h)) / (2 * h);
        const double cs2 = *sound_speed_sq(set, s.rho, s.n, s.Pi);
        const double expected = cs2 * s.e * (-theta(s.tau)) - s.Pi / set.tau0(s.rho, s.n);
        CHECK(std::abs(dq - expected) < 1e-5 * (1.0 + std::abs(expected)));
    }
}

TEST_CASE("WEC and Pi bound on a random suite") {
    const auto set = gas(1.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ur(0.8, 3.0), un(0.1, 0.7), upi(-0.2, 0.2), um(-1.0, 1.0),
        ua(0.0, 2.0), uw(0.5, 4.0);
    double worst_e = INFINITY, worst_pi = -INFINITY;
    for (int i = 0; i < 100; ++i) {
        const FluidState st{ur(rng), un(rng), upi(rng), {}};
        if (st.rho + set.pressure(st.rho, st.n) + st.Pi < 0.0) continue;
        const auto path = integrate_flowline(st, set, FlowlineForcing::sinusoid(um(rng), ua(rng), uw(rng), 0.0), 5.0);
        worst_e = std::min(worst_e, wec_propagation_check(path).min_e);
        for (const auto& s : path.samples) worst_pi = std::max(worst_pi, std::abs(s.Pi) - pi_bound(st.Pi, 1.0));
    }
    CHECK(worst_e >= -1e-10);
    CHECK(worst_pi <= 1e-8);
}

TEST_CASE("strong expansion leaves the physical set before e turns negative") {
    ConstitutiveSet set;
    set.eos = LinearEos{0.88};
    set.zeta_model = PowerExpZeta{0.8, 1.65, 3.0, 0.0};
    set.tau0_model = ConstantTau0{1.3};
    const FluidState start{0.4328, 0.0837, 0.0743, {}};
    REQUIRE(is_physical(start, set).physical);
    const auto path = integrate_flowline(start, set, FlowlineForcing::constant(3.0), 3.0);
    const auto k = admissible_length(path, set);
    REQUIRE(k > 0);
    CHECK(k < path.samples.size());
    FlowlinePath prefix;
    prefix.samples.assign(path.samples.begin(), path.samples.begin() + static_cast<long>(k));
    CHECK(wec_propagation_check(prefix).holds);
}

TEST_CASE("zero viscosity keeps e = rho + p") {
    const auto set = gas();
    const auto path = integrate_flowline({1.5, 0.5, 0.0, {}}, set, FlowlineForcing::sinusoid(0.3, 1.0, 2.0, 0.0), 3.0);
    CHECK(wec_propagation_check(path).holds);
    for (const auto& s : path.samples) CHECK(s.Pi == 0.0);
}

TEST_CASE("pi bound formula") {
    CHECK(pi_bound(0.0, 1.0) == 3.0);
    CHECK(pi_bound(-0.4, 0.0) == 0.4);
}

TEST_CASE("F is constant without viscosity") {
    const auto set = gas();
    const auto res = solve_F_characteristic(set, {1.5, 0.5, 0.2}, 1e-3, 0.05, 5.0);
    REQUIRE_FALSE(res.samples.empty());
    for (const auto& s : res.samples) CHECK(std::abs(s.F - initial_F(0.2, 1e-3)) < 1e-14);
}

TEST_CASE("F obeys the transport equation, its bound, and decreases in Pi") {
    const auto set = gas(1.0);
    const double eps = 1e-3;
    const auto res = solve_F_characteristic(set, {1.5, 1.0, 0.1}, eps, 1e-3, 20.0);
    REQUIRE(res.samples.size() > 10);
    CHECK(characteristic_residual(res) < 1e-6);
    for (const auto& s : res.samples) {
        CHECK(std::abs(s.F) <= eps + 1.0);
        CHECK(s.dF_dPi < 0.0);
    }
}

TEST_CASE("evaluate_F agrees with the characteristic samples") {
    const auto set = gas(1.0);
    const auto res = solve_F_characteristic(set, {1.5, 1.0, 0.1}, 1e-3, 0.2, 5.0);
    const auto& s = res.samples[res.samples.size() / 3];
    const auto v = evaluate_F(set, s.rho, s.n, s.Pi, 1.0, 1e-3);
    REQUIRE(v.ok);
    CHECK(std::abs(v.F - s.F) < 1e-8);
    CHECK(std::abs(v.dF_dPi - s.dF_dPi) < 1e-5);
}
