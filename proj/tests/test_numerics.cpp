#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "mis/interp.hpp"
#include "mis/io.hpp"
#include "mis/ode.hpp"
#include "mis/quadrature.hpp"

using namespace mis;

TEST_CASE("gauss-kronrod integrates polynomials up to degree 22 in one panel") {
    const auto r = gauss_kronrod_15([](double x) { return std::pow(x, 20); }, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(1.0 / 21.0).epsilon(1e-14));
}

TEST_CASE("adaptive quadrature handles a peaked integrand") {
    QuadratureOptions o;
    o.abs_tol = 1e-12;
    const auto r = integrate([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0, o);
    const double exact = 2.0 / 1e-2 * std::atan(1.0 / 1e-2);
    CHECK(r.converged);
    CHECK(std::abs(r.value - exact) < 1e-9);
}

TEST_CASE("piecewise quadrature over a kink") {
    const double breaks[] = {-1.0, 0.0, 2.0};
    const auto r = integrate_piecewise([](double x) { return std::abs(x); }, breaks);
    CHECK(r.value == doctest::Approx(2.5).epsilon(1e-13));
}

TEST_CASE("non-finite integrand is flagged") {
    const auto r = integrate([](double x) { return 1.0 / x; }, 0.0, 1.0);
    CHECK_FALSE(r.converged);
}

TEST_CASE("dopri matches exp and a harmonic oscillator") {
    Vec<1> y{1.0};
    OdeOptions o;
    o.rtol = 1e-11;
    o.atol = 1e-14;
    auto rep = integrate_dopri<1>([](double, const Vec<1>& v) { return Vec<1>{-v[0]}; }, 0.0, y, 3.0, o);
    CHECK(rep.status == OdeStatus::completed);
    CHECK(std::abs(y[0] - std::exp(-3.0)) < 1e-10);

    Vec<2> z{1.0, 0.0};
    integrate_dopri<2>([](double, const Vec<2>& v) { return Vec<2>{v[1], -v[0]}; }, 0.0, z, 2 * std::numbers::pi, o);
    CHECK(std::abs(z[0] - 1.0) < 1e-9);
    CHECK(std::abs(z[1]) < 1e-9);
}

TEST_CASE("dopri integrates backwards and stops on observer request") {
    Vec<1> y{1.0};
    integrate_dopri<1>([](double, const Vec<1>& v) { return Vec<1>{v[0]}; }, 1.0, y, 0.0);
    CHECK(std::abs(y[0] - std::exp(-1.0)) < 1e-8);

    Vec<1> w{0.0};
    auto rep = integrate_dopri<1>([](double, const Vec<1>&) { return Vec<1>{1.0}; }, 0.0, w, 10.0, OdeOptions{},
                                  [](double, const Vec<1>& v) { return v[0] < 1.0; });
    CHECK(rep.status == OdeStatus::stopped);
    CHECK(rep.t < 10.0);
}

TEST_CASE("monotone cubic preserves monotonicity and reproduces data") {
    MonotoneCubic f({0.0, 1.0, 2.0, 3.0, 4.0}, {0.0, 0.1, 0.1, 2.0, 2.1});
    for (double x : {0.0, 1.0, 2.0, 3.0, 4.0}) CHECK(f(x) == doctest::Approx(f.ys()[static_cast<int>(x)]));
    double prev = f(0.0);
    for (int i = 1; i <= 400; ++i) {
        const double v = f(0.01 * i);
        CHECK(v >= prev - 1e-15);
        prev = v;
    }
    // linear extension outside the table
    CHECK(f(5.0) == doctest::Approx(f(4.0) + f.derivative(4.0)));
}

TEST_CASE("monotone cubic reproduces a line exactly") {
    MonotoneCubic f({0.0, 0.5, 2.0, 3.0}, {1.0, 2.0, 5.0, 7.0});
    for (double x = -1.0; x < 4.0; x += 0.37) {
        CHECK(f(x) == doctest::Approx(1.0 + 2.0 * x).epsilon(1e-14));
        CHECK(f.derivative(x) == doctest::Approx(2.0).epsilon(1e-14));
    }
}

TEST_CASE("read_table parses comments and rejects ragged rows") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto good = dir / "mis_table_good.txt";
    const auto bad = dir / "mis_table_bad.txt";
    std::ofstream(good) << "# n zeta tau0\n1 2 3\n\n4 5 6 # trailing\n";
    std::ofstream(bad) << "1 2 3\n4 5\n";
    const auto cols = read_table(good.string(), 3);
    REQUIRE(cols.size() == 3);
    REQUIRE(cols[0].size() == 2);
    CHECK(cols[2][1] == 6.0);
    CHECK_THROWS(read_table(bad.string(), 3));
    CHECK_THROWS(read_table(good.string(), 2));
}

TEST_CASE("shortest round-trip formatting") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 10000; ++i) {
        const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        CHECK(*parse_double(format_double(x)) == x);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(-INFINITY) == "-inf");
    CHECK(parse_double(" 2.5 ").value() == 2.5);
    CHECK_FALSE(parse_double("2.5x"));
    CHECK_FALSE(parse_double(""));
}

TEST_CASE("csv writer enforces the header width") {
    std::ostringstream os;
    CsvWriter csv(os, {"a", "b"});
    csv.row({1.0, 0.25});
    CHECK(os.str() == "a,b\n1,0.25\n");
    CHECK_THROWS_AS(csv.row({1.0}), std::logic_error);
}
