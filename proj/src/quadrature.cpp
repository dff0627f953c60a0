#include "mis/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace mis {

namespace {

// Kronrod abscissae on [0, 1] (odd indices are the Gauss nodes) and weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

}  // namespace

QuadratureResult gauss_kronrod_15(const Integrand& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    bool finite = std::isfinite(fc);

    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        finite = finite && std::isfinite(f1) && std::isfinite(f2);
        kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }

    QuadratureResult r;
    r.value = kronrod * half;
    r.error = std::abs((kronrod - gauss) * half);
    r.evaluations = 15;
    r.intervals = 1;
    r.finite = finite;
    r.converged = finite;
    return r;
}

QuadratureResult integrate(const Integrand& f, double a, double b, const QuadratureOptions& opts) {
    QuadratureResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }

    std::priority_queue<Panel> panels;
    auto first = gauss_kronrod_15(f, a, b);
    out.evaluations = first.evaluations;
    if (!first.finite) {
        out.finite = false;
        out.value = first.value;
        out.error = first.error;
        return out;
    }
    panels.push({a, b, first.value, first.error});
    double total = first.value;
    double total_err = first.error;

    while (true) {
        const double target = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
        if (total_err <= target) {
            out.converged = true;
            break;
        }
        if (static_cast<int>(panels.size()) >= opts.max_intervals) break;

        const Panel worst = panels.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted in floating point
        panels.pop();

        const auto left = gauss_kronrod_15(f, worst.a, mid);
        const auto right = gauss_kronrod_15(f, mid, worst.b);
        out.evaluations += left.evaluations + right.evaluations;
        if (!left.finite || !right.finite) {
            out.finite = false;
            break;
        }
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        panels.push({worst.a, mid, left.value, left.error});
        panels.push({mid, worst.b, right.value, right.error});
    }

    // Re-sum from the panels to limit cancellation drift in the running totals.
    double value = 0.0;
    double error = 0.0;
    out.intervals = static_cast<int>(panels.size());
    while (!panels.empty()) {
        value += panels.top().value;
        error += panels.top().error;
        panels.pop();
    }
    out.value = value;
    out.error = error;
    return out;
}

QuadratureResult integrate_piecewise(const Integrand& f, std::span<const double> breaks,
                                     const QuadratureOptions& opts) {
    QuadratureResult out;
    out.converged = true;
    if (breaks.size() < 2) return out;

    std::vector<double> pts;
    pts.reserve(breaks.size());
    for (double x : breaks) {
        if (pts.empty() || x > pts.back()) pts.push_back(x);
    }
    if (pts.size() < 2) return out;

    QuadratureOptions piece = opts;
    piece.abs_tol = opts.abs_tol / static_cast<double>(pts.size() - 1);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto r = integrate(f, pts[i], pts[i + 1], piece);
        out.value += r.value;
        out.error += r.error;
        out.evaluations += r.evaluations;
        out.intervals += r.intervals;
        out.converged = out.converged && r.converged;
        out.finite = out.finite && r.finite;
    }
    return out;
}

}  // namespace mis
