#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace mis {

template <std::size_t N>
using Vec = std::array<double, N>;

struct OdeOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double h_init = 0.0;     // 0 selects a starting step from the interval length
    double h_min_rel = 1e-13;
    long max_steps = 2'000'000;
};

enum class OdeStatus { completed, stopped, step_collapse, max_steps, non_finite };

struct OdeReport {
    OdeStatus status = OdeStatus::completed;
    double t = 0.0;       // last accepted time
    double h_next = 0.0;  // suggested next step (signed)
    long accepted = 0;
    long rejected = 0;
};

namespace detail {

template <std::size_t N>
Vec<N> axpy(const Vec<N>& y, double h, std::initializer_list<std::pair<double, const Vec<N>*>> terms) {
    Vec<N> out = y;
    for (const auto& [c, k] : terms) {
        if (c == 0.0) continue;
        for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
    }
    return out;
}

}  // namespace detail

/// Dormand-Prince 5(4) with FSAL and standard PI-free step control.
/// Integrates y from t0 to t1 (either direction). The observer is called as
/// obs(t, y) after every accepted step and may return false to stop early.
template <std::size_t N, class Rhs, class Observer>
OdeReport integrate_dopri(Rhs&& f, double t0, Vec<N>& y, double t1, const OdeOptions& opts,
                          Observer&& obs) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeReport rep;
    rep.t = t0;
    const double span = t1 - t0;
    if (span == 0.0) return rep;
    const double dir = span > 0 ? 1.0 : -1.0;

    double h = opts.h_init != 0.0 ? std::abs(opts.h_init) : std::min(std::abs(span), 1e-3 * std::max(1.0, std::abs(span)));
    h *= dir;

    double t = t0;
    Vec<N> k1 = f(t, y);
    while (dir * (t1 - t) > 0) {
        if (rep.accepted + rep.rejected >= opts.max_steps) {
            rep.status = OdeStatus::max_steps;
            break;
        }
        if (dir * (t + h - t1) > 0) h = t1 - t;

        const Vec<N> k2 = f(t + c2 * h, detail::axpy<N>(y, h, {{a21, &k1}}));
        const Vec<N> k3 = f(t + c3 * h, detail::axpy<N>(y, h, {{a31, &k1}, {a32, &k2}}));
        const Vec<N> k4 = f(t + c4 * h, detail::axpy<N>(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const Vec<N> k5 = f(t + c5 * h, detail::axpy<N>(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const Vec<N> k6 = f(t + h, detail::axpy<N>(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const Vec<N> y_new = detail::axpy<N>(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const Vec<N> k7 = f(t + h, y_new);

        double err = 0.0;
        bool finite = true;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            err += (ei / sc) * (ei / sc);
            finite = finite && std::isfinite(y_new[i]);
        }
        err = std::sqrt(err / static_cast<double>(N));
        if (!finite || !std::isfinite(err)) err = 1e10;

        if (err <= 1.0) {
            t += h;
            y = y_new;
            k1 = k7;
            ++rep.accepted;
            rep.t = t;
            const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            rep.h_next = h * fac;
            if (!obs(t, static_cast<const Vec<N>&>(y))) {
                rep.status = OdeStatus::stopped;
                return rep;
            }
            h = rep.h_next;
        } else {
            ++rep.rejected;
            h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
        }

        if (std::abs(h) < opts.h_min_rel * std::max(1.0, std::abs(t))) {
            rep.status = finite ? OdeStatus::step_collapse : OdeStatus::non_finite;
            return rep;
        }
    }
    rep.t = t;
    return rep;
}

template <std::size_t N, class Rhs>
OdeReport integrate_dopri(Rhs&& f, double t0, Vec<N>& y, double t1, const OdeOptions& opts = {}) {
    return integrate_dopri<N>(std::forward<Rhs>(f), t0, y, t1, opts,
                              [](double, const Vec<N>&) { return true; });
}

}  // namespace mis
