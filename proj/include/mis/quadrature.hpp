#pragma once

#include <functional>
#include <span>

namespace mis {

/// Tolerances for adaptive Gauss-Kronrod integration. Convergence is declared
/// when the summed error estimate drops below max(abs_tol, rel_tol * |I|).
struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    int max_intervals = 2000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    int intervals = 0;
    bool converged = false;
    bool finite = true;  // false if the integrand produced a non-finite value
};

using Integrand = std::function<double(double)>;

/// One G7/K15 panel on [a, b]; error is |K15 - G7|.
QuadratureResult gauss_kronrod_15(const Integrand& f, double a, double b);

/// Globally adaptive bisection (largest-error panel first) on [a, b].
QuadratureResult integrate(const Integrand& f, double a, double b,
                           const QuadratureOptions& opts = {});

/// Integrates piecewise over consecutive breakpoints (must be ascending);
/// the tolerance budget is split evenly across the pieces.
QuadratureResult integrate_piecewise(const Integrand& f, std::span<const double> breaks,
                                     const QuadratureOptions& opts = {});

}  // namespace mis
