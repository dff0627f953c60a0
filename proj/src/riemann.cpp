#include "mis/riemann.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mis {

double PlanarState::u0() const { return std::sqrt(1.0 + u1 * u1); }

QuasilinearSystem quasilinear_matrices(const BarotropicView& view, const PlanarState& s) {
    QuasilinearSystem out;
    const double w = s.rho + s.q;
    out.degenerate = w == 0.0;
    const double u0 = s.u0();
    const double u1 = s.u1;
    const double c2 = out.degenerate ? view.dp_drho(s.rho) : view.c_sq(s.rho, s.q);
    out.c_sq = c2;

    out.A0 = {{{u0, w * u1 / u0, 0.0}, {0.0, w / u0, u1 / u0}, {0.0, c2 * w * u1 / u0, u0}}};
    out.A1 = {{{u1, w, 0.0}, {0.0, w * u1 / (u0 * u0), 1.0}, {0.0, c2 * w, u1}}};

    const double Pi = s.q - view.pressure(s.rho);
    out.B = {0.0, 0.0, (Pi + view.lambda(s.rho) * Pi * Pi) / view.tau0(s.rho)};
    return out;
}

double determinant(const Mat3& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

std::optional<Mat3> inverse(const Mat3& m) {
    const double det = determinant(m);
    if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
    Mat3 r{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            // cofactor of m[j][i]
            const int a = (j + 1) % 3, b = (j + 2) % 3, c = (i + 1) % 3, d = (i + 2) % 3;
            r[i][j] = (m[a][c] * m[b][d] - m[a][d] * m[b][c]) / det;
        }
    }
    return r;
}

Mat3 multiply(const Mat3& a, const Mat3& b) {
    Mat3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
    return r;
}

EigenSystem eigensystem(const BarotropicView& view, const PlanarState& s) {
    const double w = s.rho + s.q;
    if (w == 0.0) throw std::domain_error("rho + q vanishes");
    const double c2 = view.c_sq(s.rho, s.q);
    if (!(c2 >= 0.0)) throw std::domain_error("negative c^2");
    EigenSystem es;
    es.c = std::sqrt(c2);
    const double c = es.c, u0 = s.u0(), u1 = s.u1;
    es.lambdas = {u1 / u0, (u1 + c * u0) / (c * u1 + u0), (-u1 + c * u0) / (c * u1 - u0)};
    const double h = w * c / u0;
    es.left = {Vec3{-c2, 0.0, 1.0}, Vec3{0.0, h, 1.0}, Vec3{0.0, -h, 1.0}};
    return es;
}

double eigen_residual(const BarotropicView& view, const PlanarState& s) {
    const auto sys = quasilinear_matrices(view, s);
    const auto inv = inverse(sys.A0);
    if (!inv) throw std::domain_error("A0 is singular");
    const Mat3 M = multiply(*inv, sys.A1);
    const auto es = eigensystem(view, s);
    double worst = 0.0;
    for (int A = 0; A < 3; ++A) {
        const auto& l = es.left[A];
        const double scale = std::max({std::abs(l[0]), std::abs(l[1]), std::abs(l[2]), 1.0});
        for (int j = 0; j < 3; ++j) {
            double r = -es.lambdas[A] * l[j];
            for (int i = 0; i < 3; ++i) r += l[i] * M[i][j];
            worst = std::max(worst, std::abs(r) / scale);
        }
    }
    return worst;
}

double left_vector_determinant(const EigenSystem& es) {
    return determinant(Mat3{es.left[0], es.left[1], es.left[2]});
}

std::optional<double> necessary_condition_residual(const BarotropicView& view, double rho, double q) {
    const double w = rho + q;
    if (w == 0.0) return std::nullopt;
    return 0.5 * view.zeta_over_tau0(rho) / w + view.dp_drho(rho);
}

double eigenvector_weight(const BarotropicView& view, const PlanarState& s) {
    const double c2 = view.c_sq(s.rho, s.q);
    return (s.rho + s.q) * std::sqrt(std::max(c2, 0.0)) / s.u0();
}

double curl_obstruction(const BarotropicView& view, const std::vector<PlanarState>& states) {
    double worst = 0.0;
    for (const auto& s : states) {
        const double hq = 1e-5 * (1.0 + std::abs(s.q));
        PlanarState plus = s, minus = s;
        plus.q += hq;
        minus.q -= hq;
        const double d = (eigenvector_weight(view, plus) - eigenvector_weight(view, minus)) / (2.0 * hq);
        worst = std::max(worst, std::abs(d));
    }
    return worst;
}

}  // namespace mis
