#pragma once

#include <array>
#include <optional>
#include <vector>

#include "mis/constitutive.hpp"

namespace mis {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

/// p, zeta, tau0, lambda as functions of rho alone. Sets with n-dependence are
/// evaluated at the fixed number density n_ref (`frozen_n` is then true).
struct BarotropicView {
    const ConstitutiveSet* set = nullptr;
    double n_ref = 1.0;

    explicit BarotropicView(const ConstitutiveSet& s, double n = 1.0) : set(&s), n_ref(n) {}
    bool frozen_n() const { return !set->is_barotropic(); }
    double pressure(double rho) const { return set->pressure(rho, n_ref); }
    double dp_drho(double rho) const { return set->dp_drho(rho, n_ref); }
    double zeta_over_tau0(double rho) const { return set->zeta_over_tau0(rho, n_ref); }
    double tau0(double rho) const { return set->tau0(rho, n_ref); }
    double lambda(double rho) const { return set->lambda(rho, n_ref); }
    /// c^2 = dp/drho + zeta / (tau0 (rho + q))
    double c_sq(double rho, double q) const { return dp_drho(rho) + zeta_over_tau0(rho) / (rho + q); }
};

/// Planar state Psi = (rho, u1, q) with q = p + Pi.
struct PlanarState {
    double rho = 1.0;
    double u1 = 0.0;
    double q = 0.0;
    double u0() const;
};

struct QuasilinearSystem {
    Mat3 A0{};
    Mat3 A1{};
    Vec3 B{};
    double c_sq = 0.0;
    bool degenerate = false;  // rho + q == 0
};

/// A0 d_t Psi + A1 d_x Psi + B = 0 for the planar system.
QuasilinearSystem quasilinear_matrices(const BarotropicView& view, const PlanarState& s);

double determinant(const Mat3& m);
std::optional<Mat3> inverse(const Mat3& m);
Mat3 multiply(const Mat3& a, const Mat3& b);

struct EigenSystem {
    Vec3 lambdas{};
    std::array<Vec3, 3> left{};
    double c = 0.0;
};

/// Requires 0 <= c^2 and rho + q != 0; throws std::domain_error otherwise.
EigenSystem eigensystem(const BarotropicView& view, const PlanarState& s);

/// max over A and components of |l^A (A0^{-1} A1 - lambda^A Id)|.
double eigen_residual(const BarotropicView& view, const PlanarState& s);

/// det of the stacked left eigenvectors; -2 c^3 (rho + q) / u0 in closed form.
double left_vector_determinant(const EigenSystem& es);

/// 1/2 zeta / (tau0 (rho + q)) + dp/drho; empty when rho + q == 0.
std::optional<double> necessary_condition_residual(const BarotropicView& view, double rho, double q);

/// h = (rho + q) c / u0 for the second left eigenvector.
double eigenvector_weight(const BarotropicView& view, const PlanarState& s);

/// max |dh/dq| over the states, by central differences with step 1e-5 (1 + |q|).
double curl_obstruction(const BarotropicView& view, const std::vector<PlanarState>& states);

}  // namespace mis
