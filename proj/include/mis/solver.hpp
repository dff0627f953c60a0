#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mis/constitutive.hpp"
#include "mis/state.hpp"

namespace mis {

enum class GridKind { planar, radial };

/// Cell-centred grid: radial r in [0, L], planar x in [-L, L].
struct Grid1D {
    GridKind kind = GridKind::radial;
    int cells = 0;
    double length = 0.0;
    double spacing = 0.0;

    static Grid1D make(GridKind kind, int cells, double length);
    double coord(int i) const;
    /// Spatial dimension entering the geometric source and the volume element.
    int dimension() const { return kind == GridKind::radial ? 3 : 1; }
    /// Volume weight for the cell: 4 pi r^2 dr or dx.
    double volume(int i) const;
};

/// Structure-of-arrays fields with two ghost cells on each side.
struct Fields {
    static constexpr int ghosts = 2;
    std::vector<double> rho, n, Pi, u;

    explicit Fields(int cells = 0);
    int cells() const { return static_cast<int>(rho.size()) - 2 * ghosts; }
    FluidState at(int i) const {
        const auto k = static_cast<std::size_t>(i + ghosts);
        return {rho[k], n[k], Pi[k], {u[k], 0.0, 0.0}};
    }
    void set(int i, const FluidState& s);
};

using Profile = std::function<FluidState(double)>;
Fields initial_fields(const Grid1D& grid, const Profile& profile);

struct SchemeOptions {
    double cfl = 0.4;
    double dissipation = 0.05;  // Kreiss-Oliger strength
    bool freeze_bulk = false;   // Pi held fixed and dropped from the sound speed (relativistic Euler)
};

/// Fills ghost cells: parity at the radial origin (u odd), background elsewhere.
void fill_ghosts(const Grid1D& grid, const ConstantState& background, Fields& f);

/// Time derivatives for interior cells; ghosts of `in` must be filled.
void rhs_serial(const Grid1D& grid, const ConstitutiveSet& set, const SchemeOptions& scheme, const Fields& in,
                Fields& out);
void rhs_parallel(const Grid1D& grid, const ConstitutiveSet& set, const SchemeOptions& scheme, const Fields& in,
                  Fields& out);

struct StepWorkspace {
    Fields k1, k2, k3, k4, stage;
    explicit StepWorkspace(int cells = 0) : k1(cells), k2(cells), k3(cells), k4(cells), stage(cells) {}
};

/// One classical RK4 step.
void rk4_step(const Grid1D& grid, const ConstitutiveSet& set, const ConstantState& background,
              const SchemeOptions& scheme, double dt, Fields& f, StepWorkspace& ws, bool parallel = true);

/// Largest characteristic speed |lambda| over the grid (at most 1 on physical states).
double max_characteristic_speed(const Grid1D& grid, const ConstitutiveSet& set, const Fields& f);

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

struct Integrals {
    double E = 0.0;         // int (T00 - rho_bar)
    double I = 0.0;         // 1/2 int |x|^2 (T00 - rho_bar)
    double Q = 0.0;         // int x . T0k
    double T_kin = 0.0;     // int e |u|^2
    double pressure = 0.0;  // d int (p + Pi - p_bar)
};

Integrals volume_integrals(const Grid1D& grid, const ConstitutiveSet& set, const ConstantState& background,
                           const Fields& f);

struct DiagnosticsRow {
    double t = 0.0;
    double E = 0.0, I = 0.0, Q = 0.0, T_kin = 0.0;
    double virial_residual = std::numeric_limits<double>::quiet_NaN();
    double Idot_minus_Q = std::numeric_limits<double>::quiet_NaN();
    double max_grad_u = 0.0;
    double min_cs2 = 0.0, max_cs2 = 0.0;
    double min_e = 0.0, max_abs_Pi = 0.0;
    double support_radius = 0.0;
    double z = 0.0;
    double pressure_integral = 0.0;  // d int (p + Pi - p_bar), kept for the residual
};

const std::vector<std::string>& diagnostics_columns();
std::vector<double> diagnostics_values(const DiagnosticsRow& row);

/// Fills the centred-difference residual columns; rows at either end, or whose
/// neighbours are not equally spaced, stay NaN.
void fill_residuals(std::vector<DiagnosticsRow>& rows);

struct QBoundCheck {
    bool holds = true;
    double quadratic_margin = 0.0;  // R^2 (2 (E + b R^3) - T) T - Q^2
    double linear_margin = 0.0;     // R (E + b R^3) - |Q|
};

QBoundCheck check_q_bounds(double Q, double T_kin, double E, double b, double R, double tol = 1e-9);

/// max over cells outside |x| <= R0 + c t of the deviation from the background.
double finite_propagation_deviation(const Grid1D& grid, const ConstantState& background, const Fields& f,
                                    double radius);

// ---------------------------------------------------------------------------
// Breakdown
// ---------------------------------------------------------------------------

enum class BreakdownCause { none, gradient_blowup, left_physical_set, wec_violation, pi_bound_violation,
                            numerical_failure };

std::string to_string(BreakdownCause cause);

struct BreakdownThresholds {
    double grad_factor = 1e3;  // relative to the initial C1 measure
    double grad_max = 0.0;     // absolute override when > 0
    double delta = 1e-6;       // margin for the physical set, WEC and Pi bound
};

struct BreakdownReport {
    bool triggered = false;
    double time = 0.0;
    BreakdownCause cause = BreakdownCause::none;
    int cell = -1;
    double coord = 0.0;
    double value = 0.0;
    bool pi_bound_enabled = true;
    std::string note;
};

/// sum over rho, n, Pi of (sup |f| + sup |f'|) plus max(|u'|, |u/r|), with
/// one-sided second-order derivatives.
double c1_measure(const Grid1D& grid, const Fields& f, double* max_grad_u = nullptr);

/// Checks in order: non-finite values, physical set, WEC, Pi bound, C1 growth.
BreakdownReport detect_breakdown(const Grid1D& grid, const ConstitutiveSet& set, const Fields& f,
                                 const BreakdownThresholds& th, double grad_limit, double pi_bound,
                                 bool pi_bound_enabled);

// ---------------------------------------------------------------------------
// Full runs
// ---------------------------------------------------------------------------

struct RunSetup {
    ConstantState background;
    double R0 = 1.0;          // support radius of the data
    double c = 0.0;           // background sound speed
    double b = 0.0;           // constant of the Q bounds
    double pi_bound = std::numeric_limits<double>::infinity();
    bool pi_bound_enabled = true;
};

struct RunOptions {
    SchemeOptions scheme;
    BreakdownThresholds thresholds;
    double t_max = 1.0;
    double output_interval = 0.01;
    bool parallel = true;
    bool keep_snapshots = false;
    bool stop_at_breakdown = true;
};

struct MonitorRow {
    double t = 0.0;
    double leak = 0.0;  // finite_propagation_deviation at R0 + c t
    QBoundCheck q_bounds;
};

struct Snapshot {
    double t = 0.0;
    Fields fields;
};

struct SolutionRun {
    Grid1D grid;
    double dt = 0.0;
    long steps = 0;
    std::vector<DiagnosticsRow> rows;
    std::vector<MonitorRow> monitors;
    std::vector<Snapshot> snapshots;
    Fields final_fields;
    BreakdownReport breakdown;
    double initial_c1 = 0.0;
};

SolutionRun simulate(const Grid1D& grid, const ConstitutiveSet& set, const RunSetup& setup, const Fields& initial,
                     const RunOptions& opts);

}  // namespace mis
