#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "swarmheat/controller.hpp"
#include "swarmheat/field.hpp"

namespace swarmheat {

/// Explicit finite-difference solvers on cell-centered grids with zero-flux
/// (Neumann) walls. These work on fields directly and share no code with the
/// particle path, so they serve as an independent reference for it.
struct GridSolverConfig {
    double dt = 1e-5;
    double D = 5.0;

    /// Throws std::invalid_argument unless dt * D <= 0.25 * min(dx, dy)^2.
    void validate_for(const ScalarField& grid) const;

    /// Largest stable step scaled by `fraction` (of the 0.25 h^2 / D bound).
    static GridSolverConfig stable(const ScalarField& grid, double D, double fraction = 0.2);
};

enum class FluxScheme { upwind, central };

struct VelocityGrid {
    ScalarField vx;
    ScalarField vy;
};

/// Phi + dt D Lap(Phi) with the 5-point Laplacian and mirrored ghost cells.
ScalarField heat_step(const ScalarField& phi, const GridSolverConfig& cfg);

/// f - dt div(v f) in conservative flux form. Face velocities are averages of
/// the adjacent cell-center velocities; wall faces carry no flux. Throws
/// std::invalid_argument when max|v| dt > 0.5 min(dx, dy).
ScalarField continuity_step(const ScalarField& f, const VelocityGrid& v, double dt,
                            FluxScheme scheme = FluxScheme::upwind);

/// Central-difference gradient at cell centers with mirrored ghosts.
VelocityGrid central_gradient(const ScalarField& phi);

/// 1/2 int |grad Phi|^2 (midpoint rule, central differences).
double lyapunov(const ScalarField& phi);

/// Feedback velocity evaluated on the grid: v = -D grad(f - f_d) / max(f, f_floor).
VelocityGrid control_velocity_grid(const ScalarField& f, const ScalarField& desired,
                                   const ControlLaw& law);

double max_speed(const VelocityGrid& v);

// ---------------------------------------------------------------------------
// Canned oracle checks (shared by the CLI and the acceptance suite).

struct EigenmodeReport {
    double t_final = 0.0;           // one e-folding time 1/(D (pi/L)^2)
    double measured_ratio = 0.0;    // amplitude(t_final) / amplitude(0)
    double analytic_ratio = 0.0;    // exp(-D (pi/L)^2 t_final)
    double relative_error = 0.0;
    std::size_t steps = 0;
};

/// Evolves Phi = cos(pi x / L) on an n-by-n grid over [0, L]^2.
EigenmodeReport heat_eigenmode_check(double L, std::size_t n, double D, double fraction = 0.2);

struct TransformationReport {
    double relative_l2 = 0.0;  // ||continuity increment - heat increment|| / ||heat increment||
    double mass_drift = 0.0;   // |int f_new - int f|
    double dt = 0.0;
};

/// Compares one continuity_step under the grid feedback velocity with one
/// heat_step on Phi = f - f_d, for smooth analytic f and f_d on [0, L]^2.
TransformationReport transformation_check(double L, std::size_t n, double D,
                                          FluxScheme scheme = FluxScheme::central);

/// Random smooth field: a few cosine modes compatible with the Neumann walls,
/// shifted so its mean is `mean`.
ScalarField random_smooth_field(const Domain& domain, std::size_t n, std::uint64_t seed,
                                double mean = 0.0, int max_mode = 4, int modes = 6);

struct LyapunovReport {
    bool monotone = true;
    std::vector<double> values;  // V after each step, values[0] = initial
    double initial_max_dev = 0.0;  // max |Phi_0 - mean|
    double final_max_dev = 0.0;    // max |Phi_T - mean|
    double mean = 0.0;             // int Phi / area
};

/// Runs `steps` heat steps and tracks V and the deviation from the mean.
LyapunovReport lyapunov_decay(ScalarField phi, const GridSolverConfig& cfg, std::size_t steps);

}  // namespace swarmheat
