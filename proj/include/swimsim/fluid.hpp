#pragma once

#include <array>
#include <optional>
#include <string>

#include "swimsim/fast_transforms.hpp"
#include "swimsim/geometry.hpp"
#include "swimsim/grid.hpp"

namespace swimsim {

/// Discrete velocity (MAC faces), pressure (cells) and time.
struct FluidState {
    FaceField u;
    CellField p;
    double t = 0.0;

    FluidState() = default;
    explicit FluidState(const GridSpec& g) : u(g), p(g) {}
};

enum class PoissonMethod {
    Preconditioned,  ///< CG preconditioned by the exact fast Neumann solver
    Plain,           ///< unpreconditioned CG
};

struct FluidParams {
    double nu = 1.0;
    double pressure_tol = 1e-12;  ///< relative residual of the pressure Poisson solve
    double stokes_tol = 1e-12;    ///< relative residual of the implicit Stokes solve
    int max_iterations = 2000;
    PoissonMethod poisson = PoissonMethod::Preconditioned;
};

struct SolveStats {
    int pressure_iterations = 0;
    int stokes_iterations = 0;
    double stokes_residual = 0.0;
};

// Discrete operators. Divergence and gradient are negative adjoints of each other in
// the volume-weighted inner products; their composition is the Neumann Laplacian.
CellField divergence(const GridSpec& g, const FaceField& u);
FaceField gradient(const GridSpec& g, const CellField& phi);
/// Vector Laplacian on faces; tangential no-slip enters through odd reflection at the walls.
FaceField laplacian(const GridSpec& g, const FaceField& u);
CellField neumann_laplacian(const GridSpec& g, const CellField& phi);
/// Volume-weighted sum of squared differences over all edges, including the half-edges to the walls.
double gradient_norm_squared(const GridSpec& g, const FaceField& u);
/// |div u| / (|u| / h_min); zero for the zero field.
double relative_divergence(const GridSpec& g, const FaceField& u);

struct Projection {
    FaceField u;   ///< divergence-free part
    CellField p;   ///< potential with u_in = u + grad p, zero mean
    int iterations = 0;
};

/// Backward-Euler Stokes solver on a box with no-slip walls.
class StokesSolver {
public:
    StokesSolver(const GridSpec& grid, const FluidParams& params);

    const GridSpec& grid() const { return grid_; }
    const FluidParams& params() const { return params_; }

    /// Leray projection: u = u_df + grad p with div u_df = 0.
    Projection project(const FaceField& u);

    /// Solves (u' - u)/dt = nu Δu' + f - grad p', div u' = 0 with u' = 0 on the walls.
    FluidState step(const FluidState& state, const ForceDensityField& f, double dt);
    /// Same with the forcing already given on faces.
    FluidState step_faces(const FluidState& state, const FaceField& f, double dt);

    const SolveStats& last_stats() const { return stats_; }

private:
    CellField solve_pressure(const CellField& rhs, int& iterations);
    FaceField helmholtz_inverse(const FaceField& r, double a);
    FaceField project_only(const FaceField& u);

    GridSpec grid_;
    FluidParams params_;
    SeparableSolver pressure_;
    std::array<SeparableSolver, 3> velocity_;
    SolveStats stats_;
};

/// Mean velocity over the cells whose centres lie in the translated shape.
Vec3 average_velocity(const GridSpec& g, const FaceField& u, const BodyShape& shape, const Vec3& center);

struct EnergyReport {
    double kinetic = 0.0;      ///< ½|u|²
    double dissipation = 0.0;  ///< nu |∇u|²
    double power_in = 0.0;     ///< (f, u)
};

EnergyReport energy_report(const GridSpec& g, const FluidState& state, const ForceDensityField& f, double nu);
EnergyReport energy_report_faces(const GridSpec& g, const FaceField& u, const FaceField& f, double nu);

/// Per-step budget of the implicit scheme:
/// K(u1) - K(u0) + ½|u1 - u0|² + dt D(u1) - dt P(u1) = residual (zero up to solver tolerance).
struct StepEnergyBalance {
    double kinetic_change = 0.0;
    double numerical_dissipation = 0.0;
    double viscous_dissipation = 0.0;  ///< dt D(u1)
    double work = 0.0;                 ///< dt P(u1)
    double residual = 0.0;
    double scale = 0.0;                ///< sum of the magnitudes of the terms
};

StepEnergyBalance step_energy_balance(const GridSpec& g, const FaceField& u0, const FaceField& u1, const FaceField& f,
                                      double dt, double nu);

/// Legacy VTK structured points (ASCII) with cell-centred velocity vectors and pressure.
void write_vtk(const std::string& path, const GridSpec& g, const FluidState& state);

}  // namespace swimsim
