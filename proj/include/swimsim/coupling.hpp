#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "swimsim/errors.hpp"
#include "swimsim/fluid.hpp"
#include "swimsim/forces.hpp"

namespace swimsim {

/// Body centres z_1..z_n at time t.
struct SwimmerState {
    std::vector<Vec3> z;
    double t = 0.0;
};

/// Piecewise-constant controls: interval [t_m, t_{m+1}) carries values[m]. Times past
/// the last breakpoint reuse the last interval.
class ControlSchedule {
public:
    ControlSchedule() = default;
    ControlSchedule(std::vector<double> breakpoints, std::vector<std::vector<double>> values);

    /// One interval starting at 0 that never ends.
    static ControlSchedule constant(std::vector<double> v);

    ControlSample at(double t) const;
    double v_inf() const;

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<std::vector<double>>& values() const { return values_; }

    /// Problems with the table for a swimmer with `joints` joints run to `horizon`.
    std::vector<std::string> validate(int joints, double horizon) const;

    friend bool operator==(const ControlSchedule&, const ControlSchedule&) = default;

private:
    std::vector<double> breakpoints_;
    std::vector<std::vector<double>> values_;
};

enum class ViolationKind { Collision, BoundaryContact, CollinearJoint, Degenerate };

std::string to_string(ViolationKind kind);

struct ViolationInfo {
    ViolationKind kind = ViolationKind::Collision;
    std::vector<int> indices;  ///< bodies (0-based) or the joint index
    double value = 0.0;        ///< the offending measure
    double threshold = 0.0;
    double t = 0.0;
    int step = 0;
    std::string message;
};

/// Thresholds of the runtime admissibility checks. Non-positive values select the defaults.
struct MonitorSettings {
    double collision_threshold = 0.0;  ///< default 2r
    double boundary_margin = -1.0;     ///< default one (largest) cell spacing
    double collinear = 1e-9;
    double degenerate = 0.0;           ///< default 1e-9 times the domain diagonal

    friend bool operator==(const MonitorSettings&, const MonitorSettings&) = default;
};

/// Thresholds with every default filled in.
struct ResolvedMonitor {
    double collision_threshold;
    double boundary_margin;
    double collinear;
    double degenerate;
};

ResolvedMonitor resolve(const MonitorSettings& s, const SwimmerConfig& cfg, const GridSpec& grid);

/// Geometric quantities watched by the monitor.
struct ConfigurationMeasures {
    double min_pair_distance = 0.0;
    int pair_i = -1, pair_j = -1;
    double min_boundary_margin = 0.0;
    int margin_body = -1;
    double min_collinearity = 1.0;  ///< |arm1 x arm2| / (|arm1| |arm2|); 1 when there are no joints
    int collinear_joint = -1;
    double min_adjacent_distance = 0.0;
    int adjacent_link = -1;
};

ConfigurationMeasures measure_configuration(std::span<const Vec3> z, const SwimmerConfig& cfg, const Domain& domain);

/// First failed check in the order adjacency, collinearity, collision, containment; never throws.
std::optional<ViolationInfo> monitor_wellposedness(std::span<const Vec3> z, const SwimmerConfig& cfg,
                                                   const Domain& domain, const ResolvedMonitor& thresholds);

struct DiagnosticsRecord {
    int step = 0;
    double t = 0.0;
    double net_force = 0.0;     ///< |grid integral of the force density|
    double force_scale = 0.0;   ///< Σ |d_i| mes(S_i)
    double net_torque = 0.0;    ///< |Σ (z_i - centroid) x d_i mes(S_i)|
    double torque_scale = 0.0;
    double kinetic = 0.0;
    double dissipation = 0.0;
    double power_in = 0.0;
    double divergence = 0.0;    ///< relative discrete divergence of the new velocity
    double min_pair_distance = 0.0;
    double min_boundary_margin = 0.0;
    double min_collinearity = 0.0;
    double picard_residual = 0.0;  ///< NaN outside Picard mode
    std::string status = "ok";
};

/// A run left the set where the model is defined.
class WellposednessViolation : public Error {
public:
    WellposednessViolation(ViolationInfo info, std::optional<DiagnosticsRecord> record = std::nullopt);
    const ViolationInfo& info() const { return info_; }
    const std::optional<DiagnosticsRecord>& record() const { return record_; }

private:
    ViolationInfo info_;
    std::optional<DiagnosticsRecord> record_;
};

/// Everything a coupled step needs besides the states.
struct CouplingContext {
    const SwimmerConfig& swimmer;
    const ControlSchedule& controls;
    StokesSolver& solver;
    ResolvedMonitor monitor;
    ForceGuards guards;
    int substeps = 1;
};

struct CoupledStepResult {
    SwimmerState swimmer;
    FluidState fluid;
    DiagnosticsRecord diagnostics;
};

/// Forces at z, one Stokes step, then z += dt * (average of the new velocity over each body).
/// Throws WellposednessViolation (with the diagnostics of the offending step) when the new
/// configuration fails the monitor.
CoupledStepResult coupled_step(const SwimmerState& z, const FluidState& fluid, const CouplingContext& ctx, double dt,
                               int step_index);

struct OutputSettings {
    std::string directory;  ///< empty: write nothing
    std::string trajectory_csv = "trajectory.csv";
    std::string diagnostics_csv = "diagnostics.csv";
    std::string snapshot_prefix = "field";
    int snapshot_every = 0;  ///< write a VTK file every this many steps; 0 disables

    friend bool operator==(const OutputSettings&, const OutputSettings&) = default;
};

struct PicardSettings {
    double window = 0.0;  ///< 0: the whole horizon
    int max_iterations = 50;
    double tolerance = 1e-10;  ///< on sup_n |u^{k+1}_n - u^k_n| relative to sup_n |u^{k+1}_n|

    friend bool operator==(const PicardSettings&, const PicardSettings&) = default;
};

struct ExperimentSettings {
    std::uint64_t seed = 20110901;
    int trials = 100;
    double radius = 0.01;                ///< perturbation radius for Lipschitz sampling
    std::vector<double> deltas{1e-6, 1e-7};
    double horizon = 0.0;                ///< 0: use dt * 5
    double h0 = 0.0;                     ///< shift radius; 0: r
    double K = 1.0;                      ///< embedding constant
    double L_energy = 1.0;
    double L_lip = 0.0;                  ///< force-map Lipschitz constant; 0: measured
    double q = 0.0;                      ///< 0: default 2 sqrt(L_energy) |y0| (1 if y0 = 0)
    double C_o = 0.0;                    ///< force-bound constant; 0: the explicit admissible-set bound

    friend bool operator==(const ExperimentSettings&, const ExperimentSettings&) = default;
};

/// A complete scenario.
struct ScenarioConfig {
    Domain domain;
    std::array<int, 3> cells{16, 16, 16};
    double nu = 1.0;
    double dt = 1e-3;
    double T = 1e-2;
    SwimmerConfig swimmer;
    std::vector<Vec3> centers;
    ControlSchedule controls;
    MonitorSettings monitor;
    double pressure_tol = 1e-12;
    double stokes_tol = 1e-12;
    int max_iterations = 2000;
    int substeps = 1;
    bool require_equal_measure = true;
    PicardSettings picard;
    ExperimentSettings experiment;
    OutputSettings output;
    std::string mode = "march";

    GridSpec grid() const { return GridSpec(domain, cells); }
    FluidParams fluid_params() const;
    int steps() const;  ///< ceil(T / dt), at least one

    /// Every problem with the scenario, including the admissibility of the initial configuration.
    std::vector<std::string> validate() const;
};

struct RunResult {
    std::vector<SwimmerState> trajectory;  ///< initial state plus one per accepted step
    std::vector<DiagnosticsRecord> diagnostics;  ///< one per step, including a violating one
    std::optional<ViolationInfo> violation;
    FluidState fluid;  ///< last accepted fluid state
    std::vector<std::string> snapshots;
    std::vector<FaceField> velocity;  ///< u_0..u_N when requested
};

/// March from rest to T or the first violation; writes the configured outputs.
RunResult run_scenario(const ScenarioConfig& cfg, bool keep_velocity = false);

/// A velocity history u_0..u_N on the uniform time mesh t_n = n dt.
using VelocitySeries = std::vector<FaceField>;

/// Decoupled body motion in a frozen velocity history: w_{n+1} = w_n + dt avg(u_{n+1}, w_n),
/// with `substeps` equal Euler sub-steps per interval. Checks the monitor after every step.
std::vector<SwimmerState> ode_map_A(const GridSpec& grid, const VelocitySeries& u, std::span<const Vec3> z0,
                                    const SwimmerConfig& cfg, double dt, int substeps,
                                    const std::optional<ResolvedMonitor>& monitor = std::nullopt);

struct PicardResult {
    VelocitySeries fluid;
    std::vector<SwimmerState> bodies;
    std::vector<double> residuals;  ///< relative update size per iteration
    int iterations = 0;
    bool converged = false;
};

/// u^{k+1} = B(F(A(u^k))) from u^0 = 0 over [0, window]. Throws NoConvergence with the
/// residual history when max_iterations is reached first.
PicardResult picard_solve(const ScenarioConfig& cfg, double window, int max_iterations, double tolerance);

/// CSV output with 17 significant digits.
void write_trajectory_csv(const std::string& path, const std::vector<SwimmerState>& trajectory);
void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records);
std::string format_double(double v);

}  // namespace swimsim
