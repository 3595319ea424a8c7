#include "swimsim/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace swimsim {

ControlSchedule::ControlSchedule(std::vector<double> breakpoints, std::vector<std::vector<double>> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {}

ControlSchedule ControlSchedule::constant(std::vector<double> v) { return ControlSchedule({0.0}, {std::move(v)}); }

ControlSample ControlSchedule::at(double t) const {
    if (values_.empty()) return {};
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    const std::size_t m = it == breakpoints_.begin() ? 0 : static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    return {values_[std::min(m, values_.size() - 1)]};
}

double ControlSchedule::v_inf() const {
    double m = 0.0;
    for (const auto& row : values_)
        for (double v : row) m = std::max(m, std::fabs(v));
    return m;
}

std::vector<std::string> ControlSchedule::validate(int joints, double horizon) const {
    std::vector<std::string> errors;
    if (breakpoints_.empty()) {
        errors.push_back("control schedule is empty");
        return errors;
    }
    if (breakpoints_.size() != values_.size())
        errors.push_back("control schedule needs one value row per breakpoint");
    if (!(breakpoints_.front() <= 0.0)) errors.push_back("control schedule must start at t = 0");
    for (std::size_t m = 1; m < breakpoints_.size(); ++m)
        if (!(breakpoints_[m] > breakpoints_[m - 1]))
            errors.push_back("control breakpoints must be strictly increasing");
    for (std::size_t m = 0; m < values_.size(); ++m) {
        if (static_cast<int>(values_[m].size()) != joints)
            errors.push_back("control row " + std::to_string(m) + " has " + std::to_string(values_[m].size()) +
                             " entries, expected " + std::to_string(joints));
        for (double v : values_[m])
            if (!std::isfinite(v)) errors.push_back("control row " + std::to_string(m) + " has a non-finite entry");
    }
    if (!(horizon > 0.0)) errors.push_back("control horizon must be positive");
    return errors;
}

std::string to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::Collision: return "Collision";
        case ViolationKind::BoundaryContact: return "BoundaryContact";
        case ViolationKind::CollinearJoint: return "CollinearJoint";
        case ViolationKind::Degenerate: return "Degenerate";
    }
    return "Unknown";
}

ResolvedMonitor resolve(const MonitorSettings& s, const SwimmerConfig& cfg, const GridSpec& grid) {
    return {
        s.collision_threshold > 0.0 ? s.collision_threshold : 2.0 * cfg.r,
        s.boundary_margin >= 0.0 ? s.boundary_margin : grid.max_spacing(),
        s.collinear > 0.0 ? s.collinear : 1e-9,
        s.degenerate > 0.0 ? s.degenerate : 1e-9 * grid.domain.diagonal(),
    };
}

ConfigurationMeasures measure_configuration(std::span<const Vec3> z, const SwimmerConfig& cfg, const Domain& domain) {
    ConfigurationMeasures m;
    const int n = static_cast<int>(z.size());
    m.min_pair_distance = std::numeric_limits<double>::infinity();
    m.min_boundary_margin = std::numeric_limits<double>::infinity();
    m.min_adjacent_distance = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double margin = boundary_margin(cfg.shapes[i], z[i], domain);
        if (margin < m.min_boundary_margin) {
            m.min_boundary_margin = margin;
            m.margin_body = i;
        }
        for (int j = i + 1; j < n; ++j) {
            const double d = norm(z[i] - z[j]);
            if (d < m.min_pair_distance) {
                m.min_pair_distance = d;
                m.pair_i = i;
                m.pair_j = j;
            }
            if (j == i + 1 && d < m.min_adjacent_distance) {
                m.min_adjacent_distance = d;
                m.adjacent_link = i;
            }
        }
    }
    for (int j = 0; j + 2 < n; ++j) {
        const Vec3 arm1 = z[j] - z[j + 1], arm2 = z[j + 2] - z[j + 1];
        const double denom = norm(arm1) * norm(arm2);
        const double c = denom > 0.0 ? norm(cross(arm1, arm2)) / denom : 0.0;
        if (c < m.min_collinearity) {
            m.min_collinearity = c;
            m.collinear_joint = j;
        }
    }
    return m;
}

std::optional<ViolationInfo> monitor_wellposedness(std::span<const Vec3> z, const SwimmerConfig& cfg,
                                                   const Domain& domain, const ResolvedMonitor& th) {
    const ConfigurationMeasures m = measure_configuration(z, cfg, domain);
    std::ostringstream os;
    os.precision(17);
    if (m.adjacent_link >= 0 && !(m.min_adjacent_distance > th.degenerate)) {
        os << "bodies " << m.adjacent_link + 1 << " and " << m.adjacent_link + 2 << " coincide (distance "
           << m.min_adjacent_distance << ")";
        return ViolationInfo{ViolationKind::Degenerate, {m.adjacent_link, m.adjacent_link + 1},
                             m.min_adjacent_distance, th.degenerate, 0.0, 0, os.str()};
    }
    if (m.collinear_joint >= 0 && !(m.min_collinearity > th.collinear)) {
        os << "joint " << m.collinear_joint + 1 << " is collinear (sine " << m.min_collinearity << ")";
        return ViolationInfo{ViolationKind::CollinearJoint, {m.collinear_joint}, m.min_collinearity, th.collinear,
                             0.0, 0, os.str()};
    }
    if (m.pair_i >= 0 && !(m.min_pair_distance > th.collision_threshold)) {
        os << "bodies " << m.pair_i + 1 << " and " << m.pair_j + 1 << " are " << m.min_pair_distance
           << " apart, threshold " << th.collision_threshold;
        return ViolationInfo{ViolationKind::Collision, {m.pair_i, m.pair_j}, m.min_pair_distance,
                             th.collision_threshold, 0.0, 0, os.str()};
    }
    if (m.margin_body >= 0 && !(m.min_boundary_margin > th.boundary_margin)) {
        os << "body " << m.margin_body + 1 << " is " << m.min_boundary_margin << " from the wall, margin "
           << th.boundary_margin;
        return ViolationInfo{ViolationKind::BoundaryContact, {m.margin_body}, m.min_boundary_margin,
                             th.boundary_margin, 0.0, 0, os.str()};
    }
    return std::nullopt;
}

WellposednessViolation::WellposednessViolation(ViolationInfo info, std::optional<DiagnosticsRecord> record)
    : Error(to_string(info.kind) + " at step " + std::to_string(info.step) + ": " + info.message),
      info_(std::move(info)),
      record_(std::move(record)) {}

namespace {

[[noreturn]] void throw_violation(ViolationKind kind, std::vector<int> indices, const std::string& what, double t,
                                  int step) {
    ViolationInfo info{kind, std::move(indices), 0.0, 0.0, t, step, what};
    throw WellposednessViolation(std::move(info));
}

// Force assembly and spreading with the library's geometric errors turned into violations.
ForceDensityField force_field(std::span<const Vec3> z, const ControlSample& v, const SwimmerConfig& cfg,
                              const ForceGuards& guards, const GridSpec& grid, double t, int step,
                              BodyForceSet* body_forces = nullptr) {
    try {
        BodyForceSet forces = assemble_body_forces(z, v, cfg, guards);
        ForceDensityField f = spread_to_grid(forces, z, cfg, grid);
        if (body_forces) *body_forces = std::move(forces);
        return f;
    } catch (const CollinearJoint& e) {
        throw_violation(ViolationKind::CollinearJoint, {e.joint()}, e.what(), t, step);
    } catch (const DegenerateConfiguration& e) {
        throw_violation(ViolationKind::Degenerate, {e.index()}, e.what(), t, step);
    } catch (const BodyOutsideDomain& e) {
        throw_violation(ViolationKind::BoundaryContact, {e.body()}, e.what(), t, step);
    }
}

// Euler sub-steps of the set-averaged velocity rule in a frozen field.
std::vector<Vec3> advect(const GridSpec& grid, const FaceField& u, std::span<const Vec3> z, const SwimmerConfig& cfg,
                         double dt, int substeps, double t, int step) {
    std::vector<Vec3> w(z.begin(), z.end());
    const double h = dt / substeps;
    for (int s = 0; s < substeps; ++s) {
        for (int i = 0; i < cfg.n(); ++i) {
            try {
                w[i] += average_velocity(grid, u, cfg.shapes[i], w[i]) * h;
            } catch (const BodyOutsideDomain& e) {
                throw_violation(ViolationKind::BoundaryContact, {i}, e.what(), t, step);
            }
        }
    }
    return w;
}

Vec3 centroid(std::span<const Vec3> z) {
    Vec3 c;
    for (const Vec3& p : z) c += p;
    return c / static_cast<double>(z.size());
}

}  // namespace

CoupledStepResult coupled_step(const SwimmerState& z, const FluidState& fluid, const CouplingContext& ctx, double dt,
                               int step_index) {
    const GridSpec& grid = ctx.solver.grid();
    const SwimmerConfig& cfg = ctx.swimmer;
    const double t_next = z.t + dt;

    BodyForceSet forces;
    const ForceDensityField f = force_field(z.z, ctx.controls.at(z.t), cfg, ctx.guards, grid, z.t, step_index, &forces);

    CoupledStepResult out;
    out.fluid = ctx.solver.step(fluid, f, dt);
    out.swimmer.z = advect(grid, out.fluid.u, z.z, cfg, dt, ctx.substeps, t_next, step_index);
    out.swimmer.t = t_next;

    DiagnosticsRecord& d = out.diagnostics;
    d.step = step_index;
    d.t = t_next;
    d.net_force = norm(grid_integral(grid, f));
    d.force_scale = force_scale(forces, cfg);
    const Vec3 pivot = centroid(z.z);
    d.net_torque = norm(net_torque(forces, z.z, cfg, pivot));
    d.torque_scale = torque_scale(forces, z.z, cfg, pivot);
    const EnergyReport e = energy_report(grid, out.fluid, f, ctx.solver.params().nu);
    d.kinetic = e.kinetic;
    d.dissipation = e.dissipation;
    d.power_in = e.power_in;
    d.divergence = relative_divergence(grid, out.fluid.u);
    const ConfigurationMeasures m = measure_configuration(out.swimmer.z, cfg, grid.domain);
    d.min_pair_distance = m.min_pair_distance;
    d.min_boundary_margin = m.min_boundary_margin;
    d.min_collinearity = m.min_collinearity;
    d.picard_residual = std::numeric_limits<double>::quiet_NaN();

    if (auto v = monitor_wellposedness(out.swimmer.z, cfg, grid.domain, ctx.monitor)) {
        v->t = t_next;
        v->step = step_index;
        d.status = to_string(v->kind);
        throw WellposednessViolation(std::move(*v), d);
    }
    return out;
}

FluidParams ScenarioConfig::fluid_params() const {
    FluidParams p;
    p.nu = nu;
    p.pressure_tol = pressure_tol;
    p.stokes_tol = stokes_tol;
    p.max_iterations = max_iterations;
    return p;
}

int ScenarioConfig::steps() const {
    return std::max(1, static_cast<int>(std::ceil(T / dt - 1e-9)));
}

std::vector<std::string> ScenarioConfig::validate() const {
    std::vector<std::string> errors;
    auto positive = [&](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) errors.push_back(std::string(name) + " must be positive");
    };
    for (int a = 0; a < 3; ++a) {
        if (!(domain.extents[a] > 0.0)) errors.push_back("domain extents must be positive");
        if (cells[a] < 8) errors.push_back("grid needs at least 8 cells per axis");
    }
    positive(nu, "nu");
    positive(dt, "dt");
    positive(T, "T");
    positive(pressure_tol, "pressure_tol");
    positive(stokes_tol, "stokes_tol");
    if (max_iterations < 1) errors.push_back("max_iterations must be at least 1");
    if (substeps < 1) errors.push_back("substeps must be at least 1");
    if (output.snapshot_every < 0) errors.push_back("snapshot_every must be non-negative");
    if (picard.max_iterations < 1) errors.push_back("picard.max_iterations must be at least 1");
    if (!(picard.window >= 0.0)) errors.push_back("picard.window must be non-negative");
    positive(picard.tolerance, "picard.tolerance");

    for (auto& m : swimmer.validate(require_equal_measure)) errors.push_back(std::move(m));
    if (static_cast<int>(centers.size()) != swimmer.n())
        errors.push_back("expected " + std::to_string(swimmer.n()) + " initial centers, got " +
                         std::to_string(centers.size()));
    for (auto& m : controls.validate(std::max(swimmer.joints(), 0), T)) errors.push_back(std::move(m));

    if (static_cast<int>(centers.size()) == swimmer.n() && swimmer.l.size() + 1 == centers.size() &&
        swimmer.n() > 0) {
        const auto report = validate_assumption_21(swimmer.shapes, centers, swimmer.l, swimmer.r, domain);
        for (const auto& v : report.violations) {
            // these clauses are already reported by the swimmer validation
            if (v.clause == Assumption21Clause::BodyCount || v.clause == Assumption21Clause::RestLength ||
                v.clause == Assumption21Clause::ShapeRadius)
                continue;
            errors.push_back(v.message);
        }
    }
    return errors;
}

void write_trajectory_csv(const std::string& path, const std::vector<SwimmerState>& trajectory) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    const std::size_t n = trajectory.empty() ? 0 : trajectory.front().z.size();
    out << 't';
    for (std::size_t i = 1; i <= n; ++i) out << ",z" << i << "x,z" << i << "y,z" << i << 'z';
    out << '\n';
    for (const auto& s : trajectory) {
        out << format_double(s.t);
        for (const Vec3& p : s.z) out << ',' << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(p.z);
        out << '\n';
    }
}

void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "step,t,net_force,force_scale,net_torque,torque_scale,kinetic,dissipation,power_in,divergence,"
           "min_pair_distance,min_boundary_margin,min_collinearity,picard_residual,status\n";
    for (const auto& d : records) {
        out << d.step;
        for (double v : {d.t, d.net_force, d.force_scale, d.net_torque, d.torque_scale, d.kinetic, d.dissipation,
                         d.power_in, d.divergence, d.min_pair_distance, d.min_boundary_margin, d.min_collinearity,
                         d.picard_residual})
            out << ',' << format_double(v);
        out << ',' << d.status << '\n';
    }
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

RunResult run_scenario(const ScenarioConfig& cfg, bool keep_velocity) {
    if (auto errors = cfg.validate(); !errors.empty()) throw ConfigInvalid(std::move(errors));
    const GridSpec grid = cfg.grid();
    StokesSolver solver(grid, cfg.fluid_params());
    const CouplingContext ctx{cfg.swimmer, cfg.controls, solver, resolve(cfg.monitor, cfg.swimmer, grid),
                              ForceGuards::for_domain(cfg.domain), cfg.substeps};

    RunResult result;
    SwimmerState z{cfg.centers, 0.0};
    FluidState fluid(grid);
    result.trajectory.push_back(z);
    if (keep_velocity) result.velocity.push_back(fluid.u);

    const bool write = !cfg.output.directory.empty();
    const std::filesystem::path dir(cfg.output.directory);
    if (write) std::filesystem::create_directories(dir);
    auto snapshot = [&](int step, const FluidState& s) {
        if (!write || cfg.output.snapshot_every <= 0 || step % cfg.output.snapshot_every != 0) return;
        char name[64];
        std::snprintf(name, sizeof name, "_%06d.vtk", step);
        const std::string path = (dir / (cfg.output.snapshot_prefix + name)).string();
        write_vtk(path, grid, s);
        result.snapshots.push_back(path);
    };
    snapshot(0, fluid);

    if (auto v = monitor_wellposedness(z.z, cfg.swimmer, cfg.domain, ctx.monitor)) {
        result.violation = std::move(v);
    } else {
        const int steps = cfg.steps();
        for (int n = 1; n <= steps; ++n) {
            try {
                CoupledStepResult r = coupled_step(z, fluid, ctx, cfg.dt, n);
                z = std::move(r.swimmer);
                fluid = std::move(r.fluid);
                result.trajectory.push_back(z);
                result.diagnostics.push_back(std::move(r.diagnostics));
                if (keep_velocity) result.velocity.push_back(fluid.u);
                snapshot(n, fluid);
            } catch (const WellposednessViolation& e) {
                if (e.record()) result.diagnostics.push_back(*e.record());
                result.violation = e.info();
                break;
            }
        }
    }
    result.fluid = std::move(fluid);
    if (write) {
        write_trajectory_csv((dir / cfg.output.trajectory_csv).string(), result.trajectory);
        write_diagnostics_csv((dir / cfg.output.diagnostics_csv).string(), result.diagnostics);
    }
    return result;
}

std::vector<SwimmerState> ode_map_A(const GridSpec& grid, const VelocitySeries& u, std::span<const Vec3> z0,
                                    const SwimmerConfig& cfg, double dt, int substeps,
                                    const std::optional<ResolvedMonitor>& monitor) {
    if (u.empty()) throw ConfigInvalid({"velocity history is empty"});
    if (substeps < 1) throw ConfigInvalid({"substeps must be at least 1"});
    std::vector<SwimmerState> w;
    w.reserve(u.size());
    w.push_back({std::vector<Vec3>(z0.begin(), z0.end()), 0.0});
    for (std::size_t n = 0; n + 1 < u.size(); ++n) {
        const double t = (n + 1) * dt;
        const int step = static_cast<int>(n + 1);
        w.push_back({advect(grid, u[n + 1], w.back().z, cfg, dt, substeps, t, step), t});
        if (monitor) {
            if (auto v = monitor_wellposedness(w.back().z, cfg, grid.domain, *monitor)) {
                v->t = t;
                v->step = step;
                throw WellposednessViolation(std::move(*v));
            }
        }
    }
    return w;
}

PicardResult picard_solve(const ScenarioConfig& cfg, double window, int max_iterations, double tolerance) {
    if (auto errors = cfg.validate(); !errors.empty()) throw ConfigInvalid(std::move(errors));
    if (!(window > 0.0)) throw ConfigInvalid({"Picard window must be positive"});
    if (max_iterations < 1) throw ConfigInvalid({"Picard needs at least one iteration"});
    const GridSpec grid = cfg.grid();
    StokesSolver solver(grid, cfg.fluid_params());
    const ResolvedMonitor monitor = resolve(cfg.monitor, cfg.swimmer, grid);
    const ForceGuards guards = ForceGuards::for_domain(cfg.domain);
    const int steps = std::max(1, static_cast<int>(std::ceil(window / cfg.dt - 1e-9)));

    PicardResult result;
    result.fluid.assign(static_cast<std::size_t>(steps) + 1, FaceField(grid));
    for (int k = 1; k <= max_iterations; ++k) {
        const auto bodies = ode_map_A(grid, result.fluid, cfg.centers, cfg.swimmer, cfg.dt, cfg.substeps, monitor);
        VelocitySeries next;
        next.reserve(result.fluid.size());
        FluidState state(grid);
        next.push_back(state.u);
        double diff = 0.0, size = 0.0;
        for (int n = 0; n < steps; ++n) {
            const double t = n * cfg.dt;
            const ForceDensityField f = force_field(bodies[n].z, cfg.controls.at(t), cfg.swimmer, guards, grid, t, n);
            state = solver.step(state, f, cfg.dt);
            FaceField d = state.u;
            d -= result.fluid[n + 1];
            diff = std::max(diff, l2_norm(grid, d));
            size = std::max(size, l2_norm(grid, state.u));
            next.push_back(state.u);
        }
        const double residual = size > 0.0 ? diff / size : diff;
        result.residuals.push_back(residual);
        result.fluid = std::move(next);
        result.iterations = k;
        if (residual <= tolerance) {
            result.converged = true;
            result.bodies = ode_map_A(grid, result.fluid, cfg.centers, cfg.swimmer, cfg.dt, cfg.substeps, monitor);
            return result;
        }
    }
    throw NoConvergence("Picard iteration did not converge in " + std::to_string(max_iterations) + " iterations",
                        result.residuals);
}

}  // namespace swimsim
