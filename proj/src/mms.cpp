#include "swimsim/mms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace swimsim {

namespace {

constexpr double pi = std::numbers::pi;

// S(s) = sin²(πs) and its first three derivatives.
struct Sq {
    double v, d1, d2, d3;
    explicit Sq(double s)
        : v(0.5 * (1.0 - std::cos(2 * pi * s))),
          d1(pi * std::sin(2 * pi * s)),
          d2(2 * pi * pi * std::cos(2 * pi * s)),
          d3(-4 * pi * pi * pi * std::sin(2 * pi * s)) {}
};

// s(s) = sin(πs) and its first two derivatives.
struct Sn {
    double v, d1, d2;
    explicit Sn(double s) : v(std::sin(pi * s)), d1(pi * std::cos(pi * s)), d2(-pi * pi * std::sin(pi * s)) {}
};

// Spatial shape U(x) of the velocity and its Laplacian.
void shape(const Vec3& x, Vec3& u, Vec3& lap) {
    const Sq Sx(x.x), Sy(x.y), Sz(x.z);
    const Sn sx(x.x), sz(x.z);
    // curl(0,0,Ψa), Ψa = Sx Sy sz: (∂yΨa, -∂xΨa, 0)
    // curl(Ψb,0,0), Ψb = sx Sy Sz: (0, ∂zΨb, -∂yΨb)
    u.x = Sx.v * Sy.d1 * sz.v;
    u.y = -Sx.d1 * Sy.v * sz.v + sx.v * Sy.v * Sz.d1;
    u.z = -sx.v * Sy.d1 * Sz.v;
    lap.x = Sx.d2 * Sy.d1 * sz.v + Sx.v * Sy.d3 * sz.v + Sx.v * Sy.d1 * sz.d2;
    lap.y = -(Sx.d3 * Sy.v * sz.v + Sx.d1 * Sy.d2 * sz.v + Sx.d1 * Sy.v * sz.d2) +
            (sx.d2 * Sy.v * Sz.d1 + sx.v * Sy.d2 * Sz.d1 + sx.v * Sy.v * Sz.d3);
    lap.z = -(sx.d2 * Sy.d1 * Sz.v + sx.v * Sy.d3 * Sz.v + sx.v * Sy.d1 * Sz.d2);
}

}  // namespace

double ManufacturedStokes::amplitude(double t) const {
    return profile == MmsProfile::Linear ? 1.0 + t : 1.0 + std::sin(omega * t);
}

double ManufacturedStokes::amplitude_rate(double t) const {
    return profile == MmsProfile::Linear ? 1.0 : omega * std::cos(omega * t);
}

Vec3 ManufacturedStokes::velocity(const Vec3& x, double t) const {
    Vec3 u, lap;
    shape(x, u, lap);
    return u * amplitude(t);
}

double ManufacturedStokes::pressure(const Vec3& x, double t) const {
    return amplitude(t) * std::cos(pi * x.x) * std::cos(pi * x.y) * std::cos(pi * x.z);
}

Vec3 ManufacturedStokes::forcing(const Vec3& x, double t) const {
    Vec3 u, lap;
    shape(x, u, lap);
    const double cx = std::cos(pi * x.x), cy = std::cos(pi * x.y), cz = std::cos(pi * x.z);
    const double sx = std::sin(pi * x.x), sy = std::sin(pi * x.y), sz = std::sin(pi * x.z);
    const Vec3 grad_p = Vec3{-sx * cy * cz, -cx * sy * cz, -cx * cy * sz} * (pi * amplitude(t));
    return u * amplitude_rate(t) - lap * (nu * amplitude(t)) + grad_p;
}

MmsRun run_mms(const ManufacturedStokes& mms, int cells, double dt, int steps) {
    const GridSpec grid(Domain{{1.0, 1.0, 1.0}}, {cells, cells, cells});
    FluidParams params;
    params.nu = mms.nu;
    StokesSolver solver(grid, params);

    FluidState state(grid);
    state.u = solver.project(sample_faces(grid, [&](const Vec3& x) { return mms.velocity(x, 0.0); })).u;
    MmsRun run{cells, dt, steps, 0.0, 0.0, 0};
    for (int n = 1; n <= steps; ++n) {
        const double t = n * dt;
        const FaceField f = sample_faces(grid, [&](const Vec3& x) { return mms.forcing(x, t); });
        state = solver.step_faces(state, f, dt);
        state.t = t;
        run.max_stokes_iterations = std::max(run.max_stokes_iterations, solver.last_stats().stokes_iterations);
    }
    const FaceField exact = sample_faces(grid, [&](const Vec3& x) { return mms.velocity(x, state.t); });
    FaceField err = state.u;
    err -= exact;
    run.l2_error = l2_norm(grid, err);
    run.l2_exact = l2_norm(grid, exact);
    return run;
}

MmsConvergence validate_mms(int coarse_cells, bool include_time) {
    MmsConvergence c;
    const ManufacturedStokes linear{1.0, MmsProfile::Linear, 0.0};
    c.space_coarse = run_mms(linear, coarse_cells, 0.05, 4);
    c.space_fine = run_mms(linear, 2 * coarse_cells, 0.05, 4);
    c.space_ratio = c.space_coarse.l2_error / c.space_fine.l2_error;
    c.space_ok = c.space_ratio >= 3.5;
    if (include_time) {
        // Low viscosity and a fast oscillation make the time error dominate the spatial one at (2N)³.
        const ManufacturedStokes osc{0.1, MmsProfile::Oscillatory, 10.0};
        const double dt = 0.025, horizon = 0.6;
        const int steps = static_cast<int>(std::lround(horizon / dt));
        c.time_coarse = run_mms(osc, 2 * coarse_cells, dt, steps);
        c.time_fine = run_mms(osc, 2 * coarse_cells, dt / 2, 2 * steps);
        c.time_ratio = c.time_coarse.l2_error / c.time_fine.l2_error;
        c.time_ok = c.time_ratio >= 1.8;
    }
    return c;
}

}  // namespace swimsim
