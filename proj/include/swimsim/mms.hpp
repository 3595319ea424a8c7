#pragma once

#include "swimsim/fluid.hpp"

namespace swimsim {

/// Time dependence of the manufactured velocity amplitude.
enum class MmsProfile {
    Linear,       ///< g(t) = 1 + t; backward Euler is exact, so only spatial error remains
    Oscillatory,  ///< g(t) = 1 + sin(omega t); carries a first-order time error
};

/// Manufactured Stokes solution on the unit cube:
///   u = g(t) (curl(0,0,Sx Sy sz) + curl(sx Sy Sz,0,0)),  S(s) = sin²(πs), s(s) = sin(πs),
///   p = g(t) cos(πx) cos(πy) cos(πz).
/// u is divergence free and vanishes on every wall; the forcing is f = u_t - νΔu + ∇p.
struct ManufacturedStokes {
    double nu = 1.0;
    MmsProfile profile = MmsProfile::Linear;
    double omega = 2.0;

    double amplitude(double t) const;
    double amplitude_rate(double t) const;
    Vec3 velocity(const Vec3& x, double t) const;
    Vec3 forcing(const Vec3& x, double t) const;
    double pressure(const Vec3& x, double t) const;
};

struct MmsRun {
    int cells = 0;
    double dt = 0.0;
    int steps = 0;
    double l2_error = 0.0;     ///< discrete L² error of the face velocity at the final time
    double l2_exact = 0.0;     ///< discrete L² norm of the exact face velocity there
    int max_stokes_iterations = 0;
};

/// Integrate the manufactured problem on a cells³ grid of the unit cube and compare with the
/// exact velocity sampled on faces.
MmsRun run_mms(const ManufacturedStokes& mms, int cells, double dt, int steps);

struct MmsConvergence {
    MmsRun space_coarse, space_fine;  ///< N³ and (2N)³ with the linear profile
    MmsRun time_coarse, time_fine;    ///< dt and dt/2 at (2N)³ with the oscillatory profile
    double space_ratio = 0.0;
    double time_ratio = 0.0;
    bool space_ok = false;  ///< ratio ≥ 3.5
    bool time_ok = false;   ///< ratio ≥ 1.8
};

/// Both refinement studies. `include_time` skips the time study when false.
MmsConvergence validate_mms(int coarse_cells = 16, bool include_time = true);

}  // namespace swimsim
