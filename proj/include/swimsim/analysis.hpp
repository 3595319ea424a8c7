#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "swimsim/coupling.hpp"

namespace swimsim {

/// Constants feeding the existence and uniqueness horizons.
struct TStarParams {
    double C = 1.0;         ///< shift-Lipschitz constant of the indicator
    double h0 = 1.0;        ///< shift radius
    double K = 1.0;         ///< embedding constant
    double L_energy = 1.0;  ///< energy-estimate constant of the Stokes problem
    double L_lip = 1.0;     ///< Lipschitz constant of the force map
    double q = 1.0;         ///< radius of the velocity ball
    double u_norm = 1.0;    ///< |u| in L²(Q_T)
    double u_norm_linf = 0.0;  ///< |u| in L²(0,T;L∞); 0: same as u_norm
    double y0_norm = 0.0;
    double v_inf = 0.0;
    double mes_S0 = 1.0;    ///< smallest body measure
    double mes_Omega = 1.0;
    double horizon = 1.0;   ///< T appearing in the contraction clause
    double C_o = 1.0;       ///< force-bound constant
    int n = 3;              ///< number of bodies

    double q_default() const;  ///< 2 sqrt(L_energy) |y0|, or 1 when y0 = 0
};

struct HorizonClause {
    std::string name;
    double value;
};

struct TStarEstimate {
    double T0_bound = 0.0;
    double T_bound = 0.0;
    double Tstar_bound = 0.0;
    double uniqueness_bound = 0.0;
    double C1 = 0.0;               ///< C_o sqrt(mes Ω) (1 + v_inf)
    std::string T0_binding, T_binding, Tstar_binding, uniqueness_binding;
    std::vector<HorizonClause> T0_clauses, T_clauses, Tstar_clauses, uniqueness_clauses;
    std::string binding_clause;    ///< the clause that fixes Tstar_bound
};

/// Evaluates the three nested horizon bounds and the uniqueness window literally.
/// Throws ConfigInvalid for non-positive constants (y0_norm and v_inf may be zero).
TStarEstimate estimate_T_star(const TStarParams& p);

/// Measured constants, samples and extremes of one experiment; reproducible from `seed`.
struct ExperimentReport {
    std::string experiment;
    std::uint64_t seed = 0;
    std::map<std::string, double> constants;
    std::vector<std::map<std::string, double>> samples;
    std::map<std::string, double> extremes;
    std::vector<std::string> notes;
};

/// JSON text with fields {experiment, seed, constants, samples, extremes, notes}.
std::string to_json(const ExperimentReport& r, int indent = 2);

/// Discrete norms of a velocity history on t_n = n dt (samples 1..N).
struct SeriesNorms {
    double l2 = 0.0;       ///< sqrt(Σ dt |u_n|²)
    double l2_linf = 0.0;  ///< sqrt(Σ dt max_cells |u_n|²)
};

SeriesNorms series_norms(const GridSpec& grid, const VelocitySeries& u, double dt, int steps = -1);

/// The map w -> z0 + Σ dt avg(u_{m+1}, w_m) on candidate trajectories in the h0/2 ball.
/// Ratios |D w1 - D w2| / |w1 - w2| (sup over the mesh) are compared with
/// C sqrt(T0) |u|_{L²L∞} / mes(S).
ExperimentReport contraction_ratio_D(const GridSpec& grid, const VelocitySeries& u, double dt, const BodyShape& shape,
                                     const Vec3& z0, double T0, double h0, double C, int trials, std::uint64_t seed);

/// |F(z1,v) - F(z2,v)| / |z1 - z2| over random pairs within `radius` of base_z, where F is
/// measured as the L² norm of the piecewise-constant density, sqrt(Σ |d_i|² mes(S_i)).
/// Elastic and rotation parts are reported separately.
ExperimentReport lipschitz_F_experiment(const SwimmerConfig& cfg, const Domain& domain, std::span<const Vec3> base_z,
                                        double radius, const ControlSample& v, int trials, std::uint64_t seed,
                                        const ResolvedMonitor& monitor);

/// P(T) = max |z_i0| + q sqrt(T) / sqrt(mes S0).
double trajectory_bound_P(std::span<const Vec3> z0, double q, double T, double mes_S0);

/// Explicit C_o for admissible configurations inside the P ball (all pairwise distances above
/// the collision threshold, so arms are at least that long and densities have disjoint supports).
double force_bound_constant(const SwimmerConfig& cfg, double P, double mes_Omega, double min_arm);

struct ForceBoundCheck {
    double bound = 0.0;
    double measured_max = 0.0;
    double C_o = 0.0;         ///< the constant used in the bound
    double C_o_fitted = 0.0;  ///< the smallest constant that would still bound the samples
    int samples = 0;
    int rejected = 0;         ///< inadmissible draws skipped
    bool holds() const { return measured_max <= bound; }
};

/// |F_*(w)| over [0,T] for admissible configurations within the P ball, maximised over the
/// vertices of the control box |v_j| <= v_inf, against C_o sqrt(T mes Ω) (1 + v_inf).
ForceBoundCheck force_bound_check(const SwimmerConfig& cfg, const Domain& domain, std::span<const Vec3> z0, double q,
                                  double T, double v_inf, int trials, std::uint64_t seed,
                                  const ResolvedMonitor& monitor, double C_o = 0.0);

ExperimentReport to_report(const ForceBoundCheck& c, std::uint64_t seed, double P, double v_inf);

/// Marches the scenario, then samples the body map of its smallest body with T0 taken from the
/// horizon formula evaluated at the measured velocity norms.
ExperimentReport contraction_experiment(const ScenarioConfig& cfg);

/// Paired runs with z(0) moved by each delta along a fixed random direction; κ(δ) = sup |Δz| / δ.
ExperimentReport uniqueness_perturbation_study(const ScenarioConfig& cfg, const std::vector<double>& deltas,
                                               double horizon, std::uint64_t seed);

/// Constants of a scenario for the horizon formulas: measured C (h0 defaults to r),
/// a priori velocity surrogates |u| = q, |u|_{L²L∞} = K q, the explicit C_o and a measured
/// force Lipschitz constant unless the scenario supplies them.
TStarParams tstar_params_for(const ScenarioConfig& cfg);

}  // namespace swimsim
