#include "swimsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "json.hpp"

namespace swimsim {

namespace {

Vec3 random_in_ball(std::mt19937_64& rng, double radius) {
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> uni;
    Vec3 d;
    do {
        d = {gauss(rng), gauss(rng), gauss(rng)};
    } while (norm(d) == 0.0);
    return d / norm(d) * (radius * std::cbrt(uni(rng)));
}

// Uniform point in the ball of radius `radius` in R^{3n}, returned per body.
std::vector<Vec3> random_in_config_ball(std::mt19937_64& rng, std::size_t n, double radius) {
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> uni;
    std::vector<Vec3> p(n);
    double s2 = 0.0;
    do {
        s2 = 0.0;
        for (Vec3& v : p) {
            v = {gauss(rng), gauss(rng), gauss(rng)};
            s2 += dot(v, v);
        }
    } while (s2 == 0.0);
    const double scale = radius * std::pow(uni(rng), 1.0 / (3.0 * static_cast<double>(n))) / std::sqrt(s2);
    for (Vec3& v : p) v *= scale;
    return p;
}

double config_distance(std::span<const Vec3> a, std::span<const Vec3> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += dot(a[i] - b[i], a[i] - b[i]);
    return std::sqrt(s);
}

// L² norm of the piecewise-constant density Σ d_i ξ_i for disjoint supports.
double density_norm(const BodyForceSet& f, const SwimmerConfig& cfg) {
    double s = 0.0;
    for (int i = 0; i < cfg.n(); ++i) s += dot(f.density[i], f.density[i]) * measure(cfg.shapes[i]);
    return std::sqrt(s);
}

BodyForceSet difference(const BodyForceSet& a, const BodyForceSet& b) {
    BodyForceSet d;
    for (std::size_t i = 0; i < a.density.size(); ++i) d.density.push_back(a.density[i] - b.density[i]);
    return d;
}

double min_measure(const SwimmerConfig& cfg) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : cfg.shapes) m = std::min(m, measure(s));
    return m;
}

HorizonClause argmin(const std::vector<HorizonClause>& clauses) {
    HorizonClause best = clauses.front();
    for (const auto& c : clauses)
        if (c.value < best.value) best = c;
    return best;
}

void require_admissible(std::span<const Vec3> z, const SwimmerConfig& cfg, const Domain& domain,
                        const ResolvedMonitor& monitor) {
    if (auto v = monitor_wellposedness(z, cfg, domain, monitor)) throw WellposednessViolation(std::move(*v));
}

}  // namespace

double TStarParams::q_default() const { return y0_norm > 0.0 ? 2.0 * std::sqrt(L_energy) * y0_norm : 1.0; }

TStarEstimate estimate_T_star(const TStarParams& p) {
    std::vector<std::string> errors;
    auto positive = [&](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) errors.push_back(std::string(name) + " must be positive");
    };
    positive(p.C, "C");
    positive(p.h0, "h0");
    positive(p.K, "K");
    positive(p.L_energy, "L_energy");
    positive(p.L_lip, "L_lip");
    positive(p.q, "q");
    positive(p.u_norm, "u_norm");
    positive(p.mes_S0, "mes_S0");
    positive(p.mes_Omega, "mes_Omega");
    positive(p.horizon, "horizon");
    positive(p.C_o, "C_o");
    if (p.n < 1) errors.push_back("n must be positive");
    if (!(p.u_norm_linf >= 0.0)) errors.push_back("u_norm_linf must be non-negative");
    if (!(p.y0_norm >= 0.0)) errors.push_back("y0_norm must be non-negative");
    if (!(p.v_inf >= 0.0)) errors.push_back("v_inf must be non-negative");
    if (!errors.empty()) throw ConfigInvalid(std::move(errors));

    const double u_linf = p.u_norm_linf > 0.0 ? p.u_norm_linf : p.u_norm;
    TStarEstimate e;
    e.T0_clauses = {
        {"shift_ball", p.mes_S0 * p.h0 * p.h0 / (4.0 * p.u_norm * p.u_norm)},
        {"contraction", p.mes_S0 * p.mes_S0 / (p.C * p.C * u_linf * u_linf) * p.horizon},
        {"unit", 1.0},
    };
    const HorizonClause t0 = argmin(e.T0_clauses);
    e.T0_bound = t0.value;
    e.T0_binding = t0.name;

    const double ratio = p.mes_S0 / (p.C * p.K * p.q);
    e.T_clauses = {{"ode_lipschitz", ratio * ratio}, {"contraction_horizon", e.T0_bound}};
    const HorizonClause t = argmin(e.T_clauses);
    e.T_bound = t.value;
    e.T_binding = t.name;

    e.C1 = p.C_o * std::sqrt(p.mes_Omega) * (1.0 + p.v_inf);
    const double slack = std::max(0.0, p.q * p.q - p.L_energy * p.y0_norm * p.y0_norm);
    e.Tstar_clauses = {
        {"energy_ball", slack / (p.L_energy * e.C1 * e.C1)},
        {"map_horizon", e.T_bound},
        {"unit", 1.0},
    };
    const HorizonClause ts = argmin(e.Tstar_clauses);
    e.Tstar_bound = ts.value;
    e.Tstar_binding = ts.name;
    e.binding_clause = ts.name;

    const double half = p.mes_S0 / (2.0 * p.C * p.K * p.q);
    e.uniqueness_clauses = {
        {"force_lipschitz",
         p.mes_S0 / (4.0 * p.n * p.L_lip * std::sqrt(p.L_energy * p.mes_S0 * p.mes_Omega))},
        {"half_contraction", half * half},
        {"existence_horizon", e.Tstar_bound},
    };
    const HorizonClause u = argmin(e.uniqueness_clauses);
    e.uniqueness_bound = u.value;
    e.uniqueness_binding = u.name;
    return e;
}

std::string to_json(const ExperimentReport& r, int indent) {
    nlohmann::ordered_json j;
    j["experiment"] = r.experiment;
    j["seed"] = r.seed;
    j["constants"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.constants) j["constants"][k] = v;
    j["samples"] = nlohmann::ordered_json::array();
    for (const auto& s : r.samples) {
        nlohmann::ordered_json row = nlohmann::ordered_json::object();
        for (const auto& [k, v] : s) row[k] = v;
        j["samples"].push_back(std::move(row));
    }
    j["extremes"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.extremes) j["extremes"][k] = v;
    j["notes"] = r.notes;
    return j.dump(indent);
}

SeriesNorms series_norms(const GridSpec& grid, const VelocitySeries& u, double dt, int steps) {
    const int last = steps < 0 ? static_cast<int>(u.size()) - 1 : std::min(steps, static_cast<int>(u.size()) - 1);
    SeriesNorms s;
    for (int n = 1; n <= last; ++n) {
        const double l2 = l2_norm(grid, u[n]);
        double peak = 0.0;
        for (int i = 0; i < grid.cells[0]; ++i)
            for (int j = 0; j < grid.cells[1]; ++j)
                for (int k = 0; k < grid.cells[2]; ++k) {
                    const Vec3 c = cell_velocity(grid, u[n], i, j, k);
                    peak = std::max(peak, dot(c, c));
                }
        s.l2 += dt * l2 * l2;
        s.l2_linf += dt * peak;
    }
    s.l2 = std::sqrt(s.l2);
    s.l2_linf = std::sqrt(s.l2_linf);
    return s;
}

ExperimentReport contraction_ratio_D(const GridSpec& grid, const VelocitySeries& u, double dt, const BodyShape& shape,
                                     const Vec3& z0, double T0, double h0, double C, int trials, std::uint64_t seed) {
    if (u.size() < 2) throw ConfigInvalid({"contraction experiment needs at least one velocity sample"});
    if (!(dt > 0.0) || !(T0 > 0.0) || !(h0 > 0.0) || !(C > 0.0) || trials < 1)
        throw ConfigInvalid({"contraction experiment needs positive dt, T0, h0, C and trials"});
    const int available = static_cast<int>(u.size()) - 1;
    const int steps = std::clamp(static_cast<int>(std::floor(T0 / dt + 1e-9)), 1, available);
    const double window = steps * dt;
    const SeriesNorms norms = series_norms(grid, u, dt, steps);
    const double mes = measure(shape);
    const double bound = C * std::sqrt(window) * norms.l2_linf / mes;

    ExperimentReport rep;
    rep.experiment = "contraction";
    rep.seed = seed;
    rep.constants = {{"C", C},          {"h0", h0},          {"T0", T0},           {"window", window},
                     {"steps", steps},  {"mes_S", mes},      {"u_l2", norms.l2},   {"u_l2_linf", norms.l2_linf},
                     {"bound", bound},  {"trials", trials}};
    rep.notes.push_back("norms: discrete L2(0,T;L2) of face velocities and L2(0,T;Linf) of cell-centred velocities");
    rep.notes.push_back("trajectories: independent uniform draws in the h0/2 ball at every mesh time");

    std::mt19937_64 rng(seed);
    auto D = [&](const std::vector<Vec3>& w) {
        std::vector<Vec3> out(static_cast<std::size_t>(steps) + 1, z0);
        for (int n = 0; n < steps; ++n) out[n + 1] = out[n] + average_velocity(grid, u[n + 1], shape, w[n]) * dt;
        return out;
    };
    double max_ratio = 0.0, min_ratio = std::numeric_limits<double>::infinity();
    int rejected = 0;
    for (int trial = 0; trial < trials;) {
        std::vector<Vec3> w1(steps), w2(steps);
        for (int n = 0; n < steps; ++n) {
            w1[n] = z0 + random_in_ball(rng, 0.5 * h0);
            w2[n] = z0 + random_in_ball(rng, 0.5 * h0);
        }
        double wdiff = 0.0;
        for (int n = 0; n < steps; ++n) wdiff = std::max(wdiff, norm(w1[n] - w2[n]));
        if (wdiff == 0.0) continue;
        std::vector<Vec3> d1, d2;
        try {
            d1 = D(w1);
            d2 = D(w2);
        } catch (const BodyOutsideDomain&) {
            if (++rejected > 100 * trials) throw;
            continue;
        }
        double ddiff = 0.0;
        for (std::size_t n = 0; n < d1.size(); ++n) ddiff = std::max(ddiff, norm(d1[n] - d2[n]));
        const double ratio = ddiff / wdiff;
        max_ratio = std::max(max_ratio, ratio);
        min_ratio = std::min(min_ratio, ratio);
        rep.samples.push_back({{"ratio", ratio}, {"w_diff", wdiff}, {"D_diff", ddiff}});
        ++trial;
    }
    rep.extremes = {{"max_ratio", max_ratio}, {"min_ratio", min_ratio}, {"bound", bound},
                    {"rejected", rejected}, {"bound_holds", max_ratio < bound ? 1.0 : 0.0}};
    return rep;
}

ExperimentReport lipschitz_F_experiment(const SwimmerConfig& cfg, const Domain& domain, std::span<const Vec3> base_z,
                                        double radius, const ControlSample& v, int trials, std::uint64_t seed,
                                        const ResolvedMonitor& monitor) {
    if (!(radius > 0.0) || trials < 1) throw ConfigInvalid({"Lipschitz experiment needs a positive radius and trials"});
    const ForceGuards guards = ForceGuards::for_domain(domain);
    double v_inf = 0.0;
    for (double x : v.v) v_inf = std::max(v_inf, std::fabs(x));

    ExperimentReport rep;
    rep.experiment = "lipschitz";
    rep.seed = seed;
    rep.constants = {{"radius", radius}, {"trials", trials}, {"v_inf", v_inf}, {"n", cfg.n()}};
    rep.notes.push_back("F measured as sqrt(sum |d_i|^2 mes S_i); configurations compared in the Euclidean norm of R^3n");

    constexpr int kStoredSamples = 1000;
    std::mt19937_64 rng(seed);
    std::vector<Vec3> z1(base_z.size()), z2(base_z.size());
    double max_total = 0.0, max_elastic = 0.0, max_rotation = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        const auto p1 = random_in_config_ball(rng, base_z.size(), radius);
        const auto p2 = random_in_config_ball(rng, base_z.size(), radius);
        for (std::size_t i = 0; i < base_z.size(); ++i) {
            z1[i] = base_z[i] + p1[i];
            z2[i] = base_z[i] + p2[i];
        }
        require_admissible(z1, cfg, domain, monitor);
        require_admissible(z2, cfg, domain, monitor);
        const double dz = config_distance(z1, z2);
        if (dz == 0.0) continue;
        const auto e1 = assemble_body_forces(z1, v, cfg, guards, {true, false});
        const auto e2 = assemble_body_forces(z2, v, cfg, guards, {true, false});
        const auto r1 = assemble_body_forces(z1, v, cfg, guards, {false, true});
        const auto r2 = assemble_body_forces(z2, v, cfg, guards, {false, true});
        const auto t1 = assemble_body_forces(z1, v, cfg, guards);
        const auto t2 = assemble_body_forces(z2, v, cfg, guards);
        const double total = density_norm(difference(t1, t2), cfg) / dz;
        const double elastic = density_norm(difference(e1, e2), cfg) / dz;
        const double rotation = density_norm(difference(r1, r2), cfg) / dz;
        max_total = std::max(max_total, total);
        max_elastic = std::max(max_elastic, elastic);
        max_rotation = std::max(max_rotation, rotation);
        if (trial < kStoredSamples)
            rep.samples.push_back({{"ratio", total}, {"elastic", elastic}, {"rotation", rotation}, {"dz", dz}});
    }
    if (trials > kStoredSamples) rep.notes.push_back("only the first 1000 samples are listed");
    rep.extremes = {{"max_ratio", max_total}, {"max_elastic_ratio", max_elastic}, {"max_rotation_ratio", max_rotation}};
    if (v_inf > 0.0) rep.extremes["rotation_ratio_per_unit_v"] = max_rotation / v_inf;
    return rep;
}

double trajectory_bound_P(std::span<const Vec3> z0, double q, double T, double mes_S0) {
    double m = 0.0;
    for (const Vec3& z : z0) m = std::max(m, norm(z));
    return m + q * std::sqrt(T) / std::sqrt(mes_S0);
}

double force_bound_constant(const SwimmerConfig& cfg, double P, double mes_Omega, double min_arm) {
    const double k_max = cfg.k.empty() ? 0.0 : *std::max_element(cfg.k.begin(), cfg.k.end());
    const double l_max = cfg.l.empty() ? 0.0 : *std::max_element(cfg.l.begin(), cfg.l.end());
    const double arm = 2.0 * P;  // no two centres in the P ball are further apart
    // Each body sits in at most two links and plays each joint role (prev, centre, next) at most once.
    const double elastic = 2.0 * k_max * std::max(arm, l_max);
    const double rotation = 2.0 * (arm + arm * arm / min_arm);
    double mes_max = 0.0;
    for (const auto& s : cfg.shapes) mes_max = std::max(mes_max, measure(s));
    return std::max(elastic, rotation) * std::sqrt(cfg.n() * mes_max / mes_Omega);
}

ForceBoundCheck force_bound_check(const SwimmerConfig& cfg, const Domain& domain, std::span<const Vec3> z0, double q,
                                  double T, double v_inf, int trials, std::uint64_t seed,
                                  const ResolvedMonitor& monitor, double C_o) {
    if (!(T > 0.0) || !(q > 0.0) || !(v_inf >= 0.0) || trials < 1)
        throw ConfigInvalid({"force bound check needs positive T, q, trials and non-negative v_inf"});
    const double mes_S0 = min_measure(cfg);
    const double P = trajectory_bound_P(z0, q, T, mes_S0);
    const double rho = q * std::sqrt(T) / std::sqrt(mes_S0);
    const double mes_Omega = domain.volume();
    ForceBoundCheck out;
    out.C_o = C_o > 0.0 ? C_o : force_bound_constant(cfg, P, mes_Omega, monitor.collision_threshold);
    const double scale = std::sqrt(T * mes_Omega) * (1.0 + v_inf);
    out.bound = out.C_o * scale;

    const ForceGuards guards = ForceGuards::for_domain(domain);
    const int joints = std::min(cfg.joints(), 12);
    std::mt19937_64 rng(seed);
    std::vector<Vec3> w(z0.size());
    for (int attempt = 0; out.samples < trials && attempt < 50 * trials; ++attempt) {
        for (std::size_t i = 0; i < z0.size(); ++i) w[i] = z0[i] + random_in_ball(rng, rho);
        if (monitor_wellposedness(w, cfg, domain, monitor)) {
            ++out.rejected;
            continue;
        }
        ++out.samples;
        // F is affine in v, so its norm peaks at a vertex of the control box.
        for (unsigned mask = 0; mask < (1u << joints); ++mask) {
            ControlSample v;
            for (int j = 0; j < cfg.joints(); ++j) v.v.push_back(j < joints && (mask >> j & 1u) ? -v_inf : v_inf);
            const double f = std::sqrt(T) * density_norm(assemble_body_forces(w, v, cfg, guards), cfg);
            out.measured_max = std::max(out.measured_max, f);
            if (v_inf == 0.0) break;
        }
    }
    out.C_o_fitted = out.measured_max / scale;
    return out;
}

ExperimentReport to_report(const ForceBoundCheck& c, std::uint64_t seed, double P, double v_inf) {
    ExperimentReport rep;
    rep.experiment = "force-bound";
    rep.seed = seed;
    rep.constants = {{"P", P}, {"v_inf", v_inf}, {"C_o", c.C_o}, {"samples", c.samples}, {"rejected", c.rejected}};
    rep.extremes = {{"bound", c.bound},
                    {"measured_max", c.measured_max},
                    {"C_o_fitted", c.C_o_fitted},
                    {"bound_holds", c.holds() ? 1.0 : 0.0}};
    rep.notes.push_back("|F_*| = sqrt(T) sqrt(sum |d_i|^2 mes S_i) for configurations frozen over [0,T]");
    if (c.samples == 0) rep.notes.push_back("no admissible configuration in the P ball; shrink q or T");
    return rep;
}

ExperimentReport uniqueness_perturbation_study(const ScenarioConfig& cfg, const std::vector<double>& deltas,
                                               double horizon, std::uint64_t seed) {
    if (!(horizon > 0.0)) throw ConfigInvalid({"perturbation horizon must be positive"});
    ScenarioConfig base = cfg;
    base.T = horizon;
    base.output = {};
    ExperimentReport rep;
    rep.experiment = "uniqueness";
    rep.seed = seed;
    rep.constants = {{"horizon", horizon}, {"dt", cfg.dt}, {"steps", base.steps()}};
    rep.notes.push_back("kappa(delta) = max over steps of |z1 - z2| (Euclidean in R^3n) / delta");

    const RunResult ref = run_scenario(base);
    if (ref.violation) {
        rep.notes.push_back("unperturbed run violated: " + ref.violation->message);
        return rep;
    }
    std::mt19937_64 rng(seed);
    const auto dir = random_in_config_ball(rng, cfg.centers.size(), 1.0);
    const double dir_norm = std::sqrt(std::accumulate(dir.begin(), dir.end(), 0.0,
                                                      [](double s, const Vec3& v) { return s + dot(v, v); }));
    std::vector<double> kappas;
    for (double delta : deltas) {
        ScenarioConfig pert = base;
        for (std::size_t i = 0; i < pert.centers.size(); ++i) pert.centers[i] += dir[i] * (delta / dir_norm);
        std::map<std::string, double> row{{"delta", delta}};
        try {
            const RunResult r = run_scenario(pert);
            if (r.violation) {
                row["violated"] = 1.0;
                rep.notes.push_back("delta " + format_double(delta) + ": " + to_string(r.violation->kind) + " - " +
                                    r.violation->message);
                rep.samples.push_back(row);
                continue;
            }
            double max_diff = 0.0;
            for (std::size_t n = 0; n < r.trajectory.size(); ++n)
                max_diff = std::max(max_diff, config_distance(r.trajectory[n].z, ref.trajectory[n].z));
            row["max_diff"] = max_diff;
            row["kappa"] = delta > 0.0 ? max_diff / delta : 0.0;
            row["violated"] = 0.0;
            if (delta > 0.0) kappas.push_back(row["kappa"]);
        } catch (const ConfigInvalid& e) {
            row["violated"] = 1.0;
            rep.notes.push_back("delta " + format_double(delta) + ": inadmissible initial configuration");
        }
        rep.samples.push_back(row);
    }
    if (!kappas.empty()) {
        rep.extremes["kappa_max"] = *std::max_element(kappas.begin(), kappas.end());
        rep.extremes["kappa_min"] = *std::min_element(kappas.begin(), kappas.end());
        rep.extremes["kappa_spread"] = rep.extremes["kappa_max"] / std::max(rep.extremes["kappa_min"], 1e-300);
    }
    return rep;
}

TStarParams tstar_params_for(const ScenarioConfig& cfg) {
    if (auto errors = cfg.validate(); !errors.empty()) throw ConfigInvalid(std::move(errors));
    const ExperimentSettings& ex = cfg.experiment;
    TStarParams p;
    std::size_t smallest = 0;
    for (std::size_t i = 1; i < cfg.swimmer.shapes.size(); ++i)
        if (measure(cfg.swimmer.shapes[i]) < measure(cfg.swimmer.shapes[smallest])) smallest = i;
    p.mes_S0 = measure(cfg.swimmer.shapes[smallest]);
    p.h0 = ex.h0 > 0.0 ? ex.h0 : cfg.swimmer.r;
    p.C = estimate_lipschitz_C(cfg.swimmer.shapes[smallest], p.h0, 4096, ex.seed).C;
    p.K = ex.K;
    p.L_energy = ex.L_energy;
    p.y0_norm = 0.0;  // runs start from rest
    p.q = ex.q > 0.0 ? ex.q : p.q_default();
    p.u_norm = p.q;
    p.u_norm_linf = p.K * p.q;
    p.v_inf = cfg.controls.v_inf();
    p.mes_Omega = cfg.domain.volume();
    p.horizon = cfg.T;
    p.n = cfg.swimmer.n();
    const ResolvedMonitor monitor = resolve(cfg.monitor, cfg.swimmer, cfg.grid());
    // every horizon is capped at 1, so P(1) bounds the trajectories on any admissible window
    const double P = trajectory_bound_P(cfg.centers, p.q, 1.0, p.mes_S0);
    p.C_o = ex.C_o > 0.0 ? ex.C_o : force_bound_constant(cfg.swimmer, P, p.mes_Omega, monitor.collision_threshold);
    if (ex.L_lip > 0.0) {
        p.L_lip = ex.L_lip;
    } else {
        ControlSample v{std::vector<double>(cfg.swimmer.joints(), p.v_inf)};
        const auto rep = lipschitz_F_experiment(cfg.swimmer, cfg.domain, cfg.centers, ex.radius, v,
                                                std::max(ex.trials, 100), ex.seed, monitor);
        p.L_lip = rep.extremes.at("max_ratio");
    }
    return p;
}

ExperimentReport contraction_experiment(const ScenarioConfig& cfg) {
    const ExperimentSettings& ex = cfg.experiment;
    ScenarioConfig march = cfg;
    march.output = {};
    const RunResult run = run_scenario(march, true);
    if (run.violation) throw WellposednessViolation(*run.violation);
    std::size_t smallest = 0;
    for (std::size_t i = 1; i < cfg.swimmer.shapes.size(); ++i)
        if (measure(cfg.swimmer.shapes[i]) < measure(cfg.swimmer.shapes[smallest])) smallest = i;
    const BodyShape& shape = cfg.swimmer.shapes[smallest];
    const double h0 = ex.h0 > 0.0 ? ex.h0 : cfg.swimmer.r;
    const double C = estimate_lipschitz_C(shape, h0, 4096, ex.seed).C;
    const GridSpec grid = cfg.grid();
    const SeriesNorms norms = series_norms(grid, run.velocity, cfg.dt);
    double T0 = 1.0;
    if (norms.l2 > 0.0) {
        TStarParams p;
        p.C = C;
        p.h0 = h0;
        p.u_norm = norms.l2;
        p.u_norm_linf = norms.l2_linf;
        p.mes_S0 = measure(shape);
        p.mes_Omega = cfg.domain.volume();
        p.horizon = cfg.T;
        T0 = estimate_T_star(p).T0_bound;
    }
    ExperimentReport rep =
        contraction_ratio_D(grid, run.velocity, cfg.dt, shape, cfg.centers[smallest], T0, h0, C, ex.trials, ex.seed);
    rep.constants["T0_from_measured_norms"] = T0;
    return rep;
}

}  // namespace swimsim
