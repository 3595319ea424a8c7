#include "swimsim/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

#include "swimsim/analysis.hpp"
#include "swimsim/config.hpp"
#include "swimsim/mms.hpp"

namespace swimsim {

namespace {

Json violation_json(const ViolationInfo& v) {
    Json j;
    j["kind"] = to_string(v.kind);
    j["step"] = v.step;
    j["t"] = v.t;
    j["indices"] = v.indices;
    j["value"] = v.value;
    j["threshold"] = v.threshold;
    j["message"] = v.message;
    return Json{{"violation", j}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

void report_violation(const ViolationInfo& v, const ScenarioConfig& cfg, std::ostream& out) {
    const std::string text = violation_json(v).dump(2) + "\n";
    out << text;
    if (!cfg.output.directory.empty()) write_text(std::filesystem::path(cfg.output.directory) / "violation.json", text);
}

// Runs `body`, mapping the library's exceptions onto exit codes.
template <class Fn>
int guarded(std::ostream& err, Fn&& body) {
    try {
        return body();
    } catch (const WellposednessViolation& e) {
        err << "wellposedness violation: " << e.what() << '\n';
        return kExitViolation;
    } catch (const ConfigInvalid& e) {
        err << e.what() << '\n';
        return kExitError;
    } catch (const NoConvergence& e) {
        err << e.what() << "\nresidual history:";
        for (double r : e.history()) err << ' ' << format_double(r);
        err << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

Json report_json(const ExperimentReport& r) { return Json::parse(to_json(r)); }

std::string csv_field(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

std::string cell_label(const std::vector<SweepAxis>& axes, const std::vector<Json>& cell) {
    std::string label;
    for (std::size_t a = 0; a < axes.size(); ++a) {
        if (!label.empty()) label += "__";
        label += axes[a].pointer.substr(1) + "=" + cell[a].dump();
    }
    for (char& c : label)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_' || c == '='))
            c = '_';
    return label;
}

}  // namespace

int thread_count_from_env() {
    if (const char* s = std::getenv("SWIMSIM_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(s, &end, 10);
        if (end != s && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 256L));
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ScenarioConfig cfg = parse_config(config_path);
        const RunResult r = run_scenario(cfg);
        out << "steps " << r.diagnostics.size() << " of " << cfg.steps() << ", t = " << format_double(r.trajectory.back().t)
            << '\n';
        if (!cfg.output.directory.empty()) {
            const std::filesystem::path dir(cfg.output.directory);
            out << "trajectory " << (dir / cfg.output.trajectory_csv).string() << '\n';
            out << "diagnostics " << (dir / cfg.output.diagnostics_csv).string() << '\n';
            for (const auto& s : r.snapshots) out << "snapshot " << s << '\n';
        }
        if (r.violation) {
            report_violation(*r.violation, cfg, out);
            return static_cast<int>(kExitViolation);
        }
        return static_cast<int>(kExitOk);
    });
}

int cmd_picard(const std::string& config_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ScenarioConfig cfg = parse_config(config_path);
        const double window = cfg.picard.window > 0.0 ? cfg.picard.window : cfg.T;
        PicardResult pr;
        try {
            pr = picard_solve(cfg, window, cfg.picard.max_iterations, cfg.picard.tolerance);
        } catch (const WellposednessViolation& e) {
            report_violation(e.info(), cfg, out);
            return static_cast<int>(kExitViolation);
        }
        ScenarioConfig march = cfg;
        march.T = window;
        march.output = {};
        const RunResult run = run_scenario(march);
        double max_diff = 0.0, v_scale = 0.0;
        const std::size_t common = std::min(run.trajectory.size(), pr.bodies.size());
        for (std::size_t n = 0; n < common; ++n)
            for (std::size_t i = 0; i < pr.bodies[n].z.size(); ++i) {
                max_diff = std::max(max_diff, norm(pr.bodies[n].z[i] - run.trajectory[n].z[i]));
                if (n > 0)
                    v_scale = std::max(v_scale, norm(run.trajectory[n].z[i] - run.trajectory[n - 1].z[i]) / cfg.dt);
            }
        Json j;
        j["window"] = window;
        j["steps"] = static_cast<int>(pr.fluid.size()) - 1;
        j["iterations"] = pr.iterations;
        j["converged"] = pr.converged;
        j["residuals"] = pr.residuals;
        std::vector<double> ratios;
        for (std::size_t k = 1; k < pr.residuals.size(); ++k)
            ratios.push_back(pr.residuals[k - 1] > 0.0 ? pr.residuals[k] / pr.residuals[k - 1] : 0.0);
        j["residual_ratios"] = ratios;
        j["max_trajectory_difference"] = max_diff;
        j["velocity_scale"] = v_scale;
        j["agreement_tolerance"] = 10.0 * cfg.dt * v_scale;
        j["march_violation"] = run.violation ? to_string(run.violation->kind) : "none";
        out << j.dump(2) << '\n';
        if (!cfg.output.directory.empty()) {
            const std::filesystem::path dir(cfg.output.directory);
            std::filesystem::create_directories(dir);
            write_trajectory_csv((dir / "picard_trajectory.csv").string(), pr.bodies);
            std::ofstream res(dir / "picard_residuals.csv");
            res << "iteration,residual\n";
            for (std::size_t k = 0; k < pr.residuals.size(); ++k) res << k + 1 << ',' << format_double(pr.residuals[k]) << '\n';
            write_text(dir / "picard_summary.json", j.dump(2) + "\n");
        }
        return static_cast<int>(kExitOk);
    });
}

int cmd_validate_mms(int cells, bool include_time, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (cells < 8) throw ConfigInvalid({"--cells must be at least 8"});
        const MmsConvergence c = validate_mms(cells, include_time);
        auto line = [&](const char* what, const MmsRun& r) {
            out << what << " cells " << r.cells << " dt " << format_double(r.dt) << " steps " << r.steps
                << " L2 error " << format_double(r.l2_error) << '\n';
        };
        line("space", c.space_coarse);
        line("space", c.space_fine);
        out << "space ratio " << format_double(c.space_ratio) << " (need >= 3.5) " << (c.space_ok ? "PASS" : "FAIL")
            << '\n';
        bool ok = c.space_ok;
        if (include_time) {
            line("time", c.time_coarse);
            line("time", c.time_fine);
            out << "time ratio " << format_double(c.time_ratio) << " (need >= 1.8) " << (c.time_ok ? "PASS" : "FAIL")
                << '\n';
            ok = ok && c.time_ok;
        }
        return static_cast<int>(ok ? kExitOk : kExitError);
    });
}

int cmd_estimate_tstar(const std::string& config_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ScenarioConfig cfg = parse_config(config_path);
        const TStarParams p = tstar_params_for(cfg);
        const TStarEstimate e = estimate_T_star(p);
        Json j;
        j["params"] = {{"C", p.C},           {"h0", p.h0},         {"K", p.K},
                       {"L_energy", p.L_energy}, {"L_lip", p.L_lip}, {"q", p.q},
                       {"u_norm", p.u_norm}, {"u_norm_linf", p.u_norm_linf}, {"y0_norm", p.y0_norm},
                       {"v_inf", p.v_inf},   {"mes_S0", p.mes_S0}, {"mes_Omega", p.mes_Omega},
                       {"horizon", p.horizon}, {"C_o", p.C_o},     {"n", p.n}};
        auto clauses = [](const std::vector<HorizonClause>& cs) {
            Json a = Json::object();
            for (const auto& c : cs) a[c.name] = c.value;
            return a;
        };
        j["T0_bound"] = e.T0_bound;
        j["T0_binding"] = e.T0_binding;
        j["T0_clauses"] = clauses(e.T0_clauses);
        j["T_bound"] = e.T_bound;
        j["T_binding"] = e.T_binding;
        j["T_clauses"] = clauses(e.T_clauses);
        j["Tstar_bound"] = e.Tstar_bound;
        j["Tstar_binding"] = e.Tstar_binding;
        j["Tstar_clauses"] = clauses(e.Tstar_clauses);
        j["C1"] = e.C1;
        j["uniqueness_bound"] = e.uniqueness_bound;
        j["uniqueness_binding"] = e.uniqueness_binding;
        j["uniqueness_clauses"] = clauses(e.uniqueness_clauses);
        j["binding_clause"] = e.binding_clause;
        const std::string text = j.dump(2) + "\n";
        out << text;
        if (!cfg.output.directory.empty()) write_text(std::filesystem::path(cfg.output.directory) / "tstar.json", text);
        return static_cast<int>(kExitOk);
    });
}

int cmd_experiment(const std::string& name, const std::string& config_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ScenarioConfig cfg = parse_config(config_path);
        const ExperimentSettings& ex = cfg.experiment;
        const ResolvedMonitor monitor = resolve(cfg.monitor, cfg.swimmer, cfg.grid());
        ExperimentReport rep;
        if (name == "contraction") {
            rep = contraction_experiment(cfg);
        } else if (name == "lipschitz") {
            const ControlSample v{std::vector<double>(cfg.swimmer.joints(), cfg.controls.v_inf())};
            rep = lipschitz_F_experiment(cfg.swimmer, cfg.domain, cfg.centers, ex.radius, v, ex.trials, ex.seed, monitor);
        } else if (name == "force-bound") {
            double mes_S0 = std::numeric_limits<double>::infinity();
            for (const auto& s : cfg.swimmer.shapes) mes_S0 = std::min(mes_S0, measure(s));
            const double q = ex.q > 0.0 ? ex.q : 1.0;
            const double v_inf = cfg.controls.v_inf();
            const ForceBoundCheck c =
                force_bound_check(cfg.swimmer, cfg.domain, cfg.centers, q, cfg.T, v_inf, ex.trials, ex.seed, monitor, ex.C_o);
            rep = to_report(c, ex.seed, trajectory_bound_P(cfg.centers, q, cfg.T, mes_S0), v_inf);
        } else if (name == "uniqueness") {
            const double horizon = ex.horizon > 0.0 ? ex.horizon : 5.0 * cfg.dt;
            rep = uniqueness_perturbation_study(cfg, ex.deltas, horizon, ex.seed);
        } else {
            throw ConfigInvalid({"unknown experiment \"" + name + "\"; expected contraction, lipschitz, force-bound or uniqueness"});
        }
        const std::string text = report_json(rep).dump(2) + "\n";
        out << text;
        if (!cfg.output.directory.empty()) write_text(std::filesystem::path(cfg.output.directory) / (name + ".json"), text);
        return static_cast<int>(kExitOk);
    });
}

int cmd_sweep(const std::string& config_path, const std::string& results_path, int threads, std::ostream& out,
              std::ostream& err) {
    return guarded(err, [&] {
        const Json doc = read_json_file(config_path);
        const std::vector<SweepAxis> axes = parse_sweep(doc);
        if (axes.empty()) throw ConfigInvalid({"/sweep: no parameters to sweep"});
        const auto cells = sweep_cells(axes);
        const ScenarioConfig base = config_from_json(apply_cell(doc, axes, cells.front()));

        struct Row {
            std::string status = "error";
            int exit_code = kExitError;
            int steps = 0;
            double t_end = 0.0;
            std::string violation;
            int violation_step = -1;
            double min_pair_distance = std::numeric_limits<double>::quiet_NaN();
            double max_kinetic = std::numeric_limits<double>::quiet_NaN();
            double displacement = std::numeric_limits<double>::quiet_NaN();
            std::string message;
        };
        std::vector<Row> rows(cells.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t c = next++; c < cells.size(); c = next++) {
                Row& row = rows[c];
                try {
                    ScenarioConfig cfg = config_from_json(apply_cell(doc, axes, cells[c]));
                    if (!cfg.output.directory.empty())
                        cfg.output.directory = (std::filesystem::path(cfg.output.directory) / cell_label(axes, cells[c])).string();
                    const RunResult r = run_scenario(cfg);
                    row.steps = static_cast<int>(r.trajectory.size()) - 1;
                    row.t_end = r.trajectory.back().t;
                    row.min_pair_distance = std::numeric_limits<double>::infinity();
                    row.max_kinetic = 0.0;
                    for (const auto& d : r.diagnostics) {
                        row.min_pair_distance = std::min(row.min_pair_distance, d.min_pair_distance);
                        row.max_kinetic = std::max(row.max_kinetic, d.kinetic);
                    }
                    Vec3 c0, c1;
                    for (const Vec3& z : r.trajectory.front().z) c0 += z;
                    for (const Vec3& z : r.trajectory.back().z) c1 += z;
                    row.displacement = norm(c1 - c0) / static_cast<double>(r.trajectory.front().z.size());
                    if (r.violation) {
                        row.status = "violation";
                        row.exit_code = kExitViolation;
                        row.violation = to_string(r.violation->kind);
                        row.violation_step = r.violation->step;
                        row.message = r.violation->message;
                    } else {
                        row.status = "ok";
                        row.exit_code = kExitOk;
                    }
                } catch (const std::exception& e) {
                    row.message = e.what();
                }
            }
        };
        const int n_threads = std::clamp(threads > 0 ? threads : thread_count_from_env(), 1, static_cast<int>(cells.size()));
        std::vector<std::thread> pool;
        for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();

        std::filesystem::path path = results_path;
        if (path.empty())
            path = std::filesystem::path(base.output.directory.empty() ? "." : base.output.directory) / "sweep_results.csv";
        std::string csv;
        for (const auto& a : axes) csv += csv_field(a.pointer) + ",";
        csv += "status,exit_code,steps,t_end,violation,violation_step,min_pair_distance,max_kinetic,centroid_displacement,message\n";
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const Row& r = rows[c];
            for (const Json& v : cells[c]) csv += csv_field(v.dump()) + ",";
            csv += r.status + "," + std::to_string(r.exit_code) + "," + std::to_string(r.steps) + "," +
                   format_double(r.t_end) + "," + r.violation + "," + std::to_string(r.violation_step) + "," +
                   format_double(r.min_pair_distance) + "," + format_double(r.max_kinetic) + "," +
                   format_double(r.displacement) + "," + csv_field(r.message) + "\n";
        }
        write_text(path, csv);
        int failures = 0;
        for (const Row& r : rows) failures += r.status == "error";
        out << cells.size() << " cells, " << failures << " failed, " << n_threads << " threads; results " << path.string()
            << '\n';
        return static_cast<int>(kExitOk);
    });
}

}  // namespace swimsim
