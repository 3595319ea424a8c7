#include "swimsim/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace swimsim {

namespace {

// Reads typed fields from a JSON object and records every problem instead of stopping.
class Reader {
public:
    explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

    // Reports keys of `obj` not in `known`.
    bool object(const Json& obj, const std::string& path, std::initializer_list<const char*> known) {
        if (!obj.is_object()) {
            errors_.push_back(path + ": expected an object");
            return false;
        }
        std::set<std::string> allowed;
        for (const char* k : known) allowed.insert(k);
        for (const auto& item : obj.items())
            if (!allowed.count(item.key())) errors_.push_back(path + "/" + item.key() + ": unknown key");
        return true;
    }

    void number(const Json& obj, const char* key, const std::string& path, double& out) {
        if (!obj.contains(key)) return;
        const Json& v = obj.at(key);
        if (!v.is_number()) {
            errors_.push_back(path + "/" + key + ": expected a number");
            return;
        }
        out = v.get<double>();
    }

    void integer(const Json& obj, const char* key, const std::string& path, int& out) {
        if (!obj.contains(key)) return;
        const Json& v = obj.at(key);
        if (!v.is_number_integer()) {
            errors_.push_back(path + "/" + key + ": expected an integer");
            return;
        }
        out = v.get<int>();
    }

    void unsigned64(const Json& obj, const char* key, const std::string& path, std::uint64_t& out) {
        if (!obj.contains(key)) return;
        const Json& v = obj.at(key);
        if (!v.is_number_unsigned()) {
            errors_.push_back(path + "/" + key + ": expected a non-negative integer");
            return;
        }
        out = v.get<std::uint64_t>();
    }

    void boolean(const Json& obj, const char* key, const std::string& path, bool& out) {
        if (!obj.contains(key)) return;
        const Json& v = obj.at(key);
        if (!v.is_boolean()) {
            errors_.push_back(path + "/" + key + ": expected true or false");
            return;
        }
        out = v.get<bool>();
    }

    void string(const Json& obj, const char* key, const std::string& path, std::string& out) {
        if (!obj.contains(key)) return;
        const Json& v = obj.at(key);
        if (!v.is_string()) {
            errors_.push_back(path + "/" + key + ": expected a string");
            return;
        }
        out = v.get<std::string>();
    }

    bool numbers(const Json& v, const std::string& path, std::vector<double>& out) {
        if (!v.is_array()) {
            errors_.push_back(path + ": expected an array of numbers");
            return false;
        }
        out.clear();
        for (const Json& x : v) {
            if (!x.is_number()) {
                errors_.push_back(path + ": expected an array of numbers");
                return false;
            }
            out.push_back(x.get<double>());
        }
        return true;
    }

    bool vec3(const Json& v, const std::string& path, Vec3& out) {
        std::vector<double> xs;
        if (!numbers(v, path, xs)) return false;
        if (xs.size() != 3) {
            errors_.push_back(path + ": expected three numbers");
            return false;
        }
        out = {xs[0], xs[1], xs[2]};
        return true;
    }

    void error(std::string message) { errors_.push_back(std::move(message)); }

private:
    std::vector<std::string>& errors_;
};

BodyShape read_shape(Reader& rd, const Json& j, const std::string& path, bool& ok) {
    ok = false;
    if (!rd.object(j, path, {"type", "radius", "half_extents"})) return BodyShape::ball(1.0);
    std::string type;
    rd.string(j, "type", path, type);
    try {
        if (type == "ball") {
            double radius = 0.0;
            if (!j.contains("radius")) rd.error(path + ": ball needs a radius");
            rd.number(j, "radius", path, radius);
            ok = true;
            return BodyShape::ball(radius);
        }
        if (type == "box") {
            Vec3 e;
            if (!j.contains("half_extents") || !rd.vec3(j.at("half_extents"), path + "/half_extents", e)) {
                rd.error(path + ": box needs three half_extents");
                return BodyShape::ball(1.0);
            }
            ok = true;
            return BodyShape::box(e);
        }
        rd.error(path + "/type: expected \"ball\" or \"box\"");
    } catch (const Error& e) {
        ok = false;
        rd.error(path + ": " + e.what());
    }
    return BodyShape::ball(1.0);
}

Json shape_to_json(const BodyShape& s) {
    Json j;
    if (const Ball* b = std::get_if<Ball>(&s.kind())) {
        j["type"] = "ball";
        j["radius"] = b->radius;
    } else {
        const Vec3& e = std::get<Box>(s.kind()).half_extents;
        j["type"] = "box";
        j["half_extents"] = {e.x, e.y, e.z};
    }
    return j;
}

Json vec3_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

const char* construction_name(RotationConstruction c) {
    return c == RotationConstruction::CrossProduct ? "cross_product" : "gram_schmidt";
}

}  // namespace

ScenarioConfig config_from_json(const Json& doc) {
    std::vector<std::string> errors;
    Reader rd(errors);
    ScenarioConfig cfg;
    if (!rd.object(doc, "", {"domain", "grid", "nu", "dt", "T", "swimmer", "centers", "controls", "monitor", "solver",
                             "picard", "experiment", "output", "mode", "sweep"}))
        throw ConfigInvalid(std::move(errors));

    if (doc.contains("domain") && rd.object(doc["domain"], "/domain", {"extents"}) && doc["domain"].contains("extents"))
        rd.vec3(doc["domain"]["extents"], "/domain/extents", cfg.domain.extents);
    if (doc.contains("grid") && rd.object(doc["grid"], "/grid", {"cells"}) && doc["grid"].contains("cells")) {
        const Json& c = doc["grid"]["cells"];
        if (!c.is_array() || c.size() != 3 || !std::all_of(c.begin(), c.end(), [](const Json& x) { return x.is_number_integer(); }))
            rd.error("/grid/cells: expected three integers");
        else
            for (int a = 0; a < 3; ++a) cfg.cells[a] = c[a].get<int>();
    }
    rd.number(doc, "nu", "", cfg.nu);
    rd.number(doc, "dt", "", cfg.dt);
    rd.number(doc, "T", "", cfg.T);
    rd.string(doc, "mode", "", cfg.mode);

    bool shapes_ok = true;
    if (!doc.contains("swimmer")) {
        rd.error("/swimmer: missing");
        shapes_ok = false;
    } else if (const Json& s = doc["swimmer"];
               rd.object(s, "/swimmer", {"r", "shapes", "k", "l", "fold_sign", "construction", "require_equal_measure"})) {
        rd.number(s, "r", "/swimmer", cfg.swimmer.r);
        if (!s.contains("shapes") || !s["shapes"].is_array()) {
            rd.error("/swimmer/shapes: expected an array of shapes");
            shapes_ok = false;
        } else {
            for (std::size_t i = 0; i < s["shapes"].size(); ++i) {
                bool ok = false;
                BodyShape shape = read_shape(rd, s["shapes"][i], "/swimmer/shapes/" + std::to_string(i), ok);
                shapes_ok = shapes_ok && ok;
                cfg.swimmer.shapes.push_back(shape);
            }
        }
        if (s.contains("k")) rd.numbers(s["k"], "/swimmer/k", cfg.swimmer.k);
        if (s.contains("l")) rd.numbers(s["l"], "/swimmer/l", cfg.swimmer.l);
        if (s.contains("fold_sign")) {
            std::vector<double> signs;
            if (rd.numbers(s["fold_sign"], "/swimmer/fold_sign", signs))
                for (double x : signs) cfg.swimmer.fold_sign.push_back(static_cast<int>(x));
        } else {
            cfg.swimmer.fold_sign.assign(std::max<int>(0, static_cast<int>(cfg.swimmer.shapes.size()) - 2), 1);
        }
        std::string construction = construction_name(cfg.swimmer.construction);
        rd.string(s, "construction", "/swimmer", construction);
        if (construction == "cross_product")
            cfg.swimmer.construction = RotationConstruction::CrossProduct;
        else if (construction == "gram_schmidt")
            cfg.swimmer.construction = RotationConstruction::GramSchmidt;
        else
            rd.error("/swimmer/construction: expected \"cross_product\" or \"gram_schmidt\"");
        rd.boolean(s, "require_equal_measure", "/swimmer", cfg.require_equal_measure);
    }

    if (!doc.contains("centers") || !doc["centers"].is_array()) {
        rd.error("/centers: expected an array of points");
    } else {
        for (std::size_t i = 0; i < doc["centers"].size(); ++i) {
            Vec3 z;
            if (rd.vec3(doc["centers"][i], "/centers/" + std::to_string(i), z)) cfg.centers.push_back(z);
        }
    }

    const int joints = std::max<int>(0, static_cast<int>(cfg.swimmer.shapes.size()) - 2);
    if (doc.contains("controls")) {
        const Json& c = doc["controls"];
        if (rd.object(c, "/controls", {"breakpoints", "values"})) {
            std::vector<double> bps{0.0};
            std::vector<std::vector<double>> values;
            if (c.contains("breakpoints")) rd.numbers(c["breakpoints"], "/controls/breakpoints", bps);
            if (!c.contains("values") || !c["values"].is_array()) {
                rd.error("/controls/values: expected an array of rows");
            } else {
                for (std::size_t m = 0; m < c["values"].size(); ++m) {
                    std::vector<double> row;
                    rd.numbers(c["values"][m], "/controls/values/" + std::to_string(m), row);
                    values.push_back(std::move(row));
                }
            }
            cfg.controls = ControlSchedule(std::move(bps), std::move(values));
        }
    } else {
        cfg.controls = ControlSchedule::constant(std::vector<double>(joints, 0.0));
    }

    if (doc.contains("monitor") &&
        rd.object(doc["monitor"], "/monitor", {"collision_threshold", "boundary_margin", "collinear", "degenerate"})) {
        const Json& m = doc["monitor"];
        rd.number(m, "collision_threshold", "/monitor", cfg.monitor.collision_threshold);
        rd.number(m, "boundary_margin", "/monitor", cfg.monitor.boundary_margin);
        rd.number(m, "collinear", "/monitor", cfg.monitor.collinear);
        rd.number(m, "degenerate", "/monitor", cfg.monitor.degenerate);
    }
    if (doc.contains("solver") &&
        rd.object(doc["solver"], "/solver", {"pressure_tol", "stokes_tol", "max_iterations", "substeps"})) {
        const Json& s = doc["solver"];
        rd.number(s, "pressure_tol", "/solver", cfg.pressure_tol);
        rd.number(s, "stokes_tol", "/solver", cfg.stokes_tol);
        rd.integer(s, "max_iterations", "/solver", cfg.max_iterations);
        rd.integer(s, "substeps", "/solver", cfg.substeps);
    }
    if (doc.contains("picard") && rd.object(doc["picard"], "/picard", {"window", "max_iterations", "tolerance"})) {
        const Json& p = doc["picard"];
        rd.number(p, "window", "/picard", cfg.picard.window);
        rd.integer(p, "max_iterations", "/picard", cfg.picard.max_iterations);
        rd.number(p, "tolerance", "/picard", cfg.picard.tolerance);
    }
    if (doc.contains("experiment") &&
        rd.object(doc["experiment"], "/experiment",
                  {"seed", "trials", "radius", "deltas", "horizon", "h0", "K", "L_energy", "L_lip", "q", "C_o"})) {
        const Json& e = doc["experiment"];
        ExperimentSettings& x = cfg.experiment;
        rd.unsigned64(e, "seed", "/experiment", x.seed);
        rd.integer(e, "trials", "/experiment", x.trials);
        rd.number(e, "radius", "/experiment", x.radius);
        if (e.contains("deltas")) rd.numbers(e["deltas"], "/experiment/deltas", x.deltas);
        rd.number(e, "horizon", "/experiment", x.horizon);
        rd.number(e, "h0", "/experiment", x.h0);
        rd.number(e, "K", "/experiment", x.K);
        rd.number(e, "L_energy", "/experiment", x.L_energy);
        rd.number(e, "L_lip", "/experiment", x.L_lip);
        rd.number(e, "q", "/experiment", x.q);
        rd.number(e, "C_o", "/experiment", x.C_o);
        if (x.trials < 1) rd.error("/experiment/trials: must be at least 1");
        if (!(x.K > 0.0) || !(x.L_energy > 0.0)) rd.error("/experiment: K and L_energy must be positive");
    }
    if (doc.contains("output") &&
        rd.object(doc["output"], "/output",
                  {"directory", "trajectory_csv", "diagnostics_csv", "snapshot_prefix", "snapshot_every"})) {
        const Json& o = doc["output"];
        rd.string(o, "directory", "/output", cfg.output.directory);
        rd.string(o, "trajectory_csv", "/output", cfg.output.trajectory_csv);
        rd.string(o, "diagnostics_csv", "/output", cfg.output.diagnostics_csv);
        rd.string(o, "snapshot_prefix", "/output", cfg.output.snapshot_prefix);
        rd.integer(o, "snapshot_every", "/output", cfg.output.snapshot_every);
    }
    static const std::set<std::string> modes{"march", "picard", "contraction", "lipschitz", "force-bound", "uniqueness"};
    if (!modes.count(cfg.mode)) rd.error("/mode: unknown mode \"" + cfg.mode + "\"");
    if (doc.contains("sweep")) {
        try {
            parse_sweep(doc);
        } catch (const ConfigInvalid& e) {
            for (const auto& m : e.messages()) rd.error(m);
        }
    }

    if (shapes_ok)
        for (auto& m : cfg.validate()) errors.push_back(std::move(m));
    if (!errors.empty()) throw ConfigInvalid(std::move(errors));
    return cfg;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid({"cannot open " + path});
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigInvalid({path + ": " + e.what()});
    }
}

ScenarioConfig parse_config(const std::string& path) { return config_from_json(read_json_file(path)); }

Json config_to_json(const ScenarioConfig& cfg) {
    Json j;
    j["domain"]["extents"] = vec3_json(cfg.domain.extents);
    j["grid"]["cells"] = {cfg.cells[0], cfg.cells[1], cfg.cells[2]};
    j["nu"] = cfg.nu;
    j["dt"] = cfg.dt;
    j["T"] = cfg.T;
    Json& s = j["swimmer"];
    s["r"] = cfg.swimmer.r;
    s["shapes"] = Json::array();
    for (const auto& shape : cfg.swimmer.shapes) s["shapes"].push_back(shape_to_json(shape));
    s["k"] = cfg.swimmer.k;
    s["l"] = cfg.swimmer.l;
    s["fold_sign"] = cfg.swimmer.fold_sign;
    s["construction"] = construction_name(cfg.swimmer.construction);
    s["require_equal_measure"] = cfg.require_equal_measure;
    j["centers"] = Json::array();
    for (const Vec3& z : cfg.centers) j["centers"].push_back(vec3_json(z));
    j["controls"]["breakpoints"] = cfg.controls.breakpoints();
    j["controls"]["values"] = cfg.controls.values();
    j["monitor"] = {{"collision_threshold", cfg.monitor.collision_threshold},
                    {"boundary_margin", cfg.monitor.boundary_margin},
                    {"collinear", cfg.monitor.collinear},
                    {"degenerate", cfg.monitor.degenerate}};
    j["solver"] = {{"pressure_tol", cfg.pressure_tol},
                   {"stokes_tol", cfg.stokes_tol},
                   {"max_iterations", cfg.max_iterations},
                   {"substeps", cfg.substeps}};
    j["picard"] = {{"window", cfg.picard.window},
                   {"max_iterations", cfg.picard.max_iterations},
                   {"tolerance", cfg.picard.tolerance}};
    const ExperimentSettings& x = cfg.experiment;
    j["experiment"] = {{"seed", x.seed},   {"trials", x.trials}, {"radius", x.radius}, {"deltas", x.deltas},
                       {"horizon", x.horizon}, {"h0", x.h0},   {"K", x.K},           {"L_energy", x.L_energy},
                       {"L_lip", x.L_lip}, {"q", x.q},         {"C_o", x.C_o}};
    j["output"] = {{"directory", cfg.output.directory},
                   {"trajectory_csv", cfg.output.trajectory_csv},
                   {"diagnostics_csv", cfg.output.diagnostics_csv},
                   {"snapshot_prefix", cfg.output.snapshot_prefix},
                   {"snapshot_every", cfg.output.snapshot_every}};
    j["mode"] = cfg.mode;
    return j;
}

std::string serialize_config(const ScenarioConfig& cfg) { return config_to_json(cfg).dump(2) + "\n"; }

std::vector<SweepAxis> parse_sweep(const Json& doc) {
    std::vector<SweepAxis> axes;
    if (!doc.contains("sweep")) return axes;
    const Json& s = doc["sweep"];
    std::vector<std::string> errors;
    if (!s.is_object()) throw ConfigInvalid({"/sweep: expected an object of JSON pointers to value lists"});
    for (const auto& item : s.items()) {
        const std::string& key = item.key();
        if (key.empty() || key.front() != '/' || key.rfind("/sweep", 0) == 0) {
            errors.push_back("/sweep: \"" + key + "\" is not a JSON pointer into the config");
            continue;
        }
        if (!item.value().is_array() || item.value().empty()) {
            errors.push_back("/sweep/" + key + ": expected a non-empty list of values");
            continue;
        }
        try {
            const Json::json_pointer ptr(key);
            Json probe = doc;
            probe.erase("sweep");
            probe[ptr] = item.value().front();
        } catch (const nlohmann::json::exception& e) {
            errors.push_back("/sweep: \"" + key + "\": " + e.what());
            continue;
        }
        axes.push_back({key, std::vector<Json>(item.value().begin(), item.value().end())});
    }
    if (!errors.empty()) throw ConfigInvalid(std::move(errors));
    return axes;
}

std::vector<std::vector<Json>> sweep_cells(const std::vector<SweepAxis>& axes) {
    std::vector<std::vector<Json>> cells{{}};
    for (const auto& axis : axes) {
        std::vector<std::vector<Json>> next;
        for (const auto& prefix : cells)
            for (const Json& v : axis.values) {
                auto row = prefix;
                row.push_back(v);
                next.push_back(std::move(row));
            }
        cells = std::move(next);
    }
    return cells;
}

Json apply_cell(const Json& doc, const std::vector<SweepAxis>& axes, const std::vector<Json>& cell) {
    Json out = doc;
    out.erase("sweep");
    for (std::size_t a = 0; a < axes.size(); ++a) out[Json::json_pointer(axes[a].pointer)] = cell[a];
    return out;
}

}  // namespace swimsim
