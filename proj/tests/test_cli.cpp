#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

const fs::path kCli = SWIMSIM_CLI;
const fs::path kConfigs = fs::path(SWIMSIM_SOURCE_DIR) / "configs";

fs::path scratch() {
    static const fs::path dir = [] {
        auto p = fs::temp_directory_path() / "swimsim_test_cli";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

// Exit status of the tool; stdout goes to `stdout_path`.
int run_cli(const std::string& args, const fs::path& stdout_path = scratch() / "stdout.txt") {
    const std::string cmd = kCli.string() + " " + args + " > " + stdout_path.string() + " 2> " +
                            (scratch() / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json load(const fs::path& p) { return Json::parse(slurp(p)); }

// Config from configs/, redirected to a scratch directory and optionally edited.
fs::path staged(const std::string& name, const std::string& tag, void (*edit)(Json&) = nullptr) {
    Json doc = load(kConfigs / name);
    doc["output"]["directory"] = (scratch() / tag).string();
    if (edit) edit(doc);
    const fs::path path = scratch() / (tag + ".json");
    std::ofstream(path) << doc.dump(2);
    return path;
}

void short_reference(Json& d) {
    d["grid"]["cells"] = {16, 16, 16};
    d["T"] = 0.0005;
    d["output"]["snapshot_every"] = 0;
}

}  // namespace

TEST_CASE("validate-mms exits 0 when both refinements pass") {
    CHECK(run_cli("validate-mms --cells 8 --space-only") == 0);
    const std::string out = slurp(scratch() / "stdout.txt");
    CHECK(out.find("space ratio") != std::string::npos);
    CHECK(out.find("PASS") != std::string::npos);
}

TEST_CASE("run exits 0 and writes its outputs") {
    const fs::path cfg = staged("reference.json", "ok", short_reference);
    CHECK(run_cli("run " + cfg.string()) == 0);
    CHECK(fs::exists(scratch() / "ok" / "trajectory.csv"));
    CHECK(fs::exists(scratch() / "ok" / "diagnostics.csv"));
    CHECK_FALSE(fs::exists(scratch() / "ok" / "violation.json"));
}

TEST_CASE("run on the collision scenario exits 2 with the violation serialized") {
    const fs::path cfg = staged("collision.json", "collision");
    CHECK(run_cli("run " + cfg.string()) == 2);
    const Json v = load(scratch() / "collision" / "violation.json")["violation"];
    CHECK(v["kind"] == "Collision");
    CHECK(v["step"].get<int>() > 0);
    CHECK(slurp(scratch() / "stdout.txt").find("\"Collision\"") != std::string::npos);
}

TEST_CASE("configuration and usage errors exit 1") {
    const fs::path bad = scratch() / "bad.json";
    std::ofstream(bad) << R"({"nu": -1})";
    CHECK(run_cli("run " + bad.string()) == 1);
    CHECK(slurp(scratch() / "stderr.txt").find("invalid configuration") != std::string::npos);
    CHECK(run_cli("run " + (scratch() / "missing.json").string()) == 1);
    CHECK(run_cli("experiment bogus " + bad.string()) == 1);
    CHECK(run_cli("frobnicate") == 1);
    CHECK(run_cli("--help") == 0);
}

TEST_CASE("estimate-tstar prints the horizon report") {
    const fs::path cfg = staged("reference.json", "tstar", short_reference);
    CHECK(run_cli("estimate-tstar " + cfg.string()) == 0);
    const Json j = load(scratch() / "stdout.txt");
    CHECK(j["Tstar_bound"].get<double>() > 0.0);
    CHECK(j["T0_clauses"].contains("shift_ball"));
    CHECK(fs::exists(scratch() / "tstar" / "tstar.json"));
}

TEST_CASE("experiments write seeded JSON reports") {
    const fs::path cfg = staged("reference.json", "exp", short_reference);
    for (const std::string name : {"lipschitz", "force-bound", "uniqueness", "contraction"}) {
        CAPTURE(name);
        CHECK(run_cli("experiment " + name + " " + cfg.string()) == 0);
        const Json j = load(scratch() / "exp" / (name + ".json"));
        CHECK(j["experiment"] == name);
        CHECK(j.contains("seed"));
        CHECK(j.contains("constants"));
        CHECK(j.contains("samples"));
        CHECK(j.contains("extremes"));
    }
}

TEST_CASE("picard exits 0 on convergence and 1 when the iteration budget runs out") {
    const fs::path ok = staged("reference.json", "picard", short_reference);
    CHECK(run_cli("picard " + ok.string()) == 0);
    CHECK(load(scratch() / "stdout.txt")["converged"] == true);
    CHECK(fs::exists(scratch() / "picard" / "picard_residuals.csv"));
    const fs::path starved = staged("reference.json", "starved", [](Json& d) {
        short_reference(d);
        d["picard"]["max_iterations"] = 1;
    });
    CHECK(run_cli("picard " + starved.string()) == 1);
    CHECK(slurp(scratch() / "stderr.txt").find("residual history") != std::string::npos);
}

TEST_CASE("sweep writes one row per cell") {
    const fs::path cfg = staged("reference.json", "sweep", [](Json& d) {
        short_reference(d);
        d["sweep"] = {{"/swimmer/k/0", {10.0, 50.0}}};
    });
    CHECK(run_cli("sweep " + cfg.string() + " --threads 2") == 0);
    const std::string csv = slurp(scratch() / "sweep" / "sweep_results.csv");
    int rows = 0;
    for (char c : csv) rows += c == '\n';
    CHECK(rows == 3);
    CHECK(fs::exists(scratch() / "sweep" / "swimmer_k_0=10.0" / "trajectory.csv"));
}
