#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "swimsim/commands.hpp"
#include "swimsim/config.hpp"
#include "swimsim/errors.hpp"

using namespace swimsim;

namespace {

Json minimal_doc() {
    return Json::parse(R"({
      "domain": {"extents": [1, 1, 1]},
      "grid": {"cells": [16, 16, 16]},
      "nu": 1.0,
      "dt": 0.001,
      "T": 0.003,
      "swimmer": {
        "r": 0.06,
        "shapes": [{"type": "ball", "radius": 0.06}, {"type": "ball", "radius": 0.06}, {"type": "ball", "radius": 0.06}],
        "k": [1, 2],
        "l": [0.2, 0.2]
      },
      "centers": [[0.3, 0.45, 0.5], [0.52, 0.45, 0.5], [0.52, 0.67, 0.5]]
    })");
}

std::vector<std::string> messages_of(const Json& doc) {
    try {
        config_from_json(doc);
    } catch (const ConfigInvalid& e) {
        return e.messages();
    }
    return {};
}

bool any_contains(const std::vector<std::string>& msgs, const std::string& needle) {
    return std::any_of(msgs.begin(), msgs.end(), [&](const std::string& m) { return m.find(needle) != std::string::npos; });
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("swimsim_test_config_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

std::vector<std::string> lines_of(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("minimal config parses with defaults and round-trips byte for byte") {
    const ScenarioConfig cfg = config_from_json(minimal_doc());
    CHECK(cfg.swimmer.n() == 3);
    CHECK(cfg.swimmer.fold_sign == std::vector<int>{1});
    CHECK(cfg.controls.at(0.0).v == std::vector<double>{0.0});
    CHECK(cfg.mode == "march");
    CHECK(cfg.substeps == 1);
    CHECK(cfg.experiment.seed == 20110901u);

    const std::string once = serialize_config(cfg);
    const ScenarioConfig again = config_from_json(Json::parse(once));
    CHECK(serialize_config(again) == once);
    CHECK(again.controls == cfg.controls);
    CHECK(again.monitor == cfg.monitor);
    CHECK(again.experiment == cfg.experiment);
    CHECK(again.centers == cfg.centers);
}

TEST_CASE("round trip keeps box shapes, schedules and every section") {
    Json doc = minimal_doc();
    doc["swimmer"]["shapes"] = Json::parse(R"([{"type": "box", "half_extents": [0.03, 0.02, 0.01]},
        {"type": "box", "half_extents": [0.01, 0.03, 0.02]}, {"type": "box", "half_extents": [0.02, 0.01, 0.03]}])");
    doc["swimmer"]["construction"] = "gram_schmidt";
    doc["controls"] = Json::parse(R"({"breakpoints": [0, 0.5], "values": [[1.5], [-0.25]]})");
    doc["monitor"] = Json::parse(R"({"collision_threshold": 0.1, "boundary_margin": 0.02})");
    doc["picard"] = Json::parse(R"({"window": 0.002, "tolerance": 1e-9})");
    doc["experiment"] = Json::parse(R"({"seed": 7, "deltas": [1e-5], "q": 0.3})");
    doc["output"] = Json::parse(R"({"directory": "out/x", "snapshot_every": 3})");
    doc["mode"] = "picard";
    const ScenarioConfig cfg = config_from_json(doc);
    CHECK(cfg.swimmer.construction == RotationConstruction::GramSchmidt);
    CHECK(cfg.controls.at(0.7).v[0] == -0.25);
    const std::string once = serialize_config(cfg);
    CHECK(serialize_config(config_from_json(Json::parse(once))) == once);
}

TEST_CASE("rest length equal to 2r is rejected by the strict inequality") {
    Json doc = minimal_doc();
    doc["swimmer"]["l"] = {0.12, 0.2};
    const auto msgs = messages_of(doc);
    REQUIRE_FALSE(msgs.empty());
    CHECK(any_contains(msgs, "l_1"));
    CHECK(any_contains(msgs, "> 2r"));
}

TEST_CASE("two bodies are rejected") {
    Json doc = minimal_doc();
    doc["swimmer"]["shapes"].erase(2);
    doc["swimmer"]["k"] = {1};
    doc["swimmer"]["l"] = {0.2};
    doc["centers"].erase(2);
    const auto msgs = messages_of(doc);
    CHECK(any_contains(msgs, "n > 2"));
}

TEST_CASE("every problem is reported, not just the first") {
    Json doc = minimal_doc();
    doc["nu"] = -1.0;
    doc["dt"] = "fast";
    doc["colour"] = "blue";
    doc["swimmer"]["k"] = {1, -2};
    doc["mode"] = "sprint";
    const auto msgs = messages_of(doc);
    CHECK(msgs.size() >= 5);
    CHECK(any_contains(msgs, "nu must be positive"));
    CHECK(any_contains(msgs, "/dt"));
    CHECK(any_contains(msgs, "colour"));
    CHECK(any_contains(msgs, "k_2"));
    CHECK(any_contains(msgs, "/mode"));
}

TEST_CASE("initial configuration must be admissible") {
    Json doc = minimal_doc();
    doc["centers"][0] = {0.02, 0.45, 0.5};
    CHECK(any_contains(messages_of(doc), "not inside the domain"));
    doc = minimal_doc();
    doc["centers"][2] = {0.35, 0.5, 0.5};
    CHECK_FALSE(messages_of(doc).empty());
}

TEST_CASE("parse_config reports unreadable files and bad JSON") {
    CHECK_THROWS_AS(parse_config("/nonexistent/swimsim.json"), ConfigInvalid);
    const auto dir = scratch_dir("bad");
    std::ofstream(dir / "bad.json") << "{ not json";
    CHECK_THROWS_AS(parse_config((dir / "bad.json").string()), ConfigInvalid);
    std::filesystem::remove_all(dir);
}

TEST_CASE("sweep cells form the cartesian product, last axis fastest") {
    Json doc = minimal_doc();
    doc["sweep"] = Json::parse(R"({"/swimmer/k/0": [1, 2, 4], "/nu": [0.5, 1.0]})");
    const auto axes = parse_sweep(doc);
    REQUIRE(axes.size() == 2);
    const auto cells = sweep_cells(axes);
    REQUIRE(cells.size() == 6);
    CHECK(cells[0][0] == 1);
    CHECK(cells[0][1] == 0.5);
    CHECK(cells[1][1] == 1.0);
    CHECK(cells[5][0] == 4);
    const Json applied = apply_cell(doc, axes, cells[3]);
    CHECK_FALSE(applied.contains("sweep"));
    CHECK(applied["swimmer"]["k"][0] == 2);
    CHECK(applied["nu"] == 1.0);
    CHECK(config_from_json(applied).swimmer.k[0] == 2.0);
    // The sweep section itself is ignored by the plain parser.
    CHECK_NOTHROW(config_from_json(doc));
}

TEST_CASE("malformed sweep sections are rejected") {
    Json doc = minimal_doc();
    doc["sweep"] = Json::parse(R"({"nu": [1], "/dt": []})");
    CHECK_THROWS_AS(parse_sweep(doc), ConfigInvalid);
}

TEST_CASE("sweep over k1 writes one deterministic row per value, isolating failures") {
    const auto dir = scratch_dir("sweep");
    Json doc = minimal_doc();
    doc["controls"] = Json::parse(R"({"breakpoints": [0], "values": [[2.0]]})");
    doc["sweep"] = Json::parse(R"({"/swimmer/k/0": [1, 2, 4]})");
    auto run = [&](const Json& d, const std::string& name, int threads) {
        const auto path = dir / (name + ".json");
        std::ofstream(path) << d.dump(2);
        std::ostringstream out, err;
        CHECK(cmd_sweep(path.string(), (dir / (name + ".csv")).string(), threads, out, err) == kExitOk);
        return lines_of(dir / (name + ".csv"));
    };
    const auto a = run(doc, "a", 2);
    REQUIRE(a.size() == 4);
    CHECK(a[0].rfind("/swimmer/k/0,status,", 0) == 0);
    CHECK(a[1].rfind("1,ok,", 0) == 0);
    CHECK(a[2].rfind("2,ok,", 0) == 0);
    CHECK(a[3].rfind("4,ok,", 0) == 0);
    CHECK(run(doc, "b", 1) == a);

    doc["sweep"]["/swimmer/k/0"] = {4, 1, 2};
    const auto p = run(doc, "p", 3);
    REQUIRE(p.size() == 4);
    CHECK(p[1] == a[3]);
    CHECK(p[2] == a[1]);
    CHECK(p[3] == a[2]);

    doc["sweep"]["/swimmer/k/0"] = {1, -1};
    const auto f = run(doc, "f", 2);
    REQUIRE(f.size() == 3);
    CHECK(f[1].rfind("1,ok,", 0) == 0);
    CHECK(f[2].rfind("-1,error,", 0) == 0);
    std::filesystem::remove_all(dir);
}
