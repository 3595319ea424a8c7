#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "swimsim/coupling.hpp"

namespace swimsim {

using Json = nlohmann::ordered_json;

/// Build a scenario from a JSON document. Every problem (unknown keys, wrong types,
/// violated invariants) is collected into one ConfigInvalid. The optional "sweep"
/// section is accepted and ignored here.
ScenarioConfig config_from_json(const Json& doc);
ScenarioConfig parse_config(const std::string& path);
Json read_json_file(const std::string& path);

/// Complete document with every default written out; parse(serialize(c)) reproduces c.
Json config_to_json(const ScenarioConfig& cfg);
std::string serialize_config(const ScenarioConfig& cfg);

/// Sweep axis: a JSON pointer into the config document and the values it takes.
struct SweepAxis {
    std::string pointer;
    std::vector<Json> values;
};

std::vector<SweepAxis> parse_sweep(const Json& doc);

/// Cartesian product in document order: the last axis varies fastest.
std::vector<std::vector<Json>> sweep_cells(const std::vector<SweepAxis>& axes);

/// Copy of `doc` without its sweep section and with the cell's values substituted.
Json apply_cell(const Json& doc, const std::vector<SweepAxis>& axes, const std::vector<Json>& cell);

}  // namespace swimsim
