#pragma once

#include "ppsched/core.hpp"
#include "ppsched/pha.hpp"
#include "ppsched/scenario.hpp"
#include "ppsched/simulate.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace ppsched {

using Json = nlohmann::ordered_json;

Json to_json(const Instance& instance);
Instance instance_from_json(const Json& j);

Json to_json(const ScenarioSet& set);
ScenarioSet scenarios_from_json(const Json& j);

Json to_json(const FirstStageSchedule& schedule);
FirstStageSchedule schedule_from_json(const Json& j);

Json to_json(const Metrics& metrics);
Json to_json(const SecondStageOutcome& outcome);

// Settings shared by the command line and the experiment drivers.
struct RunConfig {
    PhaConfig pha;
    std::string backend = "highs";
    std::string dump_dir;
    double time_limit = 600.0;  // seconds per exact solve
    double gap = 1e-6;
    int threads = 1;
};

// Reads a JSON config with optional sections "solver", "pha" and
// "penalty". Unknown keys are rejected.
RunConfig config_from_json(const Json& j, RunConfig base = {});
Json to_json(const RunConfig& config);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace ppsched
