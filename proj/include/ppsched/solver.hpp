#pragma once

#include "ppsched/core.hpp"
#include "ppsched/model.hpp"
#include "ppsched/simulate.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ppsched {

enum class SolveStatus { optimal, feasible, infeasible, time_limit, error };

std::string to_string(SolveStatus s);

struct SolveOptions {
    double time_limit = 60.0;  // seconds
    double rel_gap = 1e-6;
    double abs_gap = 1e-9;
    int threads = 1;
    std::vector<double> start;  // optional MIP start, full length
    std::string dump_dir;       // write an LP file per solve when set
    std::string dump_name = "model";
};

struct SolveResult {
    SolveStatus status = SolveStatus::error;
    double objective = 0.0;  // incumbent value, if any
    double bound = 0.0;      // proven lower bound
    std::vector<double> values;
    double wall_seconds = 0.0;
    double nodes = 0.0;

    bool has_solution() const { return !values.empty(); }
    std::map<std::string, double> assignment(const MipDescription& mip) const;
};

class MipBackend {
public:
    virtual ~MipBackend() = default;
    virtual std::string name() const = 0;
    virtual SolveResult solve(const MipDescription& mip, const SolveOptions& options) = 0;
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// "highs" is the only built-in backend.
std::unique_ptr<MipBackend> make_backend(const std::string& name = "highs");
std::vector<std::string> backend_names();

SolveResult solve(const MipDescription& mip, const SolveOptions& options = {},
                  const std::string& backend = "highs");

struct BruteForceResult {
    FirstStageSchedule schedule;
    double cost = 0.0;
    std::size_t schedules_checked = 0;
};

// Enumerates every order and every nondecreasing appointment vector on the
// grid {0, step, ..., horizon}. Limited to 4 patients, 12 grid steps and
// 10 scenarios.
BruteForceResult brute_force_exact(const Instance& instance, const ScenarioSet& set, int grid_step,
                                   int horizon, ProcessingMode mode = ProcessingMode::parallel);

}  // namespace ppsched
