#pragma once

#include "ppsched/core.hpp"
#include "ppsched/heuristics.hpp"
#include "ppsched/io.hpp"
#include "ppsched/pha.hpp"
#include "ppsched/scenario.hpp"
#include "ppsched/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

namespace ppsched {

// Acuity classes with the reference moments used by default.
std::vector<AcuityClass> reference_moments();

struct ExperimentSpec {
    int patients = 7;
    int num_irs = 2;
    int num_ors = 3;
    int scenarios = 50;
    CostWeights weights{0.5, 0.25, 0.25};
    double turnover_ratio = 0.0;  // 0 keeps the sampled turnovers
    std::vector<AcuityClass> classes;  // empty: reference moments
    std::size_t pool_size = 1000;
    std::uint64_t pool_seed = 1963;
    double duration_scale = 1.0;  // multiplies every sampled duration
    int horizon = 0;               // 0: derived from the scenario set
};

struct GeneratedInstance {
    Instance instance;
    ScenarioSet scenarios;
    std::vector<AcuityClass> classes;  // with pools
    std::uint64_t seed = 0;
};

GeneratedInstance generate_instance(const ExperimentSpec& spec, std::uint64_t seed);

// Recomputes horizon and big-M after the scenario set changed.
void refresh_bounds(Instance& instance, const ScenarioSet& set, int horizon = 0);

struct MethodResult {
    std::string method;
    FirstStageSchedule schedule;
    Metrics metrics;
    SolveStatus status = SolveStatus::optimal;
    double bound = std::numeric_limits<double>::quiet_NaN();
    double mip_objective = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    double wall_seconds = 0.0;
    std::vector<IterationRecord> trace;

    double cost() const { return metrics.cost; }
};

MethodResult solve_exact(const Instance& instance, const ScenarioSet& set, const RunConfig& config,
                         const FirstStageSchedule* start = nullptr, bool valid_inequalities = true);
MethodResult solve_mean_value(const Instance& instance, const ScenarioSet& set, const RunConfig& config);
MethodResult solve_epha(const Instance& instance, const ScenarioSet& set, const RunConfig& config,
                        const TraceSink& sink = {});
MethodResult solve_heuristic(const Instance& instance, const ScenarioSet& set,
                             const std::vector<AcuityClass>& classes, SequencingRule rule, int percentile);
std::vector<MethodResult> solve_all_heuristics(const Instance& instance, const ScenarioSet& set,
                                               const std::vector<AcuityClass>& classes);
// Optimal schedule when induction happens inside the OR.
MethodResult solve_serial_exact(const Instance& instance, const ScenarioSet& set, const RunConfig& config);

// Dispatches "epha", "exact", "mean-value" or "<RULE>-<percentile>".
MethodResult run_method(const std::string& method, const GeneratedInstance& g, const RunConfig& config,
                        const TraceSink& sink = {});

// The twelve weight settings: two weights equal, the third at 10%, 50%,
// 200% or 1000% of them.
std::vector<CostWeights> weight_grid();

struct ReportRow {
    std::string experiment;
    std::uint64_t seed = 0;
    std::string method;
    std::string setting;
    ProcessingMode mode = ProcessingMode::parallel;
    Instance instance;
    ScenarioSet scenarios;
    MethodResult result;
};

std::string report_csv(const std::vector<ReportRow>& rows);
std::string timing_csv(const std::vector<ReportRow>& rows);

// Checks that each CSV objective equals a fresh re-evaluation of the
// stored schedule. Returns the largest absolute difference.
double reverify_report(const std::filesystem::path& dir);

struct SweepOptions {
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::string method = "epha";
    std::vector<double> ratios{0.5, 1.0, 2.0};
    std::vector<int> ir_counts{1, 2, 3};
    std::filesystem::path out;  // run directory; empty: no files
};

std::vector<ReportRow> cmd_solve_batch(const ExperimentSpec& spec, const RunConfig& config,
                                       const SweepOptions& options);
std::vector<ReportRow> cmd_vss(const ExperimentSpec& spec, const RunConfig& config, const SweepOptions& options);
std::vector<ReportRow> cmd_compare_serial(const ExperimentSpec& spec, const RunConfig& config,
                                          const SweepOptions& options);
std::vector<ReportRow> cmd_sweep_weights(const ExperimentSpec& spec, const RunConfig& config,
                                         const SweepOptions& options);
std::vector<ReportRow> cmd_sweep_irs(const ExperimentSpec& spec, const RunConfig& config,
                                     const SweepOptions& options);

// Writes report.csv, timings.csv and rows/<id>.json holding the instance,
// scenarios and schedule needed to re-verify each row.
void write_report(const std::filesystem::path& dir, const std::vector<ReportRow>& rows);

// Per-experiment aggregate table (VSS, serial vs parallel, ...).
std::string summary_csv(const std::vector<ReportRow>& rows);

}  // namespace ppsched
