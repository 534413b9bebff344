#pragma once

#include "ppsched/core.hpp"
#include "ppsched/scenario.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ppsched {

enum class ProcessingMode { parallel, serial };

struct SecondStageOutcome {
    ProcessingMode mode = ProcessingMode::parallel;
    std::vector<int> ir_assignment;        // empty in serial mode
    std::vector<Minutes> induction_start;  // B_i
    std::vector<Minutes> surgery_start;    // A_i
    std::vector<Minutes> wait_ir;          // Y_i
    std::vector<Minutes> wait_or;          // W_i
    std::vector<Minutes> or_closure;       // F_r
    std::vector<Minutes> or_idle;          // I_r
    std::vector<Minutes> ir_closure;       // G_k
    std::vector<Minutes> ir_idle;          // per IR, sums to J
    Metrics metrics;
};

// Earliest-start timeline for a fixed IR assignment.
SecondStageOutcome timeline_for_assignment(const Instance& instance,
                                           const FirstStageSchedule& schedule,
                                           const Scenario& scenario,
                                           const std::vector<int>& assignment);

// Cost-optimal second stage. The search visits the first-available IR
// first and keeps it unless another assignment is strictly cheaper.
SecondStageOutcome evaluate(const Instance& instance, const FirstStageSchedule& schedule,
                            const Scenario& scenario);

// Pure first-available policy: each patient takes the IR that lets its
// induction start earliest (latest-freed IR among ties, then lowest index).
SecondStageOutcome evaluate_myopic(const Instance& instance,
                                   const FirstStageSchedule& schedule,
                                   const Scenario& scenario);

SecondStageOutcome evaluate_serial(const Instance& instance,
                                   const FirstStageSchedule& schedule,
                                   const Scenario& scenario);

SecondStageOutcome evaluate_mode(ProcessingMode mode, const Instance& instance,
                                 const FirstStageSchedule& schedule,
                                 const Scenario& scenario);

// Probability-weighted metrics; closures are averaged per resource.
Metrics evaluate_expected(const Instance& instance, const FirstStageSchedule& schedule,
                          const ScenarioSet& set,
                          ProcessingMode mode = ProcessingMode::parallel);

// Enumerates every IR assignment and reports whether none is strictly
// cheaper than `outcome`. Limited to 6 patients and 3 IRs.
bool check_assignment_optimality(const Instance& instance,
                                 const FirstStageSchedule& schedule,
                                 const Scenario& scenario,
                                 const SecondStageOutcome& outcome);

// Rectangles of a Gantt chart; also used to parse the SVG back in tests.
struct GanttBar {
    std::string row;   // "IR1", "OR2", ...
    std::string kind;  // induction, hold, surgery, turnover
    int patient = 0;   // 1-based label
    Minutes start = 0.0;
    Minutes end = 0.0;
};

std::vector<GanttBar> gantt_bars(const Instance& instance, const SecondStageOutcome& outcome,
                                 const Scenario& scenario);

std::string gantt_svg(const Instance& instance, const SecondStageOutcome& outcome,
                      const Scenario& scenario);
std::string gantt_text(const Instance& instance, const SecondStageOutcome& outcome,
                       const Scenario& scenario);

// Writes <path> as SVG and <path>.txt as a plain timeline.
void export_gantt(const Instance& instance, const SecondStageOutcome& outcome,
                  const Scenario& scenario, const std::filesystem::path& path);

std::vector<GanttBar> parse_gantt_svg(const std::string& svg);

}  // namespace ppsched
