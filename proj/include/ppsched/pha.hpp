#pragma once

#include "ppsched/core.hpp"
#include "ppsched/model.hpp"
#include "ppsched/scenario.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace ppsched {

struct PhaConfig {
    double rho0 = 0.05;
    double alpha = 1.1;
    double rho_u1 = 0.2;
    double rho_u2 = 1.0;
    double rho_u3 = 5.0;
    int limit_1 = 25;
    int limit_2 = 50;
    int limit_3 = 60;
    int limit_4 = 70;
    int limit_5 = 90;
    int controliter = 100;
    double fix_share = 0.8;
    bool literal_reciprocal = false;
    int max_iterations = 1000;
    double time_limit = 0.0;  // seconds, 0 = none
    // Adds tangents around the consensus in every subproblem; off keeps
    // only the pool anchored at previous solutions.
    bool consensus_bracket = true;

    std::string backend = "highs";
    double ssp_time_limit = 60.0;
    double ssp_gap = 1e-6;
    int threads = 1;
    ModelOptions model{true, true};
    bool shuffle_solve_order = false;  // for order-independence checks
    std::uint64_t shuffle_seed = 0;
};

void validate(const PhaConfig& config);

// Active upper limit on rho at iteration z.
double rho_upper(int z, const PhaConfig& config);

// Appointment-fixing threshold p^(z) in percent, z >= 1.
double fixing_threshold(int z, const PhaConfig& config);

enum class PenaltyBranch { increase, cap, decrease, clamp, keep };
std::string to_string(PenaltyBranch b);

struct PenaltyStep {
    double rho;
    PenaltyBranch branch;
};

// One step of the three-limit penalty rule for iteration z >= 2.
PenaltyStep penalty_update(int z, double rho, double delta_d, double delta_d_prev, double delta_p,
                           double delta_p_prev, const PhaConfig& config);

std::vector<double> update_consensus(const std::vector<std::vector<int>>& appointments,
                                     const std::vector<double>& probabilities);

double delta_d(const std::vector<std::vector<int>>& appointments, const std::vector<double>& consensus);
double delta_p(const std::vector<double>& consensus, const std::vector<double>& previous);

// First-stage decisions of one scenario subproblem.
struct ScenarioDecision {
    std::vector<int> appointments;
    std::vector<std::vector<char>> precedes;  // precedes[i][j] = u_ij
};

struct FixingLedger {
    std::set<std::pair<int, int>> orders;  // (i, j): i before j
    std::map<int, int> appointments;
    std::vector<std::string> diagnostics;

    bool order_fixed(int i, int j) const { return orders.count({i, j}) || orders.count({j, i}); }
    // True when i is forced before j through fixed pairs.
    bool implies(int i, int j) const;
};

struct FixingResult {
    int new_orders = 0;
    int new_appointments = 0;
};

FixingResult variable_fixing(FixingLedger& ledger, const std::vector<ScenarioDecision>& decisions,
                             const std::vector<double>& probabilities, double threshold_percent,
                             double fix_share);

// Remembers quantized multiplier vectors per patient.
class CycleDetector {
public:
    explicit CycleDetector(double quantum = 1e-6) : quantum_(quantum) {}
    // Records mu_i(.) and reports whether the same vector was seen before.
    bool observe(int patient, const std::vector<double>& multipliers);

private:
    double quantum_;
    std::map<int, std::set<std::vector<long long>>> seen_;
};

// Stall rule: fires when z is on the controliter grid after limit_5 and
// the unfixed-appointment count did not change over the window.
bool stall_due(int z, const std::vector<int>& unfixed_history, const PhaConfig& config);

struct IterationRecord {
    int z = 0;
    double rho = 0.0;
    double rho_upper = 0.0;
    double delta_d = 0.0;
    double delta_p = 0.0;  // negative when undefined (z = 1)
    double threshold = 100.0;
    std::vector<double> consensus;
    int fixed_orders = 0;
    int fixed_appointments = 0;
    std::vector<double> scenario_objectives;
    double lagrangian = 0.0;
    std::string penalty_branch;
    std::vector<int> cycle_fixed;
    bool stall_fired = false;
    double seconds = 0.0;
};

std::string to_json_line(const IterationRecord& r);

struct PhaResult {
    FirstStageSchedule schedule;
    Metrics metrics;
    std::vector<IterationRecord> trace;
    int iterations = 0;
    bool converged = false;
    double wall_seconds = 0.0;
};

using TraceSink = std::function<void(const IterationRecord&)>;

PhaResult run_epha(const Instance& instance, const ScenarioSet& set, const PhaConfig& config,
                   const TraceSink& sink = {});

}  // namespace ppsched
