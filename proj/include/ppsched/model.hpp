#pragma once

#include "ppsched/core.hpp"
#include "ppsched/scenario.hpp"

#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ppsched {

enum class VarKind { continuous, integer, binary };
enum class Sense { le, ge, eq };

struct Variable {
    std::string name;
    VarKind kind = VarKind::continuous;
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
};

struct LinearConstraint {
    std::string name;
    std::vector<std::pair<int, double>> terms;
    Sense sense = Sense::le;
    double rhs = 0.0;
};

struct Objective {
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;
};

// Solver-neutral minimization problem.
struct MipDescription {
    std::vector<Variable> variables;
    std::vector<LinearConstraint> constraints;
    Objective objective;

    int add_variable(std::string name, VarKind kind, double lower, double upper);
    void add_constraint(std::string name, std::vector<std::pair<int, double>> terms, Sense sense,
                        double rhs);
    int index_of(const std::string& name) const;
    std::optional<int> find(const std::string& name) const;
    double objective_value(const std::vector<double>& x) const;
    // Largest violation of bounds, integrality and constraints at x.
    double max_violation(const std::vector<double>& x) const;

private:
    std::unordered_map<std::string, int> index_;
};

struct ModelOptions {
    bool valid_inequalities = true;
    // Adds J >= sum of OR waits per scenario (patients stay in the IR
    // until their surgery starts) and, with the IR ordering inequality,
    // G_1 >= A_i.
    bool occupancy_cut = false;
};

MipDescription build_extensive_form(const Instance& instance, const ScenarioSet& set,
                                    bool with_valid_inequalities);
MipDescription build_extensive_form(const Instance& instance, const ScenarioSet& set,
                                    const ModelOptions& options);

MipDescription build_mean_value(const Instance& instance, const Scenario& mean,
                                bool with_valid_inequalities);
MipDescription build_mean_value(const Instance& instance, const Scenario& mean,
                                const ModelOptions& options);

// Serial processing: induction, surgery and turnover all occupy the OR.
MipDescription build_serial_extensive_form(const Instance& instance, const ScenarioSet& set);

// Per-scenario subproblem state carried across progressive hedging iterations.
struct SspContext {
    std::vector<double> multipliers;          // mu_i for this scenario
    double rho = 1.0;
    std::vector<double> consensus;            // a-hat
    std::vector<std::vector<double>> cuts;    // anchors per patient
    std::vector<std::pair<int, int>> fixed_orders;   // (i, j): i precedes j
    std::map<int, int> fixed_appointments;
    // Extra tangents rebuilt every iteration at round(a-hat_i) + offset,
    // clamped to [0, horizon]. Not part of the cut pool.
    std::vector<double> bracket_offsets;
};

// Offsets 0, +-1, +-2, +-4, ... up to the horizon.
std::vector<double> geometric_bracket(double horizon);

MipDescription build_ssp(const Instance& instance, const Scenario& scenario, const SspContext& ctx,
                         bool iteration_one, const ModelOptions& options = {});

// Records a tangent cut h_i >= v^2 + 2 v (a_i - v) for patient i.
void add_linearization_cut(SspContext& ctx, int patient, double anchor);

// The dropped constant (rho/2) sum a-hat_i^2 of a subproblem objective.
double ssp_dropped_constant(const SspContext& ctx);

// Pins a_i and u_ij to the given first stage via bounds.
void fix_first_stage(MipDescription& mip, const FirstStageSchedule& schedule);

// Appointments and order read from a solution vector.
FirstStageSchedule extract_schedule(const MipDescription& mip, const std::vector<double>& x,
                                    std::size_t patients);

// Solution vector of the extensive form (or mean-value form) for a first
// stage, with second stages taken from evaluate. Used as a MIP start.
std::vector<double> extensive_form_start(const MipDescription& mip, const Instance& instance,
                                         const ScenarioSet& set, const FirstStageSchedule& schedule);

void write_lp(const MipDescription& mip, std::ostream& os);
std::string to_lp_string(const MipDescription& mip);

std::string u_name(int i, int j);
std::string a_name(int i);

}  // namespace ppsched
