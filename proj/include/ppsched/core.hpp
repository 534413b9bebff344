#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ppsched {

using Minutes = double;

// Comparisons between times use this absolute tolerance.
inline constexpr double kTimeTol = 1e-9;

struct Moments {
    double mean = 0.0;
    double sd = 0.0;
};

struct AcuityClass {
    int id = 0;
    std::string label;
    double count_weight = 0.0;
    std::vector<Minutes> induction_pool;
    std::vector<Minutes> surgery_pool;
    Moments induction_moments;
    Moments surgery_moments;
};

struct Patient {
    int id = 0;
    int acuity = 0;
    int or_id = 0;
};

// c_I, c_J and c_W in the objective.
struct CostWeights {
    double or_idle = 0.5;
    double ir_idle = 0.25;
    double waiting = 0.25;
};

struct Instance {
    std::vector<Patient> patients;
    int num_irs = 1;
    int num_ors = 1;
    CostWeights weights;
    double big_m = 0.0;
    // Upper bound on appointment times.
    Minutes appointment_horizon = 0.0;

    std::size_t size() const { return patients.size(); }
};

// appointments[i] is the appointment of patient i; order lists patient
// indices in the first-stage processing order.
struct FirstStageSchedule {
    std::vector<int> appointments;
    std::vector<int> order;
};

struct Metrics {
    double or_idle_total = 0.0;
    double ir_idle_total = 0.0;
    double wait_ir_total = 0.0;
    double wait_or_total = 0.0;
    std::vector<double> or_closures;
    std::vector<double> ir_closures;
    double cost = 0.0;
};

struct Violation {
    std::string field;
    std::string rule;
};

// Raised when inputs break a documented invariant.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when an exact method is called beyond its size limits.
class SizeGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ScenarioSet;

std::vector<Violation> validate_instance(const Instance& instance);
void require_valid(const Instance& instance);

double compute_big_m(const Instance& instance, const ScenarioSet& set);

// Sum of the per-patient worst case e+d+q over the scenario set.
double worst_case_workload(const Instance& instance, const ScenarioSet& set);

CostWeights normalize_weights(double or_idle, double ir_idle, double waiting);

double cost_of(const CostWeights& w, double or_idle, double ir_idle, double waiting);

// Rank of each patient in schedule.order.
std::vector<int> order_positions(const FirstStageSchedule& schedule);

// Throws ValidationError if the schedule is not a valid first stage for
// the instance (order is a permutation, appointments nondecreasing along it).
void require_valid(const Instance& instance, const FirstStageSchedule& schedule);

// Orders patients by appointment, breaking ties by index.
std::vector<int> order_by_appointment(const std::vector<int>& appointments);

// Half-up rounding used wherever a fractional appointment is fixed.
int round_half_up(double x);

}  // namespace ppsched
