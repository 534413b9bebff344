#include "ppsched/core.hpp"
#include "ppsched/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ppsched {

std::vector<Violation> validate_instance(const Instance& instance) {
    std::vector<Violation> out;
    auto add = [&](std::string field, std::string rule) {
        out.push_back({std::move(field), std::move(rule)});
    };
    if (instance.num_irs < 1) add("num_irs", "at least one induction room");
    if (instance.num_ors < 1) add("num_ors", "at least one operating room");
    for (std::size_t i = 0; i < instance.patients.size(); ++i) {
        const Patient& p = instance.patients[i];
        std::string f = "patients[" + std::to_string(i) + "]";
        if (p.id != static_cast<int>(i)) add(f + ".id", "id equals position");
        if (p.or_id < 0 || p.or_id >= instance.num_ors) add(f + ".or_id", "OR index in range");
        if (p.acuity < 0) add(f + ".acuity", "non-negative acuity class");
    }
    const CostWeights& w = instance.weights;
    if (w.or_idle < 0 || w.ir_idle < 0 || w.waiting < 0) add("weights", "weights non-negative");
    if (std::abs(w.or_idle + w.ir_idle + w.waiting - 1.0) > 1e-9) add("weights", "weights sum to 1");
    if (!(instance.big_m >= 0)) add("big_m", "big_m non-negative");
    if (!(instance.appointment_horizon >= 0)) add("appointment_horizon", "horizon non-negative");
    return out;
}

void require_valid(const Instance& instance) {
    auto v = validate_instance(instance);
    if (v.empty()) return;
    std::ostringstream os;
    os << "invalid instance:";
    for (const auto& x : v) os << ' ' << x.field << " (" << x.rule << ");";
    throw ValidationError(os.str());
}

double worst_case_workload(const Instance& instance, const ScenarioSet& set) {
    double total = 0.0;
    for (std::size_t i = 0; i < instance.size(); ++i) {
        double worst = 0.0;
        for (const Scenario& s : set.scenarios)
            worst = std::max(worst, s.induction[i] + s.surgery[i] + s.turnover[i]);
        total += worst;
    }
    return total;
}

double compute_big_m(const Instance& instance, const ScenarioSet& set) {
    return worst_case_workload(instance, set) + instance.appointment_horizon;
}

CostWeights normalize_weights(double or_idle, double ir_idle, double waiting) {
    if (or_idle < 0 || ir_idle < 0 || waiting < 0)
        throw ValidationError("weights must be non-negative");
    double s = or_idle + ir_idle + waiting;
    if (!(s > 0)) throw ValidationError("weights must not all be zero");
    return {or_idle / s, ir_idle / s, waiting / s};
}

double cost_of(const CostWeights& w, double or_idle, double ir_idle, double waiting) {
    return w.or_idle * or_idle + w.ir_idle * ir_idle + w.waiting * waiting;
}

std::vector<int> order_positions(const FirstStageSchedule& schedule) {
    std::vector<int> pos(schedule.order.size(), -1);
    for (std::size_t k = 0; k < schedule.order.size(); ++k)
        pos[static_cast<std::size_t>(schedule.order[k])] = static_cast<int>(k);
    return pos;
}

void require_valid(const Instance& instance, const FirstStageSchedule& schedule) {
    const std::size_t n = instance.size();
    if (schedule.appointments.size() != n || schedule.order.size() != n)
        throw ValidationError("schedule size does not match instance");
    std::vector<char> seen(n, 0);
    for (int i : schedule.order) {
        if (i < 0 || static_cast<std::size_t>(i) >= n || seen[static_cast<std::size_t>(i)])
            throw ValidationError("schedule order is not a permutation");
        seen[static_cast<std::size_t>(i)] = 1;
    }
    for (std::size_t k = 1; k < n; ++k) {
        if (schedule.appointments[static_cast<std::size_t>(schedule.order[k])] <
            schedule.appointments[static_cast<std::size_t>(schedule.order[k - 1])])
            throw ValidationError("appointments must be nondecreasing along the order");
    }
    for (int a : schedule.appointments)
        if (a < 0) throw ValidationError("appointments must be non-negative");
}

std::vector<int> order_by_appointment(const std::vector<int>& appointments) {
    std::vector<int> order(appointments.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        return appointments[static_cast<std::size_t>(i)] < appointments[static_cast<std::size_t>(j)];
    });
    return order;
}

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

}  // namespace ppsched
