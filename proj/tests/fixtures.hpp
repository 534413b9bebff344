#pragma once

#include "ppsched/core.hpp"
#include "ppsched/scenario.hpp"
#include "ppsched/simulate.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

namespace fixtures {

using namespace ppsched;

inline std::string data_path(const std::string& name) { return std::string(PPSCHED_DATA_DIR) + "/" + name; }

inline Instance make_instance(const std::vector<int>& ors, int irs, int num_ors) {
    Instance inst;
    for (std::size_t i = 0; i < ors.size(); ++i) inst.patients.push_back({static_cast<int>(i), 1, ors[i]});
    inst.num_irs = irs;
    inst.num_ors = num_ors;
    inst.big_m = 10000.0;
    inst.appointment_horizon = 1000.0;
    return inst;
}

inline Scenario make_scenario(std::vector<double> e, std::vector<double> d, std::vector<double> q, double p = 1.0) {
    return Scenario{std::move(e), std::move(d), std::move(q), p};
}

// The worked example with seven patients, two IRs and three ORs.
struct WorkedExample {
    Instance inst = make_instance({0, 0, 1, 1, 2, 2, 2}, 2, 3);
    Scenario sc = make_scenario({10, 34, 22, 18, 19, 22, 16}, {53, 10, 77, 14, 55, 65, 12},
                                {30, 15, 19, 30, 30, 27, 16});
    FirstStageSchedule sched{{20, 0, 55, 10, 38, 87, 0}, {6, 1, 3, 0, 4, 2, 5}};
};

struct RandomCase {
    Instance inst;
    ScenarioSet set;
    FirstStageSchedule sched;
};

// Small random instance with a random feasible first stage.
inline RandomCase random_case(std::mt19937_64& rng, int n, int irs, int ors, int scenarios, int max_appt = 60) {
    std::uniform_int_distribution<int> or_pick(0, ors - 1), appt(0, max_appt);
    std::uniform_real_distribution<double> ind(5, 35), surg(10, 90), turn(kTurnoverLow, kTurnoverHigh);
    RandomCase c;
    std::vector<int> or_ids;
    for (int i = 0; i < n; ++i) or_ids.push_back(or_pick(rng));
    c.inst = make_instance(or_ids, irs, ors);
    for (int w = 0; w < scenarios; ++w) {
        Scenario s;
        for (int i = 0; i < n; ++i) {
            s.induction.push_back(std::round(ind(rng)));
            s.surgery.push_back(std::round(surg(rng)));
            s.turnover.push_back(std::round(turn(rng)));
        }
        s.probability = 1.0 / scenarios;
        c.set.scenarios.push_back(s);
    }
    std::vector<int> a;
    for (int i = 0; i < n; ++i) a.push_back(appt(rng));
    c.sched.appointments = a;
    c.sched.order = order_by_appointment(a);
    return c;
}

}  // namespace fixtures
