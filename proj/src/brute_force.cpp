#include "ppsched/solver.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace ppsched {

BruteForceResult brute_force_exact(const Instance& inst, const ScenarioSet& set, int grid_step, int horizon,
                                   ProcessingMode mode) {
    require_valid(inst);
    validate_scenarios(inst, set);
    if (grid_step <= 0 || horizon < 0) throw ValidationError("grid step must be positive and horizon non-negative");
    if (inst.size() > 4) throw SizeGuardError("brute force is limited to 4 patients");
    if (horizon / grid_step > 12) throw SizeGuardError("brute force is limited to 12 grid steps");
    if (set.size() > 10) throw SizeGuardError("brute force is limited to 10 scenarios");

    const std::size_t n = inst.size();
    const int levels = horizon / grid_step + 1;
    BruteForceResult best;
    best.cost = std::numeric_limits<double>::infinity();

    FirstStageSchedule s;
    s.order.resize(n);
    std::iota(s.order.begin(), s.order.end(), 0);
    s.appointments.assign(n, 0);
    std::vector<int> level(n, 0);  // grid index per position, nondecreasing
    do {
        std::fill(level.begin(), level.end(), 0);
        while (true) {
            for (std::size_t p = 0; p < n; ++p) s.appointments[static_cast<std::size_t>(s.order[p])] = level[p] * grid_step;
            double cost = 0.0;
            for (const Scenario& sc : set.scenarios) {
                cost += sc.probability * evaluate_mode(mode, inst, s, sc).metrics.cost;
                if (cost >= best.cost) break;
            }
            ++best.schedules_checked;
            if (cost < best.cost) {
                best.cost = cost;
                best.schedule = s;
            }
            // Next nondecreasing level vector.
            std::size_t p = n;
            while (p > 0 && level[p - 1] == levels - 1) --p;
            if (p == 0) break;
            ++level[p - 1];
            for (std::size_t q = p; q < n; ++q) level[q] = level[p - 1];
        }
    } while (std::next_permutation(s.order.begin(), s.order.end()));
    if (n == 0) best.cost = 0.0;
    return best;
}

}  // namespace ppsched
