#include "ppsched/heuristics.hpp"
#include "ppsched/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ppsched {

std::string to_string(SequencingRule r) {
    switch (r) {
        case SequencingRule::spt: return "SPT";
        case SequencingRule::lpt: return "LPT";
        case SequencingRule::var: return "VAR";
    }
    return "SPT";
}

SequencingRule parse_rule(const std::string& s) {
    std::string u = s;
    std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (u == "SPT") return SequencingRule::spt;
    if (u == "LPT") return SequencingRule::lpt;
    if (u == "VAR") return SequencingRule::var;
    throw ValidationError("unknown sequencing rule '" + s + "'");
}

double HedgingTable::at(int acuity, int percentile) const {
    auto c = estimates.find(acuity);
    if (c == estimates.end()) throw ValidationError("no estimates for acuity " + std::to_string(acuity));
    auto p = c->second.find(percentile);
    if (p == c->second.end()) throw ValidationError("no estimate for percentile " + std::to_string(percentile));
    return p->second;
}

std::vector<int> sequence(const Instance& inst, const std::vector<AcuityClass>& classes, SequencingRule rule) {
    std::vector<double> key(inst.size());
    for (std::size_t i = 0; i < inst.size(); ++i) {
        const Moments& m = find_class(classes, inst.patients[i].acuity).induction_moments;
        key[i] = rule == SequencingRule::spt ? m.mean : rule == SequencingRule::lpt ? -m.mean : m.sd * m.sd;
    }
    std::vector<int> order(inst.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return key[static_cast<std::size_t>(i)] < key[static_cast<std::size_t>(j)]; });
    return order;
}

double nearest_rank_percentile(std::vector<double> values, int percentile) {
    if (values.empty()) throw ValidationError("percentile of an empty pool");
    if (percentile <= 0 || percentile > 100) throw ValidationError("percentile must lie in (0, 100]");
    std::sort(values.begin(), values.end());
    auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * static_cast<double>(values.size()) - 1e-12));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

HedgingTable percentile_estimates(const std::vector<AcuityClass>& classes, const std::vector<int>& percentiles) {
    HedgingTable t;
    for (const AcuityClass& c : classes)
        for (int p : percentiles) t.estimates[c.id][p] = nearest_rank_percentile(c.induction_pool, p);
    return t;
}

FirstStageSchedule hedged_schedule(const Instance& inst, const std::vector<int>& order, const HedgingTable& table,
                                   int percentile) {
    require_valid(inst);
    FirstStageSchedule s;
    s.order = order;
    s.appointments.assign(inst.size(), 0);
    std::vector<double> free_at;  // estimated release time of each IR in use
    for (int j : order) {
        double est = table.at(inst.patients[static_cast<std::size_t>(j)].acuity, percentile);
        int appt = 0;
        std::size_t slot = free_at.size();
        if (free_at.size() >= static_cast<std::size_t>(inst.num_irs)) {
            slot = static_cast<std::size_t>(std::min_element(free_at.begin(), free_at.end()) - free_at.begin());
            appt = static_cast<int>(std::ceil(free_at[slot] - 1e-9));
        } else {
            free_at.push_back(0.0);
        }
        s.appointments[static_cast<std::size_t>(j)] = appt;
        free_at[slot] = appt + est;
    }
    require_valid(inst, s);
    return s;
}

}  // namespace ppsched
