#pragma once

#include "ppsched/core.hpp"

#include <map>
#include <string>
#include <vector>

namespace ppsched {

enum class SequencingRule { spt, lpt, var };

std::string to_string(SequencingRule r);
SequencingRule parse_rule(const std::string& s);

inline constexpr int kHedgingPercentiles[] = {50, 60, 70, 80, 90};

// acuity -> percentile -> induction-duration estimate
struct HedgingTable {
    std::map<int, std::map<int, double>> estimates;
    double at(int acuity, int percentile) const;
};

// SPT/LPT order by mean induction time, VAR by induction variance; ties by
// patient index.
std::vector<int> sequence(const Instance& instance, const std::vector<AcuityClass>& classes, SequencingRule rule);

// Nearest-rank percentile: the ceil(p/100 * n)-th smallest value.
double nearest_rank_percentile(std::vector<double> values, int percentile);

HedgingTable percentile_estimates(const std::vector<AcuityClass>& classes,
                                  const std::vector<int>& percentiles = {50, 60, 70, 80, 90});

// First |K| patients start at 0; each later patient is booked at the
// earliest estimated IR-free time, rounded up to a whole minute.
FirstStageSchedule hedged_schedule(const Instance& instance, const std::vector<int>& order,
                                   const HedgingTable& table, int percentile);

}  // namespace ppsched
