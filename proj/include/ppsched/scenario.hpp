#pragma once

#include "ppsched/core.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace ppsched {

struct Scenario {
    std::vector<Minutes> induction;
    std::vector<Minutes> surgery;
    std::vector<Minutes> turnover;
    double probability = 1.0;

    std::size_t size() const { return induction.size(); }
};

struct ScenarioSet {
    std::vector<Scenario> scenarios;
    std::uint64_t seed = 0;

    std::size_t size() const { return scenarios.size(); }
};

inline constexpr Minutes kTurnoverLow = 15.0;
inline constexpr Minutes kTurnoverHigh = 30.0;

// Pool CSV: acuity,kind,duration_minutes with kind in {induction, surgery}.
std::vector<AcuityClass> load_pools(const std::filesystem::path& path);

// Moments CSV: acuity,count,ind_mean,ind_sd,surg_mean,surg_sd.
std::vector<AcuityClass> load_moments(const std::filesystem::path& path);

// Lognormal parameters (mu, sigma) matching a mean and standard deviation.
std::pair<double, double> lognormal_params(const Moments& m);

std::vector<AcuityClass> synthesize_pools(const std::vector<AcuityClass>& classes,
                                          std::size_t pool_size, std::uint64_t seed);

ScenarioSet sample_scenarios(const Instance& instance,
                             const std::vector<AcuityClass>& classes,
                             std::size_t n, std::uint64_t seed);

Scenario mean_scenario(const ScenarioSet& set);

// Rescales every turnover so that the expected turnover / induction ratio
// of the set equals `ratio`.
ScenarioSet scale_turnover(const ScenarioSet& set, double ratio);

double turnover_induction_ratio(const ScenarioSet& set);

Moments sample_moments(const std::vector<double>& xs);

void validate_scenarios(const Instance& instance, const ScenarioSet& set);

// Looks up the class with the given id; throws ValidationError if absent.
const AcuityClass& find_class(const std::vector<AcuityClass>& classes, int id);

}  // namespace ppsched
