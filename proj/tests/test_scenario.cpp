#include "doctest.h"
#include "fixtures.hpp"

#include "ppsched/experiment.hpp"

#include <filesystem>
#include <fstream>

using namespace ppsched;
using namespace fixtures;

namespace {

std::filesystem::path write_tmp(const std::string& name, const std::string& text) {
    auto dir = std::filesystem::temp_directory_path() / "ppsched_tests";
    std::filesystem::create_directories(dir);
    auto p = dir / name;
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("moments file loads with normalized class weights") {
    auto classes = load_moments(data_path("acuity_moments.csv"));
    REQUIRE(classes.size() == 5);
    CHECK(classes[2].id == 3);
    CHECK(classes[2].surgery_moments.mean == doctest::Approx(109.12));
    CHECK(classes[1].count_weight == doctest::Approx(640.0 / 1963.0));
    double total = 0.0;
    for (const auto& c : classes) total += c.count_weight;
    CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("pool file loads samples and their moments") {
    auto p = write_tmp("pools.csv",
                       "acuity,kind,duration_minutes\n"
                       "1,induction,10\n1,induction,20\n1,surgery,30\n"
                       "2,induction,5\n2,surgery,40\n2,surgery,60\n2,surgery,80\n");
    auto classes = load_pools(p);
    REQUIRE(classes.size() == 2);
    CHECK(classes[0].induction_moments.mean == doctest::Approx(15));
    CHECK(classes[0].induction_moments.sd == doctest::Approx(std::sqrt(50.0)));
    CHECK(classes[1].surgery_moments.mean == doctest::Approx(60));
    CHECK(classes[1].surgery_moments.sd == doctest::Approx(20));
    // weights follow the larger pool of each class: 2 and 3
    CHECK(classes[0].count_weight == doctest::Approx(0.4));
}

TEST_CASE("malformed inputs are rejected") {
    CHECK_THROWS_AS(load_pools(write_tmp("bad1.csv", "acuity,kind,duration_minutes\n1,recovery,10\n")),
                    ValidationError);
    CHECK_THROWS_AS(load_pools(write_tmp("bad2.csv", "acuity,kind,duration_minutes\n1,induction,-3\n")),
                    ValidationError);
    CHECK_THROWS_AS(load_pools(write_tmp("bad3.csv", "acuity,kind,duration_minutes\n1,induction,3\n")),
                    ValidationError);
    CHECK_THROWS_AS(load_moments(write_tmp("bad4.csv", "acuity,count\n1,3\n")), ValidationError);
    CHECK_THROWS_AS(load_moments("/nonexistent/file.csv"), ValidationError);
}

TEST_CASE("lognormal parameters reproduce the moments") {
    Moments m{30, 12};
    auto [mu, sigma] = lognormal_params(m);
    // mean = exp(mu + s^2/2), var = (exp(s^2) - 1) exp(2 mu + s^2)
    CHECK(std::exp(mu + sigma * sigma / 2) == doctest::Approx(30));
    CHECK(std::sqrt((std::exp(sigma * sigma) - 1) * std::exp(2 * mu + sigma * sigma)) == doctest::Approx(12));

    auto pools = synthesize_pools({reference_moments()[0]}, 200000, 3);
    Moments got = sample_moments(pools[0].induction_pool);
    CHECK(got.mean == doctest::Approx(23.65).epsilon(0.01));
    CHECK(got.sd == doctest::Approx(5.66).epsilon(0.03));
}

TEST_CASE("sampling is seeded and draws from the pools") {
    Instance inst = make_instance({0, 1, 0}, 2, 2);
    inst.patients[1].acuity = 2;
    AcuityClass a{1, "a", 0.5, {10, 11}, {50}, {}, {}};
    AcuityClass b{2, "b", 0.5, {20}, {70, 71, 72}, {}, {}};
    ScenarioSet s1 = sample_scenarios(inst, {a, b}, 40, 9);
    ScenarioSet s2 = sample_scenarios(inst, {a, b}, 40, 9);
    ScenarioSet s3 = sample_scenarios(inst, {a, b}, 40, 10);
    CHECK(s1.scenarios[7].turnover == s2.scenarios[7].turnover);
    CHECK(s1.scenarios[7].turnover != s3.scenarios[7].turnover);
    CHECK_NOTHROW(validate_scenarios(inst, s1));
    for (const auto& s : s1.scenarios) {
        CHECK(s.probability == doctest::Approx(1.0 / 40));
        CHECK((s.induction[0] == 10 || s.induction[0] == 11));
        CHECK(s.induction[1] == 20);
        CHECK(s.surgery[1] >= 70);
        for (double q : s.turnover) CHECK((q >= kTurnoverLow && q <= kTurnoverHigh));
    }
    inst.patients[2].acuity = 9;
    CHECK_THROWS_AS(sample_scenarios(inst, {a, b}, 5, 1), ValidationError);
}

TEST_CASE("mean scenario and turnover scaling") {
    ScenarioSet set;
    set.scenarios.push_back(make_scenario({10, 20}, {30, 40}, {15, 25}, 0.5));
    set.scenarios.push_back(make_scenario({30, 20}, {50, 40}, {25, 15}, 0.5));
    Scenario m = mean_scenario(set);
    CHECK(m.induction == std::vector<double>{20, 20});
    CHECK(m.surgery == std::vector<double>{40, 40});
    CHECK(m.turnover == std::vector<double>{20, 20});
    CHECK(turnover_induction_ratio(set) == doctest::Approx(1.0));

    ScenarioSet half = scale_turnover(set, 0.5);
    CHECK(turnover_induction_ratio(half) == doctest::Approx(0.5));
    CHECK(half.scenarios[0].turnover[0] == doctest::Approx(7.5));
    CHECK(half.scenarios[0].induction == set.scenarios[0].induction);
    CHECK_THROWS_AS(scale_turnover(set, 0), ValidationError);
}

TEST_CASE("scenario validation") {
    Instance inst = make_instance({0, 0}, 1, 1);
    ScenarioSet set;
    set.scenarios.push_back(make_scenario({10, 20}, {30, 40}, {15, 25}, 0.5));
    CHECK_THROWS_AS(validate_scenarios(inst, set), ValidationError);  // probabilities sum to 0.5
    set.scenarios[0].probability = 1.0;
    CHECK_NOTHROW(validate_scenarios(inst, set));
    set.scenarios[0].surgery[1] = 0;
    CHECK_THROWS_AS(validate_scenarios(inst, set), ValidationError);
    CHECK_THROWS_AS(validate_scenarios(inst, ScenarioSet{}), ValidationError);
}
