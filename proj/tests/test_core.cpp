#include "doctest.h"
#include "fixtures.hpp"

using namespace ppsched;
using fixtures::make_instance;

TEST_CASE("instance validation reports each broken field") {
    Instance inst = make_instance({0, 1, 0}, 2, 2);
    CHECK(validate_instance(inst).empty());
    CHECK_NOTHROW(require_valid(inst));

    SUBCASE("or out of range") {
        inst.patients[1].or_id = 2;
        auto v = validate_instance(inst);
        REQUIRE(v.size() == 1);
        CHECK(v[0].field == "patients[1].or_id");
        CHECK_THROWS_AS(require_valid(inst), ValidationError);
    }
    SUBCASE("ids must match positions") {
        inst.patients[2].id = 7;
        CHECK_FALSE(validate_instance(inst).empty());
    }
    SUBCASE("weights must sum to one") {
        inst.weights = {0.5, 0.5, 0.5};
        CHECK_FALSE(validate_instance(inst).empty());
    }
    SUBCASE("no induction rooms") {
        inst.num_irs = 0;
        CHECK_FALSE(validate_instance(inst).empty());
    }
}

TEST_CASE("weights normalize to a unit sum") {
    CostWeights w = normalize_weights(2, 1, 1);
    CHECK(w.or_idle == doctest::Approx(0.5));
    CHECK(w.ir_idle == doctest::Approx(0.25));
    CHECK(w.waiting == doctest::Approx(0.25));
    CHECK(cost_of(w, 10, 20, 40) == doctest::Approx(5 + 5 + 10));
    CHECK_THROWS_AS(normalize_weights(0, 0, 0), ValidationError);
    CHECK_THROWS_AS(normalize_weights(-1, 1, 1), ValidationError);
}

TEST_CASE("big-M covers the worst scenario workload plus the horizon") {
    Instance inst = make_instance({0, 0}, 1, 1);
    inst.appointment_horizon = 100;
    ScenarioSet set;
    set.scenarios.push_back(fixtures::make_scenario({10, 20}, {30, 40}, {15, 15}, 0.5));
    set.scenarios.push_back(fixtures::make_scenario({12, 18}, {20, 60}, {20, 15}, 0.5));
    // patient 0: max(55, 52) = 55; patient 1: max(75, 93) = 93
    CHECK(worst_case_workload(inst, set) == doctest::Approx(148));
    CHECK(compute_big_m(inst, set) == doctest::Approx(248));
}

TEST_CASE("schedule validation") {
    Instance inst = make_instance({0, 1, 0}, 1, 2);
    CHECK_NOTHROW(require_valid(inst, FirstStageSchedule{{0, 5, 5}, {0, 1, 2}}));
    CHECK_NOTHROW(require_valid(inst, FirstStageSchedule{{0, 5, 5}, {0, 2, 1}}));
    CHECK_THROWS_AS(require_valid(inst, FirstStageSchedule{{0, 5, 3}, {0, 1, 2}}), ValidationError);
    CHECK_THROWS_AS(require_valid(inst, FirstStageSchedule{{0, 5, 5}, {0, 1, 1}}), ValidationError);
    CHECK_THROWS_AS(require_valid(inst, FirstStageSchedule{{0, 5}, {0, 1}}), ValidationError);
    CHECK_THROWS_AS(require_valid(inst, FirstStageSchedule{{-1, 5, 5}, {0, 1, 2}}), ValidationError);
}

TEST_CASE("ordering helpers") {
    CHECK(order_by_appointment({30, 0, 30, 10}) == std::vector<int>{1, 3, 0, 2});
    CHECK(order_positions(FirstStageSchedule{{0, 0, 0}, {2, 0, 1}}) == std::vector<int>{1, 2, 0});
    CHECK(round_half_up(2.5) == 3);
    CHECK(round_half_up(2.4999) == 2);
    CHECK(round_half_up(-0.5) == 0);
}
