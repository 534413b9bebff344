#include "doctest.h"
#include "fixtures.hpp"

#include "ppsched/experiment.hpp"
#include "ppsched/heuristics.hpp"

using namespace ppsched;
using namespace fixtures;

namespace {

std::vector<AcuityClass> three_classes() {
    // mean induction 20 / 10 / 15, variance 4 / 25 / 1
    return {AcuityClass{1, "a", 0.3, {10, 20, 30, 40, 50}, {60}, {20, 2}, {60, 1}},
            AcuityClass{2, "b", 0.3, {10}, {60}, {10, 5}, {60, 1}},
            AcuityClass{3, "c", 0.4, {15}, {60}, {15, 1}, {60, 1}}};
}

Instance three_patients() {
    Instance inst = make_instance({0, 1, 0}, 2, 2);
    for (int i = 0; i < 3; ++i) inst.patients[static_cast<std::size_t>(i)].acuity = i + 1;
    return inst;
}

}  // namespace

TEST_CASE("nearest-rank percentile") {
    std::vector<double> v{50, 10, 40, 20, 30};
    CHECK(nearest_rank_percentile(v, 50) == 30);
    CHECK(nearest_rank_percentile(v, 60) == 30);
    CHECK(nearest_rank_percentile(v, 61) == 40);
    CHECK(nearest_rank_percentile(v, 90) == 50);
    CHECK(nearest_rank_percentile(v, 100) == 50);
    CHECK(nearest_rank_percentile({7}, 1) == 7);
    CHECK_THROWS_AS(nearest_rank_percentile({}, 50), ValidationError);
    CHECK_THROWS_AS(nearest_rank_percentile(v, 0), ValidationError);
}

TEST_CASE("sequencing rules") {
    Instance inst = three_patients();
    auto cls = three_classes();
    CHECK(sequence(inst, cls, SequencingRule::spt) == std::vector<int>{1, 2, 0});
    CHECK(sequence(inst, cls, SequencingRule::lpt) == std::vector<int>{0, 2, 1});
    CHECK(sequence(inst, cls, SequencingRule::var) == std::vector<int>{2, 0, 1});
    inst.patients[2].acuity = 2;  // tie with patient 1 keeps index order
    CHECK(sequence(inst, cls, SequencingRule::spt) == std::vector<int>{1, 2, 0});
    CHECK(parse_rule("lpt") == SequencingRule::lpt);
    CHECK(to_string(SequencingRule::var) == "VAR");
    CHECK_THROWS_AS(parse_rule("EDD"), ValidationError);
}

TEST_CASE("hedged appointments follow estimated IR release") {
    Instance inst = three_patients();
    HedgingTable t;
    t.estimates[1][50] = 10;
    t.estimates[2][50] = 20;
    t.estimates[3][50] = 15;
    auto s = hedged_schedule(inst, {0, 1, 2}, t, 50);
    CHECK(s.appointments == std::vector<int>{0, 0, 10});
    CHECK(s.order == std::vector<int>{0, 1, 2});

    inst.num_irs = 1;
    s = hedged_schedule(inst, {0, 1, 2}, t, 50);
    CHECK(s.appointments == std::vector<int>{0, 10, 30});

    t.estimates[1][50] = 10.2;  // fractional estimates round up
    s = hedged_schedule(inst, {0, 1, 2}, t, 50);
    CHECK(s.appointments == std::vector<int>{0, 11, 31});
    CHECK_THROWS_AS(hedged_schedule(inst, {0, 1, 2}, t, 70), ValidationError);
}

TEST_CASE("estimates come from the induction pools") {
    auto t = percentile_estimates(three_classes());
    CHECK(t.at(1, 50) == 30);
    CHECK(t.at(1, 90) == 50);
    CHECK(t.at(2, 70) == 10);
    CHECK_THROWS_AS(t.at(4, 50), ValidationError);
}

TEST_CASE("all fifteen heuristic variants are evaluated") {
    ExperimentSpec spec;
    spec.patients = 5;
    spec.num_ors = 2;
    spec.scenarios = 5;
    auto g = generate_instance(spec, 3);
    auto all = solve_all_heuristics(g.instance, g.scenarios, g.classes);
    REQUIRE(all.size() == 15);
    CHECK(all.front().method == "SPT-50");
    for (const auto& r : all) {
        CHECK_NOTHROW(require_valid(g.instance, r.schedule));
        CHECK(r.cost() == doctest::Approx(evaluate_expected(g.instance, r.schedule, g.scenarios).cost));
    }
}
