#include "doctest.h"
#include "fixtures.hpp"

#include <map>

using namespace ppsched;
using namespace fixtures;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Cheapest cost over every IR assignment, by plain enumeration.
double enumerated_optimum(const Instance& inst, const FirstStageSchedule& s, const Scenario& sc) {
    const std::size_t n = inst.size();
    std::vector<int> y(n, 0);
    double best = std::numeric_limits<double>::infinity();
    for (;;) {
        best = std::min(best, timeline_for_assignment(inst, s, sc, y).metrics.cost);
        std::size_t k = 0;
        while (k < n && ++y[k] == inst.num_irs) y[k++] = 0;
        if (k == n) return best;
    }
}

}  // namespace

TEST_CASE("worked example with seven patients") {
    WorkedExample f;
    SecondStageOutcome o = evaluate_myopic(f.inst, f.sched, f.sc);
    CHECK(sum(o.wait_ir) == doctest::Approx(22));
    CHECK(sum(o.wait_or) == doctest::Approx(48));
    CHECK(o.or_closure == std::vector<double>{142, 175, 234});
    CHECK(o.or_idle == std::vector<double>{34, 35, 29});
    CHECK(o.ir_closure == std::vector<double>{59, 142});
    // Closure minus induction work: 59 - (10 + 18 + 16) and 142 - (34 + 22 + 19 + 22).
    CHECK(o.ir_idle == std::vector<double>{15, 45});
    CHECK(o.metrics.cost == doctest::Approx(0.5 * 98 + 0.25 * 60 + 0.25 * 70));

    // The exact search cannot do worse than the first-available rule.
    CHECK(evaluate(f.inst, f.sched, f.sc).metrics.cost <= o.metrics.cost + 1e-9);
}

TEST_CASE("one IR and one OR by hand") {
    Instance inst = make_instance({0, 0}, 1, 1);
    Scenario sc = make_scenario({10, 5}, {20, 10}, {15, 15});
    FirstStageSchedule s{{0, 10}, {0, 1}};

    SecondStageOutcome p = evaluate(inst, s, sc);
    CHECK(p.induction_start == std::vector<double>{0, 10});
    CHECK(p.surgery_start == std::vector<double>{10, 45});
    CHECK(p.wait_or == std::vector<double>{0, 30});
    CHECK(p.or_idle == std::vector<double>{10});
    CHECK(p.ir_idle == std::vector<double>{30});
    CHECK(p.metrics.cost == doctest::Approx(20.0));

    SecondStageOutcome q = evaluate_serial(inst, s, sc);
    CHECK(q.ir_assignment.empty());
    CHECK(q.surgery_start == std::vector<double>{10, 50});
    CHECK(q.wait_or == std::vector<double>{0, 35});
    CHECK(q.or_closure == std::vector<double>{75});
    CHECK(q.or_idle == std::vector<double>{0});
    CHECK(q.metrics.cost == doctest::Approx(0.25 * 35));
}

TEST_CASE("first-available is not always optimal") {
    // The spare IR is grabbed by patient 3, who then holds it until OR 1
    // frees at 130. Waiting for patient 2's IR gives the same total wait
    // with 40 fewer minutes of IR idle time.
    Instance inst = make_instance({0, 1, 0}, 2, 2);
    Scenario sc = make_scenario({10, 50, 10}, {100, 30, 30}, {20, 20, 20});
    FirstStageSchedule s{{0, 0, 20}, {0, 1, 2}};

    SecondStageOutcome m = evaluate_myopic(inst, s, sc);
    SecondStageOutcome e = evaluate(inst, s, sc);
    CHECK(sum(m.wait_ir) + sum(m.wait_or) == doctest::Approx(100));
    CHECK(sum(e.wait_ir) + sum(e.wait_or) == doctest::Approx(100));
    CHECK(m.metrics.ir_idle_total == doctest::Approx(110));
    CHECK(e.metrics.ir_idle_total == doctest::Approx(70));
    CHECK(m.metrics.cost == doctest::Approx(82.5));
    CHECK(e.metrics.cost == doctest::Approx(72.5));
    CHECK_FALSE(check_assignment_optimality(inst, s, sc, m));
    CHECK(check_assignment_optimality(inst, s, sc, e));
}

TEST_CASE("exact second stage matches enumeration on random cases") {
    std::mt19937_64 rng(11);
    int strictly_worse = 0;
    for (int t = 0; t < 150; ++t) {
        int n = 2 + t % 5, K = 1 + t % 3, R = 1 + t % 2;
        auto c = random_case(rng, n, K, R, 1);
        const Scenario& sc = c.set.scenarios[0];
        SecondStageOutcome e = evaluate(c.inst, c.sched, sc);
        double oracle = enumerated_optimum(c.inst, c.sched, sc);
        REQUIRE(e.metrics.cost == doctest::Approx(oracle).epsilon(1e-12));
        double my = evaluate_myopic(c.inst, c.sched, sc).metrics.cost;
        CHECK(my >= e.metrics.cost - 1e-9);
        if (K == 1) CHECK(my == doctest::Approx(e.metrics.cost));
        if (my > e.metrics.cost + 1e-9) ++strictly_worse;
    }
    CHECK(strictly_worse > 0);
}

TEST_CASE("timeline invariants hold for every assignment") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 60; ++t) {
        auto c = random_case(rng, 5, 2, 2, 1);
        const Scenario& sc = c.set.scenarios[0];
        std::vector<int> y(5);
        for (int& k : y) k = static_cast<int>(rng() % 2);
        SecondStageOutcome o = timeline_for_assignment(c.inst, c.sched, sc, y);
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(o.induction_start[i] >= c.sched.appointments[i] - 1e-9);
            CHECK(o.surgery_start[i] >= o.induction_start[i] + sc.induction[i] - 1e-9);
            CHECK(o.wait_or[i] == doctest::Approx(o.surgery_start[i] - o.induction_start[i] - sc.induction[i]));
            CHECK(o.wait_ir[i] == doctest::Approx(o.induction_start[i] - c.sched.appointments[i]));
        }
        for (std::size_t k = 1; k < c.sched.order.size(); ++k) {
            auto i = static_cast<std::size_t>(c.sched.order[k - 1]), j = static_cast<std::size_t>(c.sched.order[k]);
            CHECK(o.induction_start[j] >= o.induction_start[i] - 1e-9);
        }
        auto pos = order_positions(c.sched);
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 5; ++j) {
                if (pos[i] >= pos[j]) continue;
                if (y[i] == y[j]) CHECK(o.induction_start[j] >= o.surgery_start[i] - 1e-9);
                if (c.inst.patients[i].or_id == c.inst.patients[j].or_id)
                    CHECK(o.surgery_start[j] >= o.surgery_start[i] + sc.surgery[i] + sc.turnover[i] - 1e-9);
            }
    }
}

TEST_CASE("relabelling the IRs leaves the timeline unchanged") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 40; ++t) {
        auto c = random_case(rng, 5, 2, 3, 1);
        const Scenario& sc = c.set.scenarios[0];
        std::vector<int> y(5), swapped(5);
        for (std::size_t i = 0; i < 5; ++i) {
            y[i] = static_cast<int>(rng() % 2);
            swapped[i] = 1 - y[i];
        }
        auto a = timeline_for_assignment(c.inst, c.sched, sc, y);
        auto b = timeline_for_assignment(c.inst, c.sched, sc, swapped);
        CHECK(a.metrics.cost == doctest::Approx(b.metrics.cost));
        CHECK(a.surgery_start == b.surgery_start);
        CHECK(a.ir_closure[0] == b.ir_closure[1]);
    }
}

TEST_CASE("serial OR closure is bounded by parallel closure minus IR waits") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 80; ++t) {
        auto c = random_case(rng, 5, 1 + t % 3, 2, 1);
        const Scenario& sc = c.set.scenarios[0];
        auto par = evaluate(c.inst, c.sched, sc);
        auto ser = evaluate_serial(c.inst, c.sched, sc);
        std::vector<double> y_sum(2, 0.0);
        for (std::size_t i = 0; i < 5; ++i) y_sum[static_cast<std::size_t>(c.inst.patients[i].or_id)] += par.wait_ir[i];
        for (std::size_t r = 0; r < 2; ++r) CHECK(ser.or_closure[r] >= par.or_closure[r] - y_sum[r] - 1e-9);
    }
}

TEST_CASE("expected metrics weight scenarios by probability") {
    Instance inst = make_instance({0, 0}, 1, 1);
    ScenarioSet set;
    set.scenarios.push_back(make_scenario({10, 5}, {20, 10}, {15, 15}, 0.25));
    set.scenarios.push_back(make_scenario({10, 5}, {40, 10}, {15, 15}, 0.75));
    FirstStageSchedule s{{0, 10}, {0, 1}};
    double c0 = evaluate(inst, s, set.scenarios[0]).metrics.cost;
    double c1 = evaluate(inst, s, set.scenarios[1]).metrics.cost;
    Metrics m = evaluate_expected(inst, s, set);
    CHECK(m.cost == doctest::Approx(0.25 * c0 + 0.75 * c1));
    // Second scenario: surgery 1 ends at 50, turnover to 65, so OR closes at 90.
    CHECK(m.or_closures[0] == doctest::Approx(0.25 * 70 + 0.75 * 90));
}

TEST_CASE("assignment check refuses large inputs") {
    std::mt19937_64 rng(1);
    auto c = random_case(rng, 7, 2, 2, 1);
    auto o = evaluate(c.inst, c.sched, c.set.scenarios[0]);
    CHECK_THROWS_AS(check_assignment_optimality(c.inst, c.sched, c.set.scenarios[0], o), SizeGuardError);
}

TEST_CASE("evaluation rejects mismatched inputs") {
    WorkedExample f;
    Scenario bad = f.sc;
    bad.surgery.pop_back();
    CHECK_THROWS_AS(evaluate(f.inst, f.sched, bad), ValidationError);
    FirstStageSchedule unordered = f.sched;
    unordered.order = {0, 1, 2, 3, 4, 5, 6};
    CHECK_THROWS_AS(evaluate(f.inst, unordered, f.sc), ValidationError);
}
