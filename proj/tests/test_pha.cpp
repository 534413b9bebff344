#include "doctest.h"
#include "fixtures.hpp"

#include "ppsched/pha.hpp"
#include "ppsched/solver.hpp"

using namespace ppsched;
using namespace fixtures;

namespace {

ScenarioDecision decision(std::vector<int> a, const std::vector<std::pair<int, int>>& before) {
    ScenarioDecision d;
    d.precedes.assign(a.size(), std::vector<char>(a.size(), 0));
    for (auto [i, j] : before) d.precedes[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
    d.appointments = std::move(a);
    return d;
}

}  // namespace

TEST_CASE("threshold schedule") {
    PhaConfig c;
    CHECK(fixing_threshold(1, c) == 100);
    CHECK(fixing_threshold(c.limit_2, c) == doctest::Approx(80));
    CHECK(fixing_threshold(26, c) == doctest::Approx(100 - 20.0 * 25 / 49));
    CHECK(fixing_threshold(c.limit_3, c) == 80);
    CHECK(fixing_threshold(c.limit_3 + 1, c) == 70);
    CHECK(fixing_threshold(c.limit_4, c) == 70);
    CHECK(fixing_threshold(c.limit_4 + 1, c) == 60);
    CHECK(fixing_threshold(5000, c) == 60);
}

TEST_CASE("rho caps follow the limits") {
    PhaConfig c;
    CHECK(rho_upper(1, c) == c.rho_u1);
    CHECK(rho_upper(c.limit_1, c) == c.rho_u1);
    CHECK(rho_upper(c.limit_1 + 1, c) == c.rho_u2);
    CHECK(rho_upper(c.limit_5, c) == c.rho_u2);
    CHECK(rho_upper(c.limit_5 + 1, c) == c.rho_u3);
}

TEST_CASE("penalty update branches") {
    PhaConfig c;  // alpha 1.1, cap 0.2 up to limit_1
    auto s = penalty_update(2, 0.1, 5, 3, 1, 2, c);
    CHECK(s.branch == PenaltyBranch::increase);
    CHECK(s.rho == doctest::Approx(0.11));
    s = penalty_update(2, 0.19, 5, 3, 1, 2, c);
    CHECK(s.rho == doctest::Approx(0.2));  // increase stops at the cap
    s = penalty_update(2, 0.2, 5, 3, 1, 2, c);
    CHECK(s.branch == PenaltyBranch::cap);
    s = penalty_update(2, 0.11, 3, 5, 4, 2, c);
    CHECK(s.branch == PenaltyBranch::decrease);
    CHECK(s.rho == doctest::Approx(0.1));
    s = penalty_update(2, 0.11, 3, 5, 1, 2, c);
    CHECK(s.branch == PenaltyBranch::keep);
    CHECK(s.rho == 0.11);
    s = penalty_update(2, 0.9, 3, 5, 1, 2, c);
    CHECK(s.branch == PenaltyBranch::clamp);
    CHECK(s.rho == 0.2);

    c.literal_reciprocal = true;
    s = penalty_update(30, 0.5, 3, 5, 4, 2, c);
    CHECK(s.rho == doctest::Approx(1.0));  // 1/0.55 exceeds the cap of 1
    s = penalty_update(95, 2.0, 3, 5, 4, 2, c);
    CHECK(s.rho == doctest::Approx(1.0 / 2.2));
}

TEST_CASE("consensus and deviation measures") {
    std::vector<std::vector<int>> a{{0, 10}, {20, 30}};
    auto hat = update_consensus(a, {0.25, 0.75});
    CHECK(hat == std::vector<double>{15, 25});
    CHECK(delta_d(a, hat) == doctest::Approx(225 + 225 + 25 + 25));
    CHECK(delta_p(hat, {14, 27}) == doctest::Approx(1 + 4));
    CHECK_THROWS_AS(update_consensus(a, {1.0}), ValidationError);
}

TEST_CASE("variable fixing by share") {
    FixingLedger ledger;
    std::vector<ScenarioDecision> d{decision({0, 10, 30}, {{0, 1}, {1, 2}, {0, 2}}),
                                    decision({0, 10, 25}, {{0, 1}, {1, 2}, {0, 2}}),
                                    decision({0, 15, 25}, {{1, 0}, {1, 2}, {0, 2}}),
                                    decision({0, 10, 25}, {{0, 1}, {2, 1}, {0, 2}})};
    std::vector<double> p(4, 0.25);
    auto r = variable_fixing(ledger, d, p, 100.0, 0.8);
    // (0,2) is unanimous; (0,1) and (1,2) reach only 75%
    CHECK(r.new_orders == 1);
    CHECK(ledger.orders.count({0, 2}));
    CHECK(r.new_appointments == 1);
    CHECK(ledger.appointments.at(0) == 0);

    r = variable_fixing(ledger, d, p, 75.0, 0.75);
    CHECK(ledger.orders.count({0, 1}));
    CHECK(ledger.orders.count({1, 2}));
    CHECK(ledger.appointments.at(1) == 10);
    CHECK(ledger.appointments.at(2) == 25);
    CHECK(ledger.implies(0, 2));
    CHECK_FALSE(ledger.implies(2, 0));
}

TEST_CASE("order fixes never contradict earlier ones") {
    FixingLedger ledger;
    ledger.orders.insert({0, 1});
    ledger.orders.insert({1, 2});
    std::vector<ScenarioDecision> d{decision({0, 0, 0}, {{2, 0}})};
    variable_fixing(ledger, d, {1.0}, 101.0, 0.8);
    CHECK_FALSE(ledger.orders.count({2, 0}));
    CHECK_FALSE(ledger.diagnostics.empty());
}

TEST_CASE("cycle detector and stall rule") {
    CycleDetector cd;
    CHECK_FALSE(cd.observe(0, {1.0, -1.0}));
    CHECK_FALSE(cd.observe(1, {1.0, -1.0}));
    CHECK(cd.observe(0, {1.0, -1.0}));
    CHECK_FALSE(cd.observe(0, {1.0, -0.5}));

    PhaConfig c;
    c.limit_5 = 10;
    c.controliter = 5;
    std::vector<int> unfixed(20, 3);
    CHECK(stall_due(15, unfixed, c));
    CHECK_FALSE(stall_due(14, unfixed, c));
    CHECK_FALSE(stall_due(10, unfixed, c));
    unfixed[14] = 2;
    CHECK_FALSE(stall_due(15, unfixed, c));
    unfixed.assign(20, 0);
    CHECK_FALSE(stall_due(15, unfixed, c));
}

TEST_CASE("invalid configurations are rejected") {
    PhaConfig c;
    c.limit_3 = c.limit_2;
    CHECK_THROWS_AS(validate(c), ValidationError);
    c = PhaConfig{};
    c.alpha = 1.0;
    CHECK_THROWS_AS(validate(c), ValidationError);
    c = PhaConfig{};
    c.fix_share = 0.5;
    CHECK_THROWS_AS(validate(c), ValidationError);
    CHECK_NOTHROW(validate(PhaConfig{}));
}

TEST_CASE("a single scenario stops at the first iteration with the deterministic optimum") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 3; ++t) {
        auto c = random_case(rng, 3, 2, 2, 1);
        c.inst.appointment_horizon = 120;
        PhaResult r = run_epha(c.inst, c.set, PhaConfig{});
        CHECK(r.converged);
        CHECK(r.iterations == 1);
        SolveResult ef = solve(build_extensive_form(c.inst, c.set, ModelOptions{true, true}), SolveOptions{});
        CHECK(r.metrics.cost == doctest::Approx(ef.objective).epsilon(1e-6));
    }
}

TEST_CASE("multi-scenario runs terminate with a nonanticipative schedule") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 3; ++t) {
        auto c = random_case(rng, 3, 2, 2, 3);
        c.inst.appointment_horizon = 120;
        PhaConfig cfg;
        std::vector<IterationRecord> seen;
        PhaResult r = run_epha(c.inst, c.set, cfg, [&](const IterationRecord& rec) { seen.push_back(rec); });
        CHECK(r.converged);
        CHECK(seen.size() == r.trace.size());
        CHECK(r.trace.back().delta_d <= 1e-12);
        for (const auto& rec : r.trace) {
            CHECK(rec.rho <= rho_upper(rec.z, cfg) + 1e-12);
            CHECK(rec.threshold == doctest::Approx(fixing_threshold(rec.z, cfg)));
        }
        CHECK_NOTHROW(require_valid(c.inst, r.schedule));
        CHECK(r.metrics.cost == doctest::Approx(evaluate_expected(c.inst, r.schedule, c.set).cost));
        CHECK(to_json_line(r.trace.front()).find("\"z\":1") != std::string::npos);
    }
}
