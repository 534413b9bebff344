#include "doctest.h"
#include "fixtures.hpp"

#include "ppsched/model.hpp"
#include "ppsched/solver.hpp"

using namespace ppsched;
using namespace fixtures;

namespace {

// Durations small enough that a 12-minute appointment grid matters.
RandomCase tiny_case(std::mt19937_64& rng, int n, int irs, int ors, int scenarios) {
    RandomCase c = random_case(rng, n, irs, ors, scenarios);
    for (auto& s : c.set.scenarios) {
        for (auto& x : s.induction) x = std::round(x / 4);
        for (auto& x : s.surgery) x = std::round(x / 4);
        for (auto& x : s.turnover) x = std::round(x / 4);
    }
    c.inst.appointment_horizon = 12;
    return c;
}

SolveResult solve_quiet(const MipDescription& mip, double time_limit = 120) {
    SolveOptions o;
    o.time_limit = time_limit;
    return solve(mip, o);
}

}  // namespace

TEST_CASE("small integer program by hand") {
    // min x + y  s.t.  x + 2y >= 4,  3x + y >= 6.  LP optimum 2.8 at (1.6, 1.2);
    // the integer optimum is 3, for example at (2, 1).
    MipDescription mip;
    int x = mip.add_variable("x", VarKind::continuous, 0, 100);
    int y = mip.add_variable("y", VarKind::continuous, 0, 100);
    mip.add_constraint("c1", {{x, 1}, {y, 2}}, Sense::ge, 4);
    mip.add_constraint("c2", {{x, 3}, {y, 1}}, Sense::ge, 6);
    mip.objective.terms = {{x, 1}, {y, 1}};
    mip.objective.constant = 1;
    SolveResult lp = solve_quiet(mip);
    CHECK(lp.status == SolveStatus::optimal);
    CHECK(lp.objective == doctest::Approx(3.8));
    CHECK(lp.values[0] == doctest::Approx(1.6));

    mip.variables[0].kind = VarKind::integer;
    mip.variables[1].kind = VarKind::integer;
    SolveResult ip = solve_quiet(mip);
    CHECK(ip.status == SolveStatus::optimal);
    CHECK(ip.objective == doctest::Approx(4.0));
    CHECK(ip.bound == doctest::Approx(4.0));
    CHECK(mip.max_violation(ip.values) < 1e-9);
    CHECK(ip.assignment(mip).at("y") == doctest::Approx(ip.values[1]));
}

TEST_CASE("infeasible model is reported") {
    MipDescription mip;
    int x = mip.add_variable("x", VarKind::integer, 0, 1);
    mip.add_constraint("c", {{x, 1}}, Sense::ge, 2);
    SolveResult r = solve_quiet(mip);
    CHECK(r.status == SolveStatus::infeasible);
    CHECK_FALSE(r.has_solution());
}

TEST_CASE("unknown backend") {
    CHECK_THROWS_AS(make_backend("cplex"), ValidationError);
    CHECK(backend_names() == std::vector<std::string>{"highs"});
}

TEST_CASE("second-stage MIP at a fixed first stage equals the exact evaluator") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 12; ++t) {
        auto c = random_case(rng, 4, 2, 2, 2);
        c.inst.appointment_horizon = 100;
        MipDescription mip = build_extensive_form(c.inst, c.set, ModelOptions{true, true});
        fix_first_stage(mip, c.sched);
        SolveResult r = solve_quiet(mip);
        REQUIRE(r.status == SolveStatus::optimal);
        CHECK(r.objective == doctest::Approx(evaluate_expected(c.inst, c.sched, c.set).cost).epsilon(1e-9));
    }
}

TEST_CASE("extensive form agrees with brute force on a shared grid") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 4; ++t) {
        auto c = tiny_case(rng, 3, 1 + t % 2, 2, 2);
        BruteForceResult bf = brute_force_exact(c.inst, c.set, 1, 12);
        SolveResult ef = solve_quiet(build_extensive_form(c.inst, c.set, ModelOptions{true, true}));
        REQUIRE(ef.status == SolveStatus::optimal);
        CHECK(ef.objective == doctest::Approx(bf.cost).epsilon(1e-9));
        CHECK(evaluate_expected(c.inst, bf.schedule, c.set).cost == doctest::Approx(bf.cost));
    }
}

TEST_CASE("valid inequalities keep the optimum") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 3; ++t) {
        auto c = tiny_case(rng, 3, 2, 2, 2);
        double with = solve_quiet(build_extensive_form(c.inst, c.set, true)).objective;
        double without = solve_quiet(build_extensive_form(c.inst, c.set, false)).objective;
        double occupy = solve_quiet(build_extensive_form(c.inst, c.set, ModelOptions{true, true})).objective;
        CHECK(with == doctest::Approx(without).epsilon(1e-9));
        CHECK(occupy == doctest::Approx(without).epsilon(1e-9));
    }
}

TEST_CASE("serial extensive form agrees with serial brute force") {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 3; ++t) {
        auto c = tiny_case(rng, 3, 1, 2, 2);
        BruteForceResult bf = brute_force_exact(c.inst, c.set, 1, 12, ProcessingMode::serial);
        MipDescription mip = build_serial_extensive_form(c.inst, c.set);
        SolveResult ef = solve_quiet(mip);
        REQUIRE(ef.status == SolveStatus::optimal);
        CHECK(ef.objective == doctest::Approx(bf.cost).epsilon(1e-9));
        FirstStageSchedule s = extract_schedule(mip, ef.values, 3);
        CHECK(evaluate_expected(c.inst, s, c.set, ProcessingMode::serial).cost == doctest::Approx(bf.cost));
    }
}

TEST_CASE("a MIP start is accepted and never worsens the result") {
    std::mt19937_64 rng(3);
    auto c = random_case(rng, 4, 2, 2, 2);
    c.inst.appointment_horizon = 150;
    MipDescription mip = build_extensive_form(c.inst, c.set, ModelOptions{true, true});
    SolveOptions o;
    o.time_limit = 120;
    o.start = extensive_form_start(mip, c.inst, c.set, c.sched);
    SolveResult r = solve(mip, o);
    REQUIRE(r.has_solution());
    CHECK(r.objective <= mip.objective_value(o.start) + 1e-9);
    o.start.pop_back();
    CHECK_THROWS_AS(solve(mip, o), SolverError);
}

TEST_CASE("brute force guards its size") {
    std::mt19937_64 rng(1);
    auto c = tiny_case(rng, 5, 1, 1, 1);
    CHECK_THROWS_AS(brute_force_exact(c.inst, c.set, 1, 12), SizeGuardError);
    auto d = tiny_case(rng, 3, 1, 1, 1);
    CHECK_THROWS_AS(brute_force_exact(d.inst, d.set, 1, 13), SizeGuardError);
    CHECK_NOTHROW(brute_force_exact(d.inst, d.set, 2, 24));
}
