#include "doctest.h"
#include "fixtures.hpp"

#include "ppsched/model.hpp"

using namespace ppsched;
using namespace fixtures;

namespace {

double max_tangent(const std::vector<double>& anchors, double a) {
    double best = 0.0;  // h >= 0 is always present
    for (double v : anchors) best = std::max(best, v * v + 2 * v * (a - v));
    return best;
}

ScenarioSet two_scenarios() {
    ScenarioSet set;
    set.scenarios.push_back(make_scenario({10, 20, 15}, {30, 40, 20}, {15, 25, 20}, 0.5));
    set.scenarios.push_back(make_scenario({12, 18, 25}, {50, 20, 30}, {20, 15, 16}, 0.5));
    return set;
}

}  // namespace

TEST_CASE("description bookkeeping") {
    MipDescription mip;
    int x = mip.add_variable("x", VarKind::integer, 0, 10);
    int b = mip.add_variable("b", VarKind::binary, -3, 7);
    CHECK(mip.variables[static_cast<std::size_t>(b)].lower == 0);
    CHECK(mip.variables[static_cast<std::size_t>(b)].upper == 1);
    CHECK_THROWS_AS(mip.add_variable("x", VarKind::continuous, 0, 1), ValidationError);
    mip.add_constraint("c", {{x, 1.0}, {b, 4.0}}, Sense::le, 6.0);
    mip.objective.terms = {{x, -1.0}};
    mip.objective.constant = 2.5;
    CHECK(mip.index_of("b") == b);
    CHECK_FALSE(mip.find("y").has_value());
    CHECK_THROWS_AS(mip.index_of("y"), ValidationError);
    CHECK(mip.objective_value({3, 0}) == doctest::Approx(-0.5));
    CHECK(mip.max_violation({3, 1}) == doctest::Approx(1.0));    // 3 + 4 = 7 > 6
    CHECK(mip.max_violation({2.5, 0}) == doctest::Approx(0.5));  // fractional integer
    CHECK(mip.max_violation({2, 1}) == 0.0);
    CHECK_THROWS_AS(mip.add_constraint("bad", {{9, 1.0}}, Sense::le, 0), ValidationError);
}

TEST_CASE("extensive form size follows the formulation") {
    Instance inst = make_instance({0, 1, 0}, 2, 2);
    ScenarioSet set = two_scenarios();
    MipDescription plain = build_extensive_form(inst, set, false);
    const std::size_t n = 3, K = 2, R = 2, S = 2;
    // u_ij, a_i, then per scenario y_ik, A, W, Y, I_r, F_r, G_k, J
    CHECK(plain.variables.size() == n * (n - 1) + n + S * (n * K + 3 * n + 2 * R + K + 1));
    MipDescription vi = build_extensive_form(inst, set, true);
    // one OR-wait cap per patient and scenario, K-1 IR ordering rows per scenario
    CHECK(vi.constraints.size() == plain.constraints.size() + S * (n + K - 1));
    CHECK(plain.find("u_0_2").has_value());
    CHECK(plain.find("y_1_2_1").has_value());
    CHECK(plain.find("h_0") == std::nullopt);
}

TEST_CASE("evaluated first stage is a feasible point of the extensive form") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 25; ++t) {
        auto c = random_case(rng, 4, 1 + t % 2, 2, 3);
        c.inst.appointment_horizon = 200;
        ModelOptions opt{true, true};
        MipDescription mip = build_extensive_form(c.inst, c.set, opt);
        std::vector<double> x = extensive_form_start(mip, c.inst, c.set, c.sched);
        CHECK(mip.max_violation(x) < 1e-7);
        CHECK(mip.objective_value(x) == doctest::Approx(evaluate_expected(c.inst, c.sched, c.set).cost));
        FirstStageSchedule back = extract_schedule(mip, x, 4);
        CHECK(back.appointments == c.sched.appointments);
        CHECK(evaluate_expected(c.inst, back, c.set).cost ==
              doctest::Approx(evaluate_expected(c.inst, c.sched, c.set).cost));
    }
}

TEST_CASE("subproblem objective adds multipliers and the linearized penalty") {
    Instance inst = make_instance({0, 1, 0}, 2, 2);
    inst.appointment_horizon = 100;
    Scenario sc = two_scenarios().scenarios[0];
    FirstStageSchedule s{{0, 10, 30}, {0, 1, 2}};
    ScenarioSet one;
    one.scenarios.push_back(sc);
    one.scenarios[0].probability = 1.0;

    SspContext ctx;
    ctx.multipliers = {1.0, -2.0, 0.5};
    ctx.consensus = {4.0, 12.0, 25.0};
    ctx.rho = 0.4;
    MipDescription first = build_ssp(inst, sc, ctx, true);
    MipDescription later = build_ssp(inst, sc, ctx, false);
    std::vector<double> x1 = extensive_form_start(first, inst, one, s);
    double scenario_cost = evaluate(inst, s, sc).metrics.cost;
    CHECK(first.objective_value(x1) == doctest::Approx(scenario_cost));

    // Same point in the penalized model with h_i = a_i^2.
    std::vector<double> x2(later.variables.size(), 0.0);
    for (std::size_t j = 0; j < x1.size(); ++j) x2[j] = x1[j];
    double expected = scenario_cost;
    for (int i = 0; i < 3; ++i) {
        double a = s.appointments[static_cast<std::size_t>(i)];
        x2[static_cast<std::size_t>(later.index_of("h_" + std::to_string(i)))] = a * a;
        double mu = ctx.multipliers[static_cast<std::size_t>(i)], hat = ctx.consensus[static_cast<std::size_t>(i)];
        expected += mu * (a - hat) + ctx.rho / 2 * (a - hat) * (a - hat);
    }
    CHECK(later.objective_value(x2) + ssp_dropped_constant(ctx) == doctest::Approx(expected));
    CHECK(ssp_dropped_constant(ctx) == doctest::Approx(0.2 * (16 + 144 + 625)));
}

TEST_CASE("fixings become equality rows") {
    Instance inst = make_instance({0, 1, 0}, 2, 2);
    SspContext ctx;
    ctx.fixed_orders = {{2, 0}};
    ctx.fixed_appointments = {{1, 15}};
    MipDescription mip = build_ssp(inst, two_scenarios().scenarios[0], ctx, true);
    int fixed = 0;
    for (const auto& c : mip.constraints)
        if (c.name == "fixu_2_0" || c.name == "fixa_1") {
            CHECK(c.sense == Sense::eq);
            ++fixed;
        }
    CHECK(fixed == 2);
}

TEST_CASE("tangent cuts under-estimate the square") {
    SspContext ctx;
    add_linearization_cut(ctx, 1, 10);
    add_linearization_cut(ctx, 1, 10);
    add_linearization_cut(ctx, 1, 5);
    REQUIRE(ctx.cuts.size() == 2);
    CHECK(ctx.cuts[1] == std::vector<double>{10, 5});
    CHECK_THROWS_AS(add_linearization_cut(ctx, -1, 3), ValidationError);

    CHECK(max_tangent({10}, 10) == doctest::Approx(100));
    CHECK(max_tangent({5, 10, 20}, 12) == doctest::Approx(140));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0, 500);
    for (int t = 0; t < 10000; ++t) {
        double v = u(rng), a = u(rng);
        CHECK(max_tangent({v}, a) <= a * a + 1e-6 * (1 + a * a));
        CHECK(max_tangent({v}, v) == doctest::Approx(v * v));
    }
}

TEST_CASE("bracket tangents stay inside the horizon") {
    auto off = geometric_bracket(100);
    CHECK(off.front() == 0);
    CHECK(std::count(off.begin(), off.end(), 64.0) == 1);
    CHECK(std::count(off.begin(), off.end(), -64.0) == 1);
    CHECK(std::count(off.begin(), off.end(), 128.0) == 0);

    Instance inst = make_instance({0, 1, 0}, 2, 2);
    inst.appointment_horizon = 100;
    SspContext ctx;
    ctx.multipliers.assign(3, 0.0);
    ctx.consensus = {0, 50, 99.6};
    ctx.bracket_offsets = off;
    add_linearization_cut(ctx, 0, 0);
    MipDescription mip = build_ssp(inst, two_scenarios().scenarios[0], ctx, false);
    for (const auto& c : mip.constraints) {
        if (c.name.rfind("bracket_", 0) != 0) continue;
        // h - 2 v a >= -v^2 with v in [0, 100]
        double v = std::sqrt(-c.rhs);
        CHECK(v >= 0);
        CHECK(v <= 100);
    }
}

TEST_CASE("lp text lists every section") {
    Instance inst = make_instance({0, 0}, 1, 1);
    ScenarioSet set;
    set.scenarios.push_back(make_scenario({10, 20}, {30, 40}, {15, 25}));
    std::string lp = to_lp_string(build_extensive_form(inst, set, true));
    for (const char* s : {"Minimize", "Subject To", "Bounds", "General", "Binary", "End"})
        CHECK(lp.find(s) != std::string::npos);
    CHECK(lp.find("pair_0_1:") != std::string::npos);
}
