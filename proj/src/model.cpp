#include "ppsched/model.hpp"
#include "ppsched/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace ppsched {

int MipDescription::add_variable(std::string name, VarKind kind, double lower, double upper) {
    if (index_.count(name)) throw ValidationError("duplicate variable " + name);
    if (kind == VarKind::binary) {
        lower = std::max(lower, 0.0);
        upper = std::min(upper, 1.0);
    }
    int id = static_cast<int>(variables.size());
    index_.emplace(name, id);
    variables.push_back({std::move(name), kind, lower, upper});
    return id;
}

void MipDescription::add_constraint(std::string name, std::vector<std::pair<int, double>> terms,
                                    Sense sense, double rhs) {
    for (auto [j, v] : terms)
        if (j < 0 || static_cast<std::size_t>(j) >= variables.size())
            throw ValidationError("constraint " + name + " references unknown column " + std::to_string(j));
    constraints.push_back({std::move(name), std::move(terms), sense, rhs});
}

int MipDescription::index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ValidationError("unknown variable " + name);
    return it->second;
}

std::optional<int> MipDescription::find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

double MipDescription::objective_value(const std::vector<double>& x) const {
    double v = objective.constant;
    for (auto [j, c] : objective.terms) v += c * x[static_cast<std::size_t>(j)];
    return v;
}

double MipDescription::max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < variables.size(); ++j) {
        const Variable& v = variables[j];
        worst = std::max({worst, v.lower - x[j], x[j] - v.upper});
        if (v.kind != VarKind::continuous) worst = std::max(worst, std::abs(x[j] - std::round(x[j])));
    }
    for (const auto& c : constraints) {
        double lhs = 0.0;
        for (auto [j, a] : c.terms) lhs += a * x[static_cast<std::size_t>(j)];
        double viol = c.sense == Sense::le   ? lhs - c.rhs
                      : c.sense == Sense::ge ? c.rhs - lhs
                                             : std::abs(lhs - c.rhs);
        worst = std::max(worst, viol);
    }
    return worst;
}

std::string u_name(int i, int j) { return "u_" + std::to_string(i) + "_" + std::to_string(j); }
std::string a_name(int i) { return "a_" + std::to_string(i); }

namespace {

using Terms = std::vector<std::pair<int, double>>;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string sv(const char* base, std::size_t w, std::size_t i) {
    return std::string(base) + "_" + std::to_string(w) + "_" + std::to_string(i);
}
std::string sv(const char* base, std::size_t w, std::size_t i, std::size_t k) {
    return sv(base, w, i) + "_" + std::to_string(k);
}

struct Weighted {
    const Scenario* scenario;
    double probability;
};

double big_m_for(const Instance& inst, const std::vector<Weighted>& scen) {
    double work = 0.0;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        double worst = 0.0;
        for (const auto& w : scen)
            worst = std::max(worst, w.scenario->induction[i] + w.scenario->surgery[i] + w.scenario->turnover[i]);
        work += worst;
    }
    return std::max(inst.big_m, work + inst.appointment_horizon);
}

void add_first_stage(MipDescription& mip, const Instance& inst, double M) {
    const int n = static_cast<int>(inst.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) mip.add_variable(u_name(i, j), VarKind::binary, 0.0, 1.0);
    for (int i = 0; i < n; ++i)
        mip.add_variable(a_name(i), VarKind::integer, 0.0, std::floor(inst.appointment_horizon));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            int uij = mip.index_of(u_name(i, j));
            mip.add_constraint("order_" + std::to_string(i) + "_" + std::to_string(j),
                               {{mip.index_of(a_name(j)), 1.0}, {mip.index_of(a_name(i)), -1.0}, {uij, -M}},
                               Sense::ge, -M);
            if (i < j)
                mip.add_constraint("pair_" + std::to_string(i) + "_" + std::to_string(j),
                                   {{uij, 1.0}, {mip.index_of(u_name(j, i)), 1.0}}, Sense::eq, 1.0);
        }
}

// Second-stage block for one scenario; returns objective terms.
void add_second_stage(MipDescription& mip, const Instance& inst, const Scenario& sc, std::size_t w,
                      double prob, double M, const ModelOptions& opt) {
    const std::size_t n = inst.size(), K = static_cast<std::size_t>(inst.num_irs),
                      R = static_cast<std::size_t>(inst.num_ors);
    const CostWeights& cw = inst.weights;
    std::vector<std::vector<int>> y(n, std::vector<int>(K));
    std::vector<int> A(n), W(n), Y(n), F(R), I(R), G(K);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < K; ++k) y[i][k] = mip.add_variable(sv("y", w, i, k), VarKind::binary, 0, 1);
    for (std::size_t i = 0; i < n; ++i) {
        A[i] = mip.add_variable(sv("A", w, i), VarKind::continuous, 0, kInf);
        W[i] = mip.add_variable(sv("W", w, i), VarKind::continuous, 0, kInf);
        Y[i] = mip.add_variable(sv("Y", w, i), VarKind::continuous, 0, kInf);
    }
    for (std::size_t r = 0; r < R; ++r) {
        I[r] = mip.add_variable(sv("I", w, r), VarKind::continuous, 0, kInf);
        F[r] = mip.add_variable(sv("F", w, r), VarKind::continuous, 0, kInf);
    }
    for (std::size_t k = 0; k < K; ++k) G[k] = mip.add_variable(sv("G", w, k), VarKind::continuous, 0, kInf);
    int J = mip.add_variable("J_" + std::to_string(w), VarKind::continuous, 0, kInf);

    auto a = [&](std::size_t i) { return mip.index_of(a_name(static_cast<int>(i))); };
    auto u = [&](std::size_t i, std::size_t j) {
        return mip.index_of(u_name(static_cast<int>(i), static_cast<int>(j)));
    };
    auto or_of = [&](std::size_t i) { return static_cast<std::size_t>(inst.patients[i].or_id); };
    auto dq = [&](std::size_t i) { return sc.surgery[i] + sc.turnover[i]; };
    std::string tag = "_" + std::to_string(w);

    for (std::size_t i = 0; i < n; ++i) {
        Terms t;
        for (std::size_t k = 0; k < K; ++k) t.push_back({y[i][k], 1.0});
        mip.add_constraint(sv("assign", w, i), std::move(t), Sense::eq, 1.0);
        mip.add_constraint(sv("surgery", w, i), {{A[i], 1.0}, {a(i), -1.0}, {Y[i], -1.0}, {W[i], -1.0}},
                           Sense::eq, sc.induction[i]);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            std::string ij = tag + "_" + std::to_string(i) + "_" + std::to_string(j);
            mip.add_constraint("seq" + ij, {{a(j), 1.0}, {Y[j], 1.0}, {a(i), -1.0}, {Y[i], -1.0}, {u(i, j), -M}},
                               Sense::ge, -M);
            for (std::size_t k = 0; k < K; ++k)
                mip.add_constraint("ir" + ij + "_" + std::to_string(k),
                                   {{a(j), 1.0}, {Y[j], 1.0}, {A[i], -1.0}, {u(i, j), -M}, {y[i][k], -M}, {y[j][k], -M}},
                                   Sense::ge, -3.0 * M);
            if (or_of(i) == or_of(j)) {
                mip.add_constraint("orind" + ij, {{a(j), 1.0}, {Y[j], 1.0}, {a(i), -1.0}, {Y[i], -1.0}, {u(i, j), -M}},
                                   Sense::ge, sc.induction[i] - M);
                mip.add_constraint("orsurg" + ij, {{A[j], 1.0}, {A[i], -1.0}, {u(i, j), -M}}, Sense::ge, dq(i) - M);
            }
        }
    std::vector<double> dq_sum(R, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        mip.add_constraint(sv("close", w, i), {{F[or_of(i)], 1.0}, {A[i], -1.0}}, Sense::ge, dq(i));
        dq_sum[or_of(i)] += dq(i);
        for (std::size_t k = 0; k < K; ++k)
            mip.add_constraint(sv("irclose", w, i, k), {{G[k], 1.0}, {A[i], -1.0}, {y[i][k], -M}}, Sense::ge, -M);
    }
    for (std::size_t r = 0; r < R; ++r)
        mip.add_constraint(sv("oridle", w, r), {{I[r], 1.0}, {F[r], -1.0}}, Sense::eq, -dq_sum[r]);
    {
        Terms t{{J, 1.0}};
        for (std::size_t k = 0; k < K; ++k) t.push_back({G[k], -1.0});
        double e_sum = std::accumulate(sc.induction.begin(), sc.induction.end(), 0.0);
        mip.add_constraint("iridle" + tag, std::move(t), Sense::eq, -e_sum);
    }
    if (opt.valid_inequalities) {
        for (std::size_t j = 0; j < n; ++j) {
            Terms t{{W[j], 1.0}};
            for (std::size_t i = 0; i < n; ++i)
                if (i != j && or_of(i) == or_of(j)) t.push_back({u(i, j), -dq(i)});
            mip.add_constraint(sv("wcap", w, j), std::move(t), Sense::le, 0.0);
        }
        for (std::size_t k = 1; k < K; ++k)
            mip.add_constraint(sv("irsym", w, k), {{G[k - 1], 1.0}, {G[k], -1.0}}, Sense::ge, 0.0);
    }
    if (opt.occupancy_cut) {
        Terms t{{J, 1.0}};
        for (std::size_t i = 0; i < n; ++i) t.push_back({W[i], -1.0});
        mip.add_constraint("occupy" + tag, std::move(t), Sense::ge, 0.0);
        if (opt.valid_inequalities)
            for (std::size_t i = 0; i < n; ++i)
                mip.add_constraint(sv("irfirst", w, i), {{G[0], 1.0}, {A[i], -1.0}}, Sense::ge, 0.0);
    }

    auto& obj = mip.objective.terms;
    obj.push_back({J, prob * cw.ir_idle});
    for (std::size_t r = 0; r < R; ++r) obj.push_back({I[r], prob * cw.or_idle});
    for (std::size_t i = 0; i < n; ++i) {
        obj.push_back({W[i], prob * cw.waiting});
        obj.push_back({Y[i], prob * cw.waiting});
    }
}

MipDescription build_parallel(const Instance& inst, const std::vector<Weighted>& scen, const ModelOptions& opt) {
    require_valid(inst);
    MipDescription mip;
    double M = big_m_for(inst, scen);
    add_first_stage(mip, inst, M);
    for (std::size_t w = 0; w < scen.size(); ++w)
        add_second_stage(mip, inst, *scen[w].scenario, w, scen[w].probability, M, opt);
    return mip;
}

std::vector<Weighted> weighted(const ScenarioSet& set) {
    std::vector<Weighted> out;
    for (const Scenario& s : set.scenarios) out.push_back({&s, s.probability});
    return out;
}

}  // namespace

MipDescription build_extensive_form(const Instance& inst, const ScenarioSet& set, const ModelOptions& opt) {
    validate_scenarios(inst, set);
    return build_parallel(inst, weighted(set), opt);
}

MipDescription build_extensive_form(const Instance& inst, const ScenarioSet& set, bool vi) {
    ModelOptions opt;
    opt.valid_inequalities = vi;
    return build_extensive_form(inst, set, opt);
}

MipDescription build_mean_value(const Instance& inst, const Scenario& mean, const ModelOptions& opt) {
    ScenarioSet one;
    one.scenarios.push_back(mean);
    one.scenarios.back().probability = 1.0;
    validate_scenarios(inst, one);
    return build_parallel(inst, {{&mean, 1.0}}, opt);
}

MipDescription build_mean_value(const Instance& inst, const Scenario& mean, bool vi) {
    ModelOptions opt;
    opt.valid_inequalities = vi;
    return build_mean_value(inst, mean, opt);
}

MipDescription build_serial_extensive_form(const Instance& inst, const ScenarioSet& set) {
    require_valid(inst);
    validate_scenarios(inst, set);
    auto scen = weighted(set);
    MipDescription mip;
    double M = big_m_for(inst, scen);
    add_first_stage(mip, inst, M);
    const std::size_t n = inst.size(), R = static_cast<std::size_t>(inst.num_ors);
    auto a = [&](std::size_t i) { return mip.index_of(a_name(static_cast<int>(i))); };
    for (std::size_t w = 0; w < scen.size(); ++w) {
        const Scenario& sc = *scen[w].scenario;
        std::vector<int> W(n), F(R), I(R);
        for (std::size_t i = 0; i < n; ++i) W[i] = mip.add_variable(sv("W", w, i), VarKind::continuous, 0, kInf);
        for (std::size_t r = 0; r < R; ++r) {
            I[r] = mip.add_variable(sv("I", w, r), VarKind::continuous, 0, kInf);
            F[r] = mip.add_variable(sv("F", w, r), VarKind::continuous, 0, kInf);
        }
        std::vector<double> work(n), busy(R, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            work[i] = sc.induction[i] + sc.surgery[i] + sc.turnover[i];
            busy[static_cast<std::size_t>(inst.patients[i].or_id)] += work[i];
        }
        // Start of patient i is a_i + W_i.
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j || inst.patients[i].or_id != inst.patients[j].or_id) continue;
                int uij = mip.index_of(u_name(static_cast<int>(i), static_cast<int>(j)));
                mip.add_constraint("serial_" + std::to_string(w) + "_" + std::to_string(i) + "_" + std::to_string(j),
                                   {{a(j), 1.0}, {W[j], 1.0}, {a(i), -1.0}, {W[i], -1.0}, {uij, -M}}, Sense::ge,
                                   work[i] - M);
            }
        for (std::size_t i = 0; i < n; ++i) {
            auto r = static_cast<std::size_t>(inst.patients[i].or_id);
            mip.add_constraint(sv("close", w, i), {{F[r], 1.0}, {a(i), -1.0}, {W[i], -1.0}}, Sense::ge, work[i]);
        }
        for (std::size_t r = 0; r < R; ++r)
            mip.add_constraint(sv("oridle", w, r), {{I[r], 1.0}, {F[r], -1.0}}, Sense::eq, -busy[r]);
        for (std::size_t r = 0; r < R; ++r) mip.objective.terms.push_back({I[r], scen[w].probability * inst.weights.or_idle});
        for (std::size_t i = 0; i < n; ++i) mip.objective.terms.push_back({W[i], scen[w].probability * inst.weights.waiting});
    }
    return mip;
}

MipDescription build_ssp(const Instance& inst, const Scenario& sc, const SspContext& ctx, bool iteration_one,
                         const ModelOptions& opt) {
    require_valid(inst);
    const std::size_t n = inst.size();
    MipDescription mip = build_parallel(inst, {{&sc, 1.0}}, opt);
    for (auto [i, j] : ctx.fixed_orders)
        mip.add_constraint("fixu_" + std::to_string(i) + "_" + std::to_string(j), {{mip.index_of(u_name(i, j)), 1.0}},
                           Sense::eq, 1.0);
    for (auto [i, v] : ctx.fixed_appointments)
        mip.add_constraint("fixa_" + std::to_string(i), {{mip.index_of(a_name(i)), 1.0}}, Sense::eq, v);
    if (iteration_one) return mip;

    if (ctx.multipliers.size() != n || ctx.consensus.size() != n)
        throw ValidationError("subproblem context does not match instance size");
    for (std::size_t i = 0; i < n; ++i) {
        int ai = mip.index_of(a_name(static_cast<int>(i)));
        int h = mip.add_variable("h_" + std::to_string(i), VarKind::continuous, 0.0, kInf);
        mip.objective.terms.push_back({ai, ctx.multipliers[i] - ctx.rho * ctx.consensus[i]});
        mip.objective.terms.push_back({h, ctx.rho / 2.0});
        mip.objective.constant -= ctx.multipliers[i] * ctx.consensus[i];
        if (i < ctx.cuts.size())
            for (std::size_t c = 0; c < ctx.cuts[i].size(); ++c) {
                double v = ctx.cuts[i][c];
                mip.add_constraint("cut_" + std::to_string(i) + "_" + std::to_string(c), {{h, 1.0}, {ai, -2.0 * v}},
                                   Sense::ge, -v * v);
            }
        std::set<double> seen;
        if (i < ctx.cuts.size()) seen.insert(ctx.cuts[i].begin(), ctx.cuts[i].end());
        const double horizon = std::floor(inst.appointment_horizon);
        for (double off : ctx.bracket_offsets) {
            double v = std::clamp(std::round(ctx.consensus[i]) + off, 0.0, horizon);
            if (!seen.insert(v).second) continue;
            mip.add_constraint("bracket_" + std::to_string(i) + "_" + std::to_string(seen.size()),
                               {{h, 1.0}, {ai, -2.0 * v}}, Sense::ge, -v * v);
        }
    }
    return mip;
}

std::vector<double> geometric_bracket(double horizon) {
    std::vector<double> offsets{0.0};
    for (double d = 1.0; d <= std::max(1.0, horizon); d *= 2.0) {
        offsets.push_back(d);
        offsets.push_back(-d);
    }
    return offsets;
}

void add_linearization_cut(SspContext& ctx, int patient, double anchor) {
    if (patient < 0) throw ValidationError("negative patient index");
    if (ctx.cuts.size() <= static_cast<std::size_t>(patient)) ctx.cuts.resize(static_cast<std::size_t>(patient) + 1);
    auto& pool = ctx.cuts[static_cast<std::size_t>(patient)];
    if (std::find(pool.begin(), pool.end(), anchor) == pool.end()) pool.push_back(anchor);
}

double ssp_dropped_constant(const SspContext& ctx) {
    double s = 0.0;
    for (double v : ctx.consensus) s += v * v;
    return ctx.rho / 2.0 * s;
}

void fix_first_stage(MipDescription& mip, const FirstStageSchedule& sched) {
    const int n = static_cast<int>(sched.appointments.size());
    auto pos = order_positions(sched);
    for (int i = 0; i < n; ++i) {
        auto& a = mip.variables[static_cast<std::size_t>(mip.index_of(a_name(i)))];
        a.lower = a.upper = sched.appointments[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            auto& u = mip.variables[static_cast<std::size_t>(mip.index_of(u_name(i, j)))];
            u.lower = u.upper = pos[static_cast<std::size_t>(i)] < pos[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
        }
    }
}

FirstStageSchedule extract_schedule(const MipDescription& mip, const std::vector<double>& x, std::size_t n) {
    FirstStageSchedule s;
    std::vector<int> preds(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        s.appointments.push_back(static_cast<int>(std::lround(x[static_cast<std::size_t>(mip.index_of(a_name(static_cast<int>(i))))])));
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && x[static_cast<std::size_t>(mip.index_of(u_name(static_cast<int>(j), static_cast<int>(i))))] > 0.5)
                ++preds[i];
    }
    s.order.resize(n);
    std::iota(s.order.begin(), s.order.end(), 0);
    std::stable_sort(s.order.begin(), s.order.end(), [&](int i, int j) {
        auto ii = static_cast<std::size_t>(i), jj = static_cast<std::size_t>(j);
        if (s.appointments[ii] != s.appointments[jj]) return s.appointments[ii] < s.appointments[jj];
        return preds[ii] < preds[jj];
    });
    return s;
}

std::vector<double> extensive_form_start(const MipDescription& mip, const Instance& inst, const ScenarioSet& set,
                                         const FirstStageSchedule& sched) {
    std::vector<double> x(mip.variables.size(), 0.0);
    auto put = [&](const std::string& name, double v) {
        if (auto j = mip.find(name)) x[static_cast<std::size_t>(*j)] = v;
    };
    const std::size_t n = inst.size();
    auto pos = order_positions(sched);
    for (std::size_t i = 0; i < n; ++i) {
        put(a_name(static_cast<int>(i)), sched.appointments[i]);
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) put(u_name(static_cast<int>(i), static_cast<int>(j)), pos[i] < pos[j] ? 1.0 : 0.0);
    }
    for (std::size_t w = 0; w < set.size(); ++w) {
        const Scenario& sc = set.scenarios[w];
        SecondStageOutcome o = evaluate(inst, sched, sc);
        // Relabel IRs so closures are nonincreasing in the index.
        std::vector<int> rank(static_cast<std::size_t>(inst.num_irs));
        std::iota(rank.begin(), rank.end(), 0);
        std::stable_sort(rank.begin(), rank.end(), [&](int p, int q) {
            return o.ir_closure[static_cast<std::size_t>(p)] > o.ir_closure[static_cast<std::size_t>(q)];
        });
        std::vector<std::size_t> label(rank.size());
        for (std::size_t k = 0; k < rank.size(); ++k) label[static_cast<std::size_t>(rank[k])] = k;
        for (std::size_t i = 0; i < n; ++i) {
            put(sv("y", w, i, label[static_cast<std::size_t>(o.ir_assignment[i])]), 1.0);
            put(sv("A", w, i), o.surgery_start[i]);
            put(sv("W", w, i), o.wait_or[i]);
            put(sv("Y", w, i), o.wait_ir[i]);
        }
        for (std::size_t r = 0; r < o.or_closure.size(); ++r) {
            put(sv("F", w, r), o.or_closure[r]);
            put(sv("I", w, r), o.or_idle[r]);
        }
        for (std::size_t k = 0; k < o.ir_closure.size(); ++k) put(sv("G", w, label[k]), o.ir_closure[k]);
        put("J_" + std::to_string(w), o.metrics.ir_idle_total);
    }
    return x;
}

}  // namespace ppsched
