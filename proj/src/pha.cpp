#include "ppsched/pha.hpp"
#include "ppsched/simulate.hpp"
#include "ppsched/solver.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

namespace ppsched {

void validate(const PhaConfig& c) {
    if (!(c.limit_1 < c.limit_2 && c.limit_2 < c.limit_3 && c.limit_3 < c.limit_4 && c.limit_4 < c.limit_5))
        throw ValidationError("limits must satisfy limit_1 < limit_2 < limit_3 < limit_4 < limit_5");
    if (c.limit_1 < 1 || c.limit_2 < 2) throw ValidationError("limit_1 must be >= 1 and limit_2 >= 2");
    if (!(c.fix_share > 0.5 && c.fix_share <= 1.0)) throw ValidationError("fix_share must lie in (0.5, 1]");
    if (!(c.alpha > 1.0)) throw ValidationError("alpha must exceed 1");
    if (!(c.rho0 >= 0.0)) throw ValidationError("rho0 must be non-negative");
    if (!(c.rho_u1 < c.rho_u2 && c.rho_u2 < c.rho_u3)) throw ValidationError("rho upper limits must increase");
    if (c.controliter < 1) throw ValidationError("controliter must be positive");
    if (c.max_iterations < 1) throw ValidationError("max_iterations must be positive");
    if (c.threads < 1) throw ValidationError("threads must be positive");
}

double rho_upper(int z, const PhaConfig& c) {
    if (z <= c.limit_1) return c.rho_u1;
    if (z <= c.limit_5) return c.rho_u2;
    return c.rho_u3;
}

double fixing_threshold(int z, const PhaConfig& c) {
    if (z <= c.limit_2) return 100.0 - 20.0 * static_cast<double>(z - 1) / static_cast<double>(c.limit_2 - 1);
    if (z <= c.limit_3) return 80.0;
    if (z <= c.limit_4) return 70.0;
    return 60.0;
}

std::string to_string(PenaltyBranch b) {
    switch (b) {
        case PenaltyBranch::increase: return "increase";
        case PenaltyBranch::cap: return "cap";
        case PenaltyBranch::decrease: return "decrease";
        case PenaltyBranch::clamp: return "clamp";
        case PenaltyBranch::keep: return "keep";
    }
    return "keep";
}

PenaltyStep penalty_update(int z, double rho, double dd, double dd_prev, double dp, double dp_prev,
                           const PhaConfig& c) {
    const double cap = rho_upper(z, c);
    if (dd - dd_prev > 0 && rho < cap) return {std::min(c.alpha * rho, cap), PenaltyBranch::increase};
    if (dd - dd_prev > 0) return {cap, PenaltyBranch::cap};
    if (dp - dp_prev > 0) {
        double next = c.literal_reciprocal ? (rho > 0 ? 1.0 / (c.alpha * rho) : cap) : rho / c.alpha;
        return {std::min(next, cap), PenaltyBranch::decrease};
    }
    if (rho > cap) return {cap, PenaltyBranch::clamp};
    return {rho, PenaltyBranch::keep};
}

std::vector<double> update_consensus(const std::vector<std::vector<int>>& a, const std::vector<double>& p) {
    if (a.size() != p.size() || a.empty()) throw ValidationError("one appointment vector per scenario is required");
    std::vector<double> hat(a.front().size(), 0.0);
    for (std::size_t w = 0; w < a.size(); ++w)
        for (std::size_t i = 0; i < hat.size(); ++i) hat[i] += p[w] * a[w][i];
    return hat;
}

double delta_d(const std::vector<std::vector<int>>& a, const std::vector<double>& hat) {
    double s = 0.0;
    for (const auto& aw : a)
        for (std::size_t i = 0; i < hat.size(); ++i) s += (aw[i] - hat[i]) * (aw[i] - hat[i]);
    return s;
}

double delta_p(const std::vector<double>& hat, const std::vector<double>& prev) {
    double s = 0.0;
    for (std::size_t i = 0; i < hat.size(); ++i) s += (hat[i] - prev[i]) * (hat[i] - prev[i]);
    return s;
}

bool FixingLedger::implies(int i, int j) const {
    std::vector<int> stack{i};
    std::set<int> seen{i};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (auto it = orders.lower_bound({v, std::numeric_limits<int>::min()}); it != orders.end() && it->first == v; ++it) {
            if (it->second == j) return true;
            if (seen.insert(it->second).second) stack.push_back(it->second);
        }
    }
    return false;
}

FixingResult variable_fixing(FixingLedger& ledger, const std::vector<ScenarioDecision>& decisions,
                             const std::vector<double>& probs, double threshold, double fix_share) {
    FixingResult res;
    if (decisions.empty()) return res;
    const int n = static_cast<int>(decisions.front().appointments.size());
    const double eps = 1e-12;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j || ledger.order_fixed(i, j)) continue;
            double share = 0.0;
            for (std::size_t w = 0; w < decisions.size(); ++w)
                if (decisions[w].precedes[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) share += probs[w];
            if (share < fix_share - eps) continue;
            auto ai = ledger.appointments.find(i), aj = ledger.appointments.find(j);
            if (ledger.implies(j, i) ||
                (ai != ledger.appointments.end() && aj != ledger.appointments.end() && ai->second > aj->second)) {
                ledger.diagnostics.push_back("skipped order fix " + std::to_string(i) + " before " + std::to_string(j) +
                                             ": conflicts with existing fixes");
                continue;
            }
            ledger.orders.insert({i, j});
            ++res.new_orders;
        }
    for (int i = 0; i < n; ++i) {
        if (ledger.appointments.count(i)) continue;
        std::map<int, double> share;
        for (std::size_t w = 0; w < decisions.size(); ++w)
            share[decisions[w].appointments[static_cast<std::size_t>(i)]] += probs[w];
        for (auto [value, s] : share) {
            if (100.0 * s < threshold - 1e-9) continue;
            bool ok = true;
            for (auto [pi, pj] : ledger.orders) {
                if (pi == i && ledger.appointments.count(pj) && value > ledger.appointments.at(pj)) ok = false;
                if (pj == i && ledger.appointments.count(pi) && value < ledger.appointments.at(pi)) ok = false;
            }
            if (!ok) {
                ledger.diagnostics.push_back("skipped appointment fix for patient " + std::to_string(i));
                break;
            }
            ledger.appointments[i] = value;
            ++res.new_appointments;
            break;
        }
    }
    return res;
}

bool CycleDetector::observe(int patient, const std::vector<double>& mu) {
    std::vector<long long> key;
    key.reserve(mu.size());
    for (double m : mu) key.push_back(std::llround(m / quantum_));
    return !seen_[patient].insert(std::move(key)).second;
}

bool stall_due(int z, const std::vector<int>& unfixed, const PhaConfig& c) {
    if (z <= c.limit_5 || (z - c.limit_5) % c.controliter != 0) return false;
    // unfixed[k] holds the count after iteration k + 1.
    auto now = static_cast<std::size_t>(z - 1);
    auto then = static_cast<std::size_t>(z - 1 - c.controliter);
    if (now >= unfixed.size() || z - 1 - c.controliter < 0) return false;
    return unfixed[now] > 0 && unfixed[now] == unfixed[then];
}

std::string to_json_line(const IterationRecord& r) {
    nlohmann::ordered_json j;
    j["z"] = r.z;
    j["rho"] = r.rho;
    j["rho_upper"] = r.rho_upper;
    j["delta_d"] = r.delta_d;
    j["delta_p"] = r.delta_p < 0 ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.delta_p);
    j["threshold"] = r.threshold;
    j["consensus"] = r.consensus;
    j["fixed_orders"] = r.fixed_orders;
    j["fixed_appointments"] = r.fixed_appointments;
    j["scenario_objectives"] = r.scenario_objectives;
    j["lagrangian"] = r.lagrangian;
    j["penalty_branch"] = r.penalty_branch;
    j["cycle_fixed"] = r.cycle_fixed;
    j["stall_fired"] = r.stall_fired;
    return j.dump();
}

namespace {

struct SspSolution {
    std::vector<double> x;
    double objective = 0.0;
    ScenarioDecision decision;
};

SspSolution solve_ssp(const Instance& inst, const Scenario& sc, const SspContext& ctx, bool first,
                      const std::vector<double>& previous, const PhaConfig& cfg, int z, std::size_t w) {
    MipDescription mip = build_ssp(inst, sc, ctx, first, cfg.model);
    SolveOptions opt;
    opt.time_limit = cfg.ssp_time_limit;
    opt.rel_gap = cfg.ssp_gap;
    opt.threads = 1;
    if (!previous.empty()) {
        opt.start.assign(mip.variables.size(), 0.0);
        std::copy_n(previous.begin(), std::min(previous.size(), opt.start.size()), opt.start.begin());
        for (std::size_t i = 0; i < inst.size(); ++i)
            if (auto h = mip.find("h_" + std::to_string(i))) {
                double a = opt.start[static_cast<std::size_t>(mip.index_of(a_name(static_cast<int>(i))))];
                opt.start[static_cast<std::size_t>(*h)] = a * a;
            }
    }
    SolveResult r = solve(mip, opt, cfg.backend);
    if (!r.has_solution())
        throw SolverError("subproblem for scenario " + std::to_string(w) + " at iteration " + std::to_string(z) +
                          " ended " + to_string(r.status));
    SspSolution out;
    out.objective = r.objective;
    const std::size_t n = inst.size();
    out.decision.appointments.resize(n);
    out.decision.precedes.assign(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        out.decision.appointments[i] =
            static_cast<int>(std::lround(r.values[static_cast<std::size_t>(mip.index_of(a_name(static_cast<int>(i))))]));
        for (std::size_t j = 0; j < n; ++j)
            if (i != j)
                out.decision.precedes[i][j] =
                    r.values[static_cast<std::size_t>(mip.index_of(u_name(static_cast<int>(i), static_cast<int>(j))))] > 0.5;
    }
    out.x = std::move(r.values);
    return out;
}

// Orders patients by appointment; ties follow fixed orders, then the
// scenario-weighted count of pairwise wins, then index.
std::vector<int> consensus_order(const std::vector<int>& appt, const std::vector<ScenarioDecision>& dec,
                                 const std::vector<double>& probs, const FixingLedger& ledger) {
    const std::size_t n = appt.size();
    std::vector<int> base = order_by_appointment(appt);
    std::vector<int> order;
    for (std::size_t s = 0; s < n;) {
        std::size_t e = s;
        while (e < n && appt[static_cast<std::size_t>(base[e])] == appt[static_cast<std::size_t>(base[s])]) ++e;
        std::vector<int> group(base.begin() + static_cast<long>(s), base.begin() + static_cast<long>(e));
        std::map<int, double> score;
        for (int i : group)
            for (int j : group)
                if (i != j)
                    for (std::size_t w = 0; w < dec.size(); ++w)
                        if (dec[w].precedes[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) score[i] += probs[w];
        while (!group.empty()) {
            int pick = -1;
            for (int c : group) {
                bool blocked = std::any_of(group.begin(), group.end(), [&](int o) { return o != c && ledger.implies(o, c); });
                if (blocked) continue;
                if (pick < 0 || score[c] > score[pick] + 1e-12 || (std::abs(score[c] - score[pick]) <= 1e-12 && c < pick))
                    pick = c;
            }
            if (pick < 0) pick = group.front();
            order.push_back(pick);
            group.erase(std::find(group.begin(), group.end(), pick));
        }
        s = e;
    }
    return order;
}

}  // namespace

PhaResult run_epha(const Instance& inst, const ScenarioSet& set, const PhaConfig& cfg, const TraceSink& sink) {
    validate(cfg);
    require_valid(inst);
    validate_scenarios(inst, set);
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

    const std::size_t n = inst.size(), S = set.size();
    std::vector<double> probs;
    for (const auto& s : set.scenarios) probs.push_back(s.probability);

    std::vector<SspContext> ctx(S);
    for (auto& c : ctx) {
        c.multipliers.assign(n, 0.0);
        c.consensus.assign(n, 0.0);
        c.cuts.assign(n, {});
        c.rho = cfg.rho0;
        if (cfg.consensus_bracket) c.bracket_offsets = geometric_bracket(inst.appointment_horizon);
    }
    std::vector<std::vector<double>> previous(S);
    std::vector<ScenarioDecision> decisions(S);
    std::vector<double> objectives(S, 0.0);
    FixingLedger ledger;
    CycleDetector cycles;
    std::vector<int> unfixed_history;
    double rho = cfg.rho0;
    double dd_prev = 0.0, dp_prev = 0.0;
    std::vector<double> hat_prev;

    PhaResult result;
    std::vector<double> hat(n, 0.0);
    int z = 1;
    for (;; ++z) {
        for (auto& c : ctx) {
            c.rho = rho;
            c.fixed_orders.assign(ledger.orders.begin(), ledger.orders.end());
            c.fixed_appointments = ledger.appointments;
        }
        std::vector<std::size_t> todo(S);
        std::iota(todo.begin(), todo.end(), 0);
        if (cfg.shuffle_solve_order) {
            std::mt19937_64 rng(cfg.shuffle_seed + static_cast<std::uint64_t>(z));
            std::shuffle(todo.begin(), todo.end(), rng);
        }
        std::vector<SspSolution> sol(S);
        std::vector<std::exception_ptr> errors(S);
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t k; (k = next.fetch_add(1)) < S;) {
                std::size_t w = todo[k];
                try {
                    sol[w] = solve_ssp(inst, set.scenarios[w], ctx[w], z == 1, previous[w], cfg, z, w);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            }
        };
        const int nthreads = std::min<int>(cfg.threads, static_cast<int>(S));
        if (nthreads <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);

        std::vector<std::vector<int>> a(S);
        double lagrangian = 0.0;
        for (std::size_t w = 0; w < S; ++w) {
            decisions[w] = std::move(sol[w].decision);
            a[w] = decisions[w].appointments;
            objectives[w] = sol[w].objective;
            previous[w] = std::move(sol[w].x);
            lagrangian += probs[w] * (objectives[w] + (z == 1 ? 0.0 : ssp_dropped_constant(ctx[w])));
        }
        hat = update_consensus(a, probs);
        IterationRecord rec;
        rec.z = z;
        rec.rho = rho;
        rec.rho_upper = rho_upper(z, cfg);
        rec.delta_d = delta_d(a, hat);
        rec.delta_p = hat_prev.empty() ? -1.0 : delta_p(hat, hat_prev);
        rec.threshold = fixing_threshold(z, cfg);
        rec.consensus = hat;
        rec.scenario_objectives = objectives;
        rec.lagrangian = lagrangian;

        const bool agreed = rec.delta_d <= 1e-12;
        const bool out_of_time = (cfg.time_limit > 0 && elapsed() >= cfg.time_limit) || z >= cfg.max_iterations;
        if (!agreed && !out_of_time) {
            variable_fixing(ledger, decisions, probs, rec.threshold, cfg.fix_share);
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<double> mu(S);
                for (std::size_t w = 0; w < S; ++w) mu[w] = ctx[w].multipliers[i];
                bool repeat = cycles.observe(static_cast<int>(i), mu);
                if (repeat && z > cfg.limit_2 && !ledger.appointments.count(static_cast<int>(i))) {
                    ledger.appointments[static_cast<int>(i)] = round_half_up(hat[i]);
                    rec.cycle_fixed.push_back(static_cast<int>(i));
                }
            }
            unfixed_history.push_back(static_cast<int>(n - ledger.appointments.size()));
            if (stall_due(z, unfixed_history, cfg)) {
                for (std::size_t i = 0; i < n; ++i)
                    if (!ledger.appointments.count(static_cast<int>(i)))
                        ledger.appointments[static_cast<int>(i)] = round_half_up(hat[i]);
                rec.stall_fired = true;
            }
            PenaltyStep step{rho, PenaltyBranch::keep};
            if (z > 1) step = penalty_update(z, rho, rec.delta_d, dd_prev, rec.delta_p, dp_prev, cfg);
            rec.penalty_branch = z > 1 ? to_string(step.branch) : "none";
            for (std::size_t w = 0; w < S; ++w) {
                for (std::size_t i = 0; i < n; ++i) {
                    ctx[w].multipliers[i] += rho * (a[w][i] - hat[i]);
                    add_linearization_cut(ctx[w], static_cast<int>(i), a[w][i]);
                }
                ctx[w].consensus = hat;
            }
            rho = step.rho;
        }
        rec.fixed_orders = static_cast<int>(ledger.orders.size());
        rec.fixed_appointments = static_cast<int>(ledger.appointments.size());
        rec.seconds = elapsed();
        if (sink) sink(rec);
        result.trace.push_back(rec);
        dd_prev = rec.delta_d;
        dp_prev = std::max(rec.delta_p, 0.0);
        if (hat_prev.empty()) dp_prev = std::numeric_limits<double>::infinity();
        hat_prev = hat;
        if (agreed) {
            result.converged = true;
            break;
        }
        if (out_of_time) break;
    }

    result.iterations = z;
    std::vector<int> appt(n);
    for (std::size_t i = 0; i < n; ++i) appt[i] = round_half_up(hat[i]);
    if (result.converged)
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(hat[i] - appt[i]) > 1e-9) throw SolverError("non-integral consensus at termination");
    result.schedule.appointments = appt;
    result.schedule.order = consensus_order(appt, decisions, probs, ledger);
    result.metrics = evaluate_expected(inst, result.schedule, set);
    result.wall_seconds = elapsed();
    return result;
}

}  // namespace ppsched
