#include "ppsched/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ppsched {

namespace {

using Index = std::size_t;

Index idx(int i) { return static_cast<Index>(i); }

void check_inputs(const Instance& instance, const FirstStageSchedule& schedule,
                  const Scenario& scenario) {
    require_valid(instance, schedule);
    if (scenario.induction.size() != instance.size() || scenario.surgery.size() != instance.size() ||
        scenario.turnover.size() != instance.size())
        throw ValidationError("scenario size does not match instance");
}

// Running state while patients are placed in first-stage order.
struct State {
    std::vector<Minutes> ir_free;      // latest surgery start of a patient held in each IR
    std::vector<Minutes> or_free;      // end of the last turnover in each OR
    std::vector<Minutes> or_ind_free;  // end of the last induction of each OR's patients
    Minutes prev_start = 0.0;          // induction start of the order predecessor
    double wait = 0.0;                 // sum of W + Y so far
    double dq_done_or_idle = 0.0;      // sum over ORs of (or_free - processed d+q)
    double ir_busy_gap = 0.0;          // sum of ir_free - processed e

    State(const Instance& inst)
        : ir_free(idx(inst.num_irs), 0.0), or_free(idx(inst.num_ors), 0.0),
          or_ind_free(idx(inst.num_ors), 0.0) {}
};

struct Placement {
    Minutes start;
    Minutes surgery;
};

Minutes base_start(const State& st, const Instance& inst, const FirstStageSchedule& sched, int j) {
    Index r = idx(inst.patients[idx(j)].or_id);
    return std::max({static_cast<Minutes>(sched.appointments[idx(j)]), st.prev_start, st.or_ind_free[r]});
}

Placement place(State& st, const Instance& inst, const FirstStageSchedule& sched,
                const Scenario& sc, int j, int k) {
    Index r = idx(inst.patients[idx(j)].or_id);
    Index jj = idx(j);
    Minutes b = std::max(base_start(st, inst, sched, j), st.ir_free[idx(k)]);
    Minutes a = std::max(b + sc.induction[jj], st.or_free[r]);
    double dq = sc.surgery[jj] + sc.turnover[jj];
    double old_or = st.or_free[r];
    st.wait += a - sched.appointments[jj] - sc.induction[jj];
    st.ir_busy_gap += (a - st.ir_free[idx(k)]) - sc.induction[jj];
    st.ir_free[idx(k)] = a;
    st.or_free[r] = a + dq;
    st.dq_done_or_idle += (st.or_free[r] - old_or) - dq;
    st.or_ind_free[r] = b + sc.induction[jj];
    st.prev_start = b;
    return {b, a};
}

double bound_of(const State& st, const CostWeights& w) {
    return w.waiting * st.wait + w.or_idle * st.dq_done_or_idle + w.ir_idle * st.ir_busy_gap;
}

// IRs in the order a first-available rule would pick them.
std::vector<int> candidate_irs(const State& st, const Instance& inst,
                               const FirstStageSchedule& sched, int j) {
    Minutes base = base_start(st, inst, sched, j);
    std::vector<int> ks(idx(inst.num_irs));
    std::iota(ks.begin(), ks.end(), 0);
    auto start_of = [&](int k) { return std::max(base, st.ir_free[idx(k)]); };
    std::stable_sort(ks.begin(), ks.end(), [&](int x, int y) {
        double sx = start_of(x), sy = start_of(y);
        if (std::abs(sx - sy) > kTimeTol) return sx < sy;
        double fx = st.ir_free[idx(x)], fy = st.ir_free[idx(y)];
        if (std::abs(fx - fy) > kTimeTol) return fx > fy;
        return x < y;
    });
    // IRs freed at the same moment are interchangeable.
    std::vector<int> out;
    for (int k : ks) {
        bool dup = std::any_of(out.begin(), out.end(), [&](int o) {
            return std::abs(st.ir_free[idx(o)] - st.ir_free[idx(k)]) <= kTimeTol;
        });
        if (!dup) out.push_back(k);
    }
    return out;
}

struct Search {
    const Instance& inst;
    const FirstStageSchedule& sched;
    const Scenario& sc;
    std::vector<int> current;
    std::vector<int> best;
    double best_cost = std::numeric_limits<double>::infinity();

    void run(const State& st, std::size_t depth) {
        if (depth == sched.order.size()) {
            double c = bound_of(st, inst.weights);
            if (c < best_cost - kTimeTol) {
                best_cost = c;
                best = current;
            }
            return;
        }
        int j = sched.order[depth];
        for (int k : candidate_irs(st, inst, sched, j)) {
            State next = st;
            place(next, inst, sched, sc, j, k);
            if (bound_of(next, inst.weights) >= best_cost - kTimeTol) continue;
            current[idx(j)] = k;
            run(next, depth + 1);
        }
    }
};

}  // namespace

SecondStageOutcome timeline_for_assignment(const Instance& inst, const FirstStageSchedule& sched,
                                           const Scenario& sc, const std::vector<int>& assignment) {
    check_inputs(inst, sched, sc);
    const Index n = inst.size();
    if (assignment.size() != n) throw ValidationError("assignment size does not match instance");
    for (int k : assignment)
        if (k < 0 || k >= inst.num_irs) throw ValidationError("IR index out of range");

    SecondStageOutcome out;
    out.mode = ProcessingMode::parallel;
    out.ir_assignment = assignment;
    out.induction_start.assign(n, 0.0);
    out.surgery_start.assign(n, 0.0);
    out.wait_ir.assign(n, 0.0);
    out.wait_or.assign(n, 0.0);
    State st(inst);
    for (int j : sched.order) {
        Placement p = place(st, inst, sched, sc, j, assignment[idx(j)]);
        Index jj = idx(j);
        out.induction_start[jj] = p.start;
        out.surgery_start[jj] = p.surgery;
        out.wait_ir[jj] = p.start - sched.appointments[jj];
        out.wait_or[jj] = p.surgery - p.start - sc.induction[jj];
    }

    const Index nr = idx(inst.num_ors), nk = idx(inst.num_irs);
    out.or_closure.assign(nr, 0.0);
    out.or_idle.assign(nr, 0.0);
    out.ir_closure.assign(nk, 0.0);
    out.ir_idle.assign(nk, 0.0);
    std::vector<double> busy_or(nr, 0.0), busy_ir(nk, 0.0);
    for (Index i = 0; i < n; ++i) {
        Index r = idx(inst.patients[i].or_id), k = idx(assignment[i]);
        out.or_closure[r] = std::max(out.or_closure[r], out.surgery_start[i] + sc.surgery[i] + sc.turnover[i]);
        busy_or[r] += sc.surgery[i] + sc.turnover[i];
        out.ir_closure[k] = std::max(out.ir_closure[k], out.surgery_start[i]);
        busy_ir[k] += sc.induction[i];
    }
    Metrics& m = out.metrics;
    for (Index r = 0; r < nr; ++r) out.or_idle[r] = out.or_closure[r] - busy_or[r];
    for (Index k = 0; k < nk; ++k) out.ir_idle[k] = out.ir_closure[k] - busy_ir[k];
    m.or_idle_total = std::accumulate(out.or_idle.begin(), out.or_idle.end(), 0.0);
    m.ir_idle_total = std::accumulate(out.ir_idle.begin(), out.ir_idle.end(), 0.0);
    m.wait_ir_total = std::accumulate(out.wait_ir.begin(), out.wait_ir.end(), 0.0);
    m.wait_or_total = std::accumulate(out.wait_or.begin(), out.wait_or.end(), 0.0);
    m.or_closures = out.or_closure;
    m.ir_closures = out.ir_closure;
    m.cost = cost_of(inst.weights, m.or_idle_total, m.ir_idle_total, m.wait_ir_total + m.wait_or_total);
    return out;
}

SecondStageOutcome evaluate_myopic(const Instance& inst, const FirstStageSchedule& sched,
                                   const Scenario& sc) {
    check_inputs(inst, sched, sc);
    std::vector<int> y(inst.size(), 0);
    State st(inst);
    for (int j : sched.order) {
        int k = candidate_irs(st, inst, sched, j).front();
        y[idx(j)] = k;
        place(st, inst, sched, sc, j, k);
    }
    return timeline_for_assignment(inst, sched, sc, y);
}

SecondStageOutcome evaluate(const Instance& inst, const FirstStageSchedule& sched, const Scenario& sc) {
    check_inputs(inst, sched, sc);
    if (inst.num_irs < 1) throw ValidationError("at least one induction room is required");
    Search s{inst, sched, sc, std::vector<int>(inst.size(), 0), {}, std::numeric_limits<double>::infinity()};
    s.run(State(inst), 0);
    if (s.best.empty()) s.best.assign(inst.size(), 0);
    return timeline_for_assignment(inst, sched, sc, s.best);
}

SecondStageOutcome evaluate_serial(const Instance& inst, const FirstStageSchedule& sched,
                                   const Scenario& sc) {
    check_inputs(inst, sched, sc);
    const Index n = inst.size(), nr = idx(inst.num_ors);
    SecondStageOutcome out;
    out.mode = ProcessingMode::serial;
    out.induction_start.assign(n, 0.0);
    out.surgery_start.assign(n, 0.0);
    out.wait_ir.assign(n, 0.0);
    out.wait_or.assign(n, 0.0);
    out.or_closure.assign(nr, 0.0);
    out.or_idle.assign(nr, 0.0);
    std::vector<double> busy(nr, 0.0);
    for (int j : sched.order) {
        Index jj = idx(j), r = idx(inst.patients[jj].or_id);
        Minutes start = std::max(static_cast<Minutes>(sched.appointments[jj]), out.or_closure[r]);
        out.induction_start[jj] = start;
        out.surgery_start[jj] = start + sc.induction[jj];
        out.wait_or[jj] = start - sched.appointments[jj];
        double work = sc.induction[jj] + sc.surgery[jj] + sc.turnover[jj];
        out.or_closure[r] = start + work;
        busy[r] += work;
    }
    Metrics& m = out.metrics;
    for (Index r = 0; r < nr; ++r) out.or_idle[r] = out.or_closure[r] - busy[r];
    m.or_idle_total = std::accumulate(out.or_idle.begin(), out.or_idle.end(), 0.0);
    m.wait_or_total = std::accumulate(out.wait_or.begin(), out.wait_or.end(), 0.0);
    m.or_closures = out.or_closure;
    m.cost = cost_of(inst.weights, m.or_idle_total, 0.0, m.wait_or_total);
    return out;
}

SecondStageOutcome evaluate_mode(ProcessingMode mode, const Instance& inst,
                                 const FirstStageSchedule& sched, const Scenario& sc) {
    return mode == ProcessingMode::serial ? evaluate_serial(inst, sched, sc) : evaluate(inst, sched, sc);
}

Metrics evaluate_expected(const Instance& inst, const FirstStageSchedule& sched,
                          const ScenarioSet& set, ProcessingMode mode) {
    if (set.scenarios.empty()) throw ValidationError("empty scenario set");
    Metrics m;
    m.or_closures.assign(idx(inst.num_ors), 0.0);
    if (mode == ProcessingMode::parallel) m.ir_closures.assign(idx(inst.num_irs), 0.0);
    for (const Scenario& sc : set.scenarios) {
        const double p = sc.probability;
        SecondStageOutcome o = evaluate_mode(mode, inst, sched, sc);
        m.or_idle_total += p * o.metrics.or_idle_total;
        m.ir_idle_total += p * o.metrics.ir_idle_total;
        m.wait_ir_total += p * o.metrics.wait_ir_total;
        m.wait_or_total += p * o.metrics.wait_or_total;
        m.cost += p * o.metrics.cost;
        for (Index r = 0; r < m.or_closures.size(); ++r) m.or_closures[r] += p * o.or_closure[r];
        for (Index k = 0; k < m.ir_closures.size(); ++k) m.ir_closures[k] += p * o.ir_closure[k];
    }
    return m;
}

bool check_assignment_optimality(const Instance& inst, const FirstStageSchedule& sched,
                                 const Scenario& sc, const SecondStageOutcome& outcome) {
    if (inst.size() > 6 || inst.num_irs > 3)
        throw SizeGuardError("assignment enumeration is limited to 6 patients and 3 IRs");
    const Index n = inst.size();
    std::vector<int> y(n, 0);
    while (true) {
        double c = timeline_for_assignment(inst, sched, sc, y).metrics.cost;
        if (c < outcome.metrics.cost - 1e-9) return false;
        Index t = 0;
        while (t < n && ++y[t] == inst.num_irs) y[t++] = 0;
        if (t == n) break;
    }
    return true;
}

}  // namespace ppsched
