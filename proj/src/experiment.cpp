#include "ppsched/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace ppsched {

namespace {

std::string num(double x) {
    if (std::isnan(x)) return "";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

FirstStageSchedule solution_schedule(const MipDescription& mip, const SolveResult& r, std::size_t n) {
    if (!r.has_solution()) throw SolverError("solver returned no solution (" + to_string(r.status) + ")");
    return extract_schedule(mip, r.values, n);
}

SolveOptions exact_options(const RunConfig& cfg, const std::string& name) {
    SolveOptions opt;
    opt.time_limit = cfg.time_limit;
    opt.rel_gap = cfg.gap;
    opt.threads = cfg.threads;
    opt.dump_dir = cfg.dump_dir;
    opt.dump_name = name;
    return opt;
}

}  // namespace

std::vector<AcuityClass> reference_moments() {
    struct Row {
        int id, count;
        double im, is, sm, ss;
    };
    const Row rows[] = {{1, 329, 23.65, 5.66, 29.65, 20.52},
                        {2, 640, 13.82, 6.07, 17.48, 8.58},
                        {3, 153, 29.03, 6.78, 109.12, 42.96},
                        {4, 345, 24.97, 5.67, 30.88, 14.12},
                        {5, 496, 28.20, 7.42, 52.12, 32.56}};
    double total = 0.0;
    for (const Row& r : rows) total += r.count;
    std::vector<AcuityClass> out;
    for (const Row& r : rows) {
        AcuityClass c;
        c.id = r.id;
        c.label = "acuity " + std::to_string(r.id);
        c.count_weight = r.count / total;
        c.induction_moments = {r.im, r.is};
        c.surgery_moments = {r.sm, r.ss};
        out.push_back(c);
    }
    return out;
}

void refresh_bounds(Instance& inst, const ScenarioSet& set, int horizon) {
    inst.appointment_horizon = horizon > 0 ? horizon : std::ceil(worst_case_workload(inst, set));
    inst.big_m = 0.0;
    inst.big_m = compute_big_m(inst, set);
}

GeneratedInstance generate_instance(const ExperimentSpec& spec, std::uint64_t seed) {
    if (spec.patients < 1 || spec.num_irs < 1 || spec.num_ors < 1 || spec.scenarios < 1)
        throw ValidationError("patients, rooms and scenarios must be positive");
    GeneratedInstance g;
    g.seed = seed;
    g.classes = spec.classes.empty() ? reference_moments() : spec.classes;
    bool need_pools = std::any_of(g.classes.begin(), g.classes.end(),
                                  [](const AcuityClass& c) { return c.induction_pool.empty() || c.surgery_pool.empty(); });
    if (need_pools) g.classes = synthesize_pools(g.classes, spec.pool_size, spec.pool_seed);

    std::mt19937_64 rng(seed);
    std::vector<double> w;
    for (const auto& c : g.classes) w.push_back(c.count_weight);
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    std::vector<int> rooms(static_cast<std::size_t>(spec.patients));
    for (std::size_t i = 0; i < rooms.size(); ++i) rooms[i] = static_cast<int>(i % static_cast<std::size_t>(spec.num_ors));
    std::shuffle(rooms.begin(), rooms.end(), rng);

    Instance& inst = g.instance;
    inst.num_irs = spec.num_irs;
    inst.num_ors = spec.num_ors;
    inst.weights = spec.weights;
    for (int i = 0; i < spec.patients; ++i)
        inst.patients.push_back({i, g.classes[pick(rng)].id, rooms[static_cast<std::size_t>(i)]});

    g.scenarios = sample_scenarios(inst, g.classes, static_cast<std::size_t>(spec.scenarios), seed ^ 0x9E3779B97F4A7C15ULL);
    if (spec.duration_scale != 1.0)
        for (Scenario& s : g.scenarios.scenarios)
            for (std::size_t i = 0; i < s.size(); ++i) {
                s.induction[i] *= spec.duration_scale;
                s.surgery[i] *= spec.duration_scale;
                s.turnover[i] *= spec.duration_scale;
            }
    if (spec.turnover_ratio > 0) g.scenarios = scale_turnover(g.scenarios, spec.turnover_ratio);
    refresh_bounds(inst, g.scenarios, spec.horizon);
    require_valid(inst);
    return g;
}

MethodResult solve_exact(const Instance& inst, const ScenarioSet& set, const RunConfig& cfg,
                         const FirstStageSchedule* start, bool vi) {
    ModelOptions mo;
    mo.valid_inequalities = vi;
    mo.occupancy_cut = true;
    MipDescription mip = build_extensive_form(inst, set, mo);
    SolveOptions opt = exact_options(cfg, "extensive_form");
    if (start) opt.start = extensive_form_start(mip, inst, set, *start);
    SolveResult r = solve(mip, opt, cfg.backend);
    MethodResult m;
    m.method = "exact";
    m.schedule = solution_schedule(mip, r, inst.size());
    m.metrics = evaluate_expected(inst, m.schedule, set);
    m.status = r.status;
    m.bound = r.bound;
    m.mip_objective = r.objective;
    m.wall_seconds = r.wall_seconds;
    return m;
}

MethodResult solve_mean_value(const Instance& inst, const ScenarioSet& set, const RunConfig& cfg) {
    ModelOptions mo;
    mo.occupancy_cut = true;
    MipDescription mip = build_mean_value(inst, mean_scenario(set), mo);
    SolveResult r = solve(mip, exact_options(cfg, "mean_value"), cfg.backend);
    MethodResult m;
    m.method = "mean-value";
    m.schedule = solution_schedule(mip, r, inst.size());
    m.metrics = evaluate_expected(inst, m.schedule, set);
    m.status = r.status;
    m.mip_objective = r.objective;
    m.wall_seconds = r.wall_seconds;
    return m;
}

MethodResult solve_epha(const Instance& inst, const ScenarioSet& set, const RunConfig& cfg, const TraceSink& sink) {
    PhaConfig pc = cfg.pha;
    pc.backend = cfg.backend;
    pc.threads = cfg.threads;
    PhaResult r = run_epha(inst, set, pc, sink);
    MethodResult m;
    m.method = "epha";
    m.schedule = r.schedule;
    m.metrics = r.metrics;
    m.status = r.converged ? SolveStatus::optimal : SolveStatus::time_limit;
    m.iterations = r.iterations;
    m.wall_seconds = r.wall_seconds;
    m.trace = std::move(r.trace);
    return m;
}

MethodResult solve_heuristic(const Instance& inst, const ScenarioSet& set, const std::vector<AcuityClass>& classes,
                             SequencingRule rule, int percentile) {
    MethodResult m;
    m.method = to_string(rule) + "-" + std::to_string(percentile);
    m.schedule = hedged_schedule(inst, sequence(inst, classes, rule), percentile_estimates(classes), percentile);
    m.metrics = evaluate_expected(inst, m.schedule, set);
    m.status = SolveStatus::feasible;
    return m;
}

std::vector<MethodResult> solve_all_heuristics(const Instance& inst, const ScenarioSet& set,
                                               const std::vector<AcuityClass>& classes) {
    std::vector<MethodResult> out;
    for (SequencingRule r : {SequencingRule::spt, SequencingRule::lpt, SequencingRule::var})
        for (int p : kHedgingPercentiles) out.push_back(solve_heuristic(inst, set, classes, r, p));
    return out;
}

MethodResult solve_serial_exact(const Instance& inst, const ScenarioSet& set, const RunConfig& cfg) {
    MipDescription mip = build_serial_extensive_form(inst, set);
    SolveResult r = solve(mip, exact_options(cfg, "serial"), cfg.backend);
    MethodResult m;
    m.method = "serial-exact";
    m.schedule = solution_schedule(mip, r, inst.size());
    m.metrics = evaluate_expected(inst, m.schedule, set, ProcessingMode::serial);
    m.status = r.status;
    m.bound = r.bound;
    m.mip_objective = r.objective;
    m.wall_seconds = r.wall_seconds;
    return m;
}

MethodResult run_method(const std::string& method, const GeneratedInstance& g, const RunConfig& cfg,
                        const TraceSink& sink) {
    if (method == "epha") return solve_epha(g.instance, g.scenarios, cfg, sink);
    if (method == "exact") return solve_exact(g.instance, g.scenarios, cfg);
    if (method == "mean-value") return solve_mean_value(g.instance, g.scenarios, cfg);
    if (method == "serial-exact") return solve_serial_exact(g.instance, g.scenarios, cfg);
    auto dash = method.find('-');
    if (dash != std::string::npos) {
        SequencingRule rule = parse_rule(method.substr(0, dash));
        int p = 0;
        auto tail = method.substr(dash + 1);
        auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), p);
        if (ec == std::errc() && ptr == tail.data() + tail.size())
            return solve_heuristic(g.instance, g.scenarios, g.classes, rule, p);
    }
    throw ValidationError("unknown method '" + method + "'");
}

std::vector<CostWeights> weight_grid() {
    std::vector<CostWeights> out;
    for (int odd = 0; odd < 3; ++odd)
        for (double f : {10.0, 2.0, 0.5, 0.1}) {
            double w[3] = {1.0, 1.0, 1.0};
            w[odd] = f;
            out.push_back(normalize_weights(w[0], w[1], w[2]));
        }
    return out;
}

std::string report_csv(const std::vector<ReportRow>& rows) {
    std::ostringstream os;
    os << "id,experiment,seed,method,setting,mode,objective,or_idle,ir_idle,wait_ir,wait_or,"
          "mean_or_closure,mean_ir_closure,status,iterations,bound\n";
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const ReportRow& r = rows[k];
        const Metrics& m = r.result.metrics;
        os << k << ',' << r.experiment << ',' << r.seed << ',' << r.result.method << ',' << r.setting << ','
           << (r.mode == ProcessingMode::parallel ? "parallel" : "serial") << ',' << num(m.cost) << ','
           << num(m.or_idle_total) << ',' << num(m.ir_idle_total) << ',' << num(m.wait_ir_total) << ','
           << num(m.wait_or_total) << ',' << num(mean_of(m.or_closures)) << ',' << num(mean_of(m.ir_closures)) << ','
           << to_string(r.result.status) << ',' << r.result.iterations << ',' << num(r.result.bound) << '\n';
    }
    return os.str();
}

std::string timing_csv(const std::vector<ReportRow>& rows) {
    std::ostringstream os;
    os << "id,wall_seconds\n";
    for (std::size_t k = 0; k < rows.size(); ++k) os << k << ',' << num(rows[k].result.wall_seconds) << '\n';
    return os.str();
}

std::string summary_csv(const std::vector<ReportRow>& rows) {
    struct Acc {
        int n = 0;
        double cost = 0, wait = 0, or_idle = 0, ir_idle = 0, or_close = 0;
    };
    std::map<std::pair<std::string, std::string>, Acc> acc;
    std::vector<std::pair<std::string, std::string>> keys;
    for (const ReportRow& r : rows) {
        auto key = std::make_pair(r.result.method, r.setting);
        if (!acc.count(key)) keys.push_back(key);
        Acc& a = acc[key];
        const Metrics& m = r.result.metrics;
        ++a.n;
        a.cost += m.cost;
        a.wait += m.wait_ir_total + m.wait_or_total;
        a.or_idle += m.or_idle_total;
        a.ir_idle += m.ir_idle_total;
        a.or_close += mean_of(m.or_closures);
    }
    std::ostringstream os;
    os << "method,setting,count,mean_objective,mean_total_wait,mean_or_idle,mean_ir_idle,mean_or_closure\n";
    for (const auto& key : keys) {
        const Acc& a = acc[key];
        double n = a.n;
        os << key.first << ',' << key.second << ',' << a.n << ',' << num(a.cost / n) << ',' << num(a.wait / n) << ','
           << num(a.or_idle / n) << ',' << num(a.ir_idle / n) << ',' << num(a.or_close / n) << '\n';
    }
    return os.str();
}

void write_report(const std::filesystem::path& dir, const std::vector<ReportRow>& rows) {
    std::filesystem::create_directories(dir / "rows");
    write_text(dir / "report.csv", report_csv(rows));
    write_text(dir / "timings.csv", timing_csv(rows));
    write_text(dir / "summary.csv", summary_csv(rows));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const ReportRow& r = rows[k];
        Json j;
        j["mode"] = r.mode == ProcessingMode::parallel ? "parallel" : "serial";
        j["instance"] = to_json(r.instance);
        j["scenarios"] = to_json(r.scenarios);
        j["schedule"] = to_json(r.result.schedule);
        write_json(dir / "rows" / (std::to_string(k) + ".json"), j);
        if (!r.result.trace.empty()) {
            std::string lines;
            for (const auto& rec : r.result.trace) lines += to_json_line(rec) + "\n";
            write_text(dir / "rows" / (std::to_string(k) + ".trace.jsonl"), lines);
        }
    }
}

double reverify_report(const std::filesystem::path& dir) {
    std::ifstream in(dir / "report.csv");
    if (!in) throw ValidationError("no report.csv in " + dir.string());
    std::string line;
    std::getline(in, line);
    double worst = 0.0;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        if (cells.size() < 7) throw ValidationError("malformed report line: " + line);
        Json j = read_json(dir / "rows" / (cells[0] + ".json"));
        Instance inst = instance_from_json(j.at("instance"));
        ScenarioSet set = scenarios_from_json(j.at("scenarios"));
        FirstStageSchedule s = schedule_from_json(j.at("schedule"));
        ProcessingMode mode = j.at("mode") == "serial" ? ProcessingMode::serial : ProcessingMode::parallel;
        double fresh = evaluate_expected(inst, s, set, mode).cost;
        worst = std::max(worst, std::abs(fresh - std::stod(cells[6])));
    }
    return worst;
}

namespace {

ReportRow make_row(std::string experiment, const GeneratedInstance& g, std::string setting, MethodResult r,
                   ProcessingMode mode = ProcessingMode::parallel) {
    ReportRow row;
    row.experiment = std::move(experiment);
    row.seed = g.seed;
    row.method = r.method;
    row.setting = std::move(setting);
    row.mode = mode;
    row.instance = g.instance;
    row.scenarios = g.scenarios;
    row.result = std::move(r);
    return row;
}

void finish(const SweepOptions& o, const std::vector<ReportRow>& rows) {
    if (!o.out.empty()) write_report(o.out, rows);
}

std::string fmt_setting(const char* key, double v) { return std::string(key) + "=" + num(v); }

}  // namespace

std::vector<ReportRow> cmd_solve_batch(const ExperimentSpec& spec, const RunConfig& cfg, const SweepOptions& o) {
    std::vector<ReportRow> rows;
    for (auto seed : o.seeds) {
        GeneratedInstance g = generate_instance(spec, seed);
        rows.push_back(make_row("solve", g, "baseline", run_method(o.method, g, cfg)));
    }
    finish(o, rows);
    return rows;
}

std::vector<ReportRow> cmd_vss(const ExperimentSpec& spec, const RunConfig& cfg, const SweepOptions& o) {
    std::vector<ReportRow> rows;
    std::ostringstream vss;
    vss << "seed,stochastic,mean_value,vss,relative_vss\n";
    for (auto seed : o.seeds) {
        GeneratedInstance g = generate_instance(spec, seed);
        MethodResult st = run_method(o.method, g, cfg);
        MethodResult mv = solve_mean_value(g.instance, g.scenarios, cfg);
        double v = mv.cost() - st.cost();
        vss << seed << ',' << num(st.cost()) << ',' << num(mv.cost()) << ',' << num(v) << ','
            << num(mv.cost() > 0 ? v / mv.cost() : 0.0) << '\n';
        rows.push_back(make_row("vss", g, "stochastic", std::move(st)));
        rows.push_back(make_row("vss", g, "mean-value", std::move(mv)));
    }
    finish(o, rows);
    if (!o.out.empty()) write_text(o.out / "vss.csv", vss.str());
    return rows;
}

std::vector<ReportRow> cmd_compare_serial(const ExperimentSpec& spec, const RunConfig& cfg, const SweepOptions& o) {
    std::vector<ReportRow> rows;
    for (auto seed : o.seeds) {
        const GeneratedInstance base = generate_instance(spec, seed);
        for (double ratio : o.ratios) {
            GeneratedInstance g = base;
            g.scenarios = scale_turnover(base.scenarios, ratio);
            refresh_bounds(g.instance, g.scenarios, spec.horizon);
            for (int k : {2, 3}) {
                GeneratedInstance gk = g;
                gk.instance.num_irs = k;
                rows.push_back(make_row("compare-serial", gk, fmt_setting("ratio", ratio) + ";parallel-" + std::to_string(k),
                                        run_method(o.method, gk, cfg)));
            }
            rows.push_back(make_row("compare-serial", g, fmt_setting("ratio", ratio) + ";serial",
                                    solve_serial_exact(g.instance, g.scenarios, cfg), ProcessingMode::serial));
        }
    }
    finish(o, rows);
    return rows;
}

std::vector<ReportRow> cmd_sweep_weights(const ExperimentSpec& spec, const RunConfig& cfg, const SweepOptions& o) {
    std::vector<ReportRow> rows;
    for (auto seed : o.seeds) {
        const GeneratedInstance base = generate_instance(spec, seed);
        for (const CostWeights& w : weight_grid()) {
            GeneratedInstance g = base;
            g.instance.weights = w;
            std::string setting = "cI=" + num(w.or_idle) + ";cJ=" + num(w.ir_idle) + ";cW=" + num(w.waiting);
            rows.push_back(make_row("sweep-weights", g, setting, run_method(o.method, g, cfg)));
        }
    }
    finish(o, rows);
    return rows;
}

std::vector<ReportRow> cmd_sweep_irs(const ExperimentSpec& spec, const RunConfig& cfg, const SweepOptions& o) {
    std::vector<ReportRow> rows;
    for (auto seed : o.seeds) {
        const GeneratedInstance base = generate_instance(spec, seed);
        for (int k : o.ir_counts) {
            GeneratedInstance g = base;
            g.instance.num_irs = k;
            rows.push_back(make_row("sweep-irs", g, "irs=" + std::to_string(k), run_method(o.method, g, cfg)));
        }
    }
    finish(o, rows);
    return rows;
}

}  // namespace ppsched
