// Command-line front end: instance generation, solving, evaluation and the
// experiment sweeps.

#include "ppsched/experiment.hpp"
#include "ppsched/io.hpp"
#include "ppsched/simulate.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <ctime>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace ppsched;

namespace {

enum Exit { kOk = 0, kFailure = 1, kValidation = 2, kSolver = 3, kSizeGuard = 4 };

struct Globals {
    std::uint64_t seed = 1;
    std::string config;
    std::string out;
    std::string solver;
    double time_limit = 0.0;
    int threads = 0;
};

struct SpecArgs {
    int patients = 7;
    int irs = 2;
    int ors = 3;
    int scenarios = 50;
    std::vector<double> weights{0.5, 0.25, 0.25};
    double turnover_ratio = 0.0;
    std::string moments;
    std::string pools;
    std::size_t pool_size = 1000;
    std::uint64_t pool_seed = 1963;
    int horizon = 0;
    int instances = 10;
};

void add_spec_options(CLI::App* cmd, SpecArgs& s) {
    cmd->add_option("--patients", s.patients, "Number of patients")->check(CLI::PositiveNumber);
    cmd->add_option("--irs", s.irs, "Number of induction rooms")->check(CLI::PositiveNumber);
    cmd->add_option("--ors", s.ors, "Number of operating rooms")->check(CLI::PositiveNumber);
    cmd->add_option("--scenarios", s.scenarios, "Scenarios per instance")->check(CLI::PositiveNumber);
    cmd->add_option("--weights", s.weights, "c_I c_J c_W (normalized)")->expected(3);
    cmd->add_option("--turnover-ratio", s.turnover_ratio, "Target turnover/induction ratio");
    cmd->add_option("--moments", s.moments, "Moments CSV (acuity,count,ind_mean,ind_sd,surg_mean,surg_sd)");
    cmd->add_option("--pools", s.pools, "Duration pool CSV (acuity,kind,duration_minutes)");
    cmd->add_option("--pool-size", s.pool_size, "Synthetic pool size per class");
    cmd->add_option("--pool-seed", s.pool_seed, "Seed for synthetic pools");
    cmd->add_option("--horizon", s.horizon, "Appointment horizon in minutes (0: derived)");
}

ExperimentSpec make_spec(const SpecArgs& a) {
    ExperimentSpec s;
    s.patients = a.patients;
    s.num_irs = a.irs;
    s.num_ors = a.ors;
    s.scenarios = a.scenarios;
    s.weights = normalize_weights(a.weights.at(0), a.weights.at(1), a.weights.at(2));
    s.turnover_ratio = a.turnover_ratio;
    if (!a.pools.empty()) s.classes = load_pools(a.pools);
    else if (!a.moments.empty()) s.classes = load_moments(a.moments);
    s.pool_size = a.pool_size;
    s.pool_seed = a.pool_seed;
    s.horizon = a.horizon;
    return s;
}

RunConfig make_config(const Globals& g) {
    RunConfig c;
    if (!g.config.empty()) c = config_from_json(read_json(g.config));
    if (!g.solver.empty()) {
        make_backend(g.solver);
        c.backend = g.solver;
    }
    if (g.time_limit > 0) c.time_limit = g.time_limit;
    if (g.threads > 0) c.threads = g.threads;
    c.pha.backend = c.backend;
    c.pha.threads = c.threads;
    return c;
}

std::filesystem::path out_dir(const Globals& g) {
    if (!g.out.empty()) return g.out;
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    localtime_r(&t, &tm);
    std::ostringstream os;
    os << "runs/" << std::put_time(&tm, "%Y%m%d-%H%M%S");
    return os.str();
}

std::vector<AcuityClass> classes_for(const SpecArgs& a) {
    std::vector<AcuityClass> classes = !a.pools.empty()     ? load_pools(a.pools)
                                       : !a.moments.empty() ? load_moments(a.moments)
                                                            : reference_moments();
    bool need = std::any_of(classes.begin(), classes.end(), [](const AcuityClass& c) { return c.induction_pool.empty(); });
    return need ? synthesize_pools(classes, a.pool_size, a.pool_seed) : classes;
}

GeneratedInstance load_instance(const std::string& inst, const std::string& scen, const SpecArgs& a) {
    GeneratedInstance g;
    g.instance = instance_from_json(read_json(inst));
    g.scenarios = scenarios_from_json(read_json(scen));
    validate_scenarios(g.instance, g.scenarios);
    g.classes = classes_for(a);
    return g;
}

std::vector<std::uint64_t> seeds_from(const Globals& g, int count) {
    std::vector<std::uint64_t> s;
    for (int k = 0; k < count; ++k) s.push_back(g.seed + static_cast<std::uint64_t>(k));
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Surgery scheduling with parallel induction rooms"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "Base random seed");
    app.add_option("--config", g.config, "JSON config file");
    app.add_option("--out", g.out, "Output directory (default runs/<timestamp>)");
    app.add_option("--solver", g.solver, "MIP backend (highs)");
    app.add_option("--time-limit", g.time_limit, "Seconds per exact solve");
    app.add_option("--threads", g.threads, "Worker threads for subproblem solves");

    SpecArgs spec;
    std::string inst_path, scen_path, sched_path, method = "epha";
    int scenario_index = 0;
    bool serial = false;

    auto* gen = app.add_subcommand("generate", "Sample an instance and its scenario set");
    add_spec_options(gen, spec);

    auto* solve_cmd = app.add_subcommand("solve", "Solve an instance with one method");
    solve_cmd->add_option("--instance", inst_path, "Instance JSON")->required();
    solve_cmd->add_option("--scenario-set", scen_path, "Scenario set JSON")->required();
    solve_cmd->add_option("--method", method, "epha, exact, mean-value, serial-exact or RULE-PCT (e.g. SPT-70)");
    solve_cmd->add_option("--moments", spec.moments, "Moments CSV for heuristic estimates");
    solve_cmd->add_option("--pools", spec.pools, "Pool CSV for heuristic estimates");
    solve_cmd->add_option("--pool-seed", spec.pool_seed, "Seed for synthetic pools");

    auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a schedule on a scenario set");
    eval_cmd->add_option("--instance", inst_path, "Instance JSON")->required();
    eval_cmd->add_option("--scenario-set", scen_path, "Scenario set JSON")->required();
    eval_cmd->add_option("--schedule", sched_path, "Schedule JSON")->required();
    eval_cmd->add_flag("--serial", serial, "Induction inside the OR");

    auto* gantt_cmd = app.add_subcommand("gantt", "Draw the schedule for one scenario");
    gantt_cmd->add_option("--instance", inst_path, "Instance JSON")->required();
    gantt_cmd->add_option("--scenario-set", scen_path, "Scenario set JSON")->required();
    gantt_cmd->add_option("--schedule", sched_path, "Schedule JSON")->required();
    gantt_cmd->add_option("--index", scenario_index, "Scenario index");
    gantt_cmd->add_flag("--serial", serial, "Induction inside the OR");

    auto add_sweep = [&](const char* name, const char* help) {
        auto* c = app.add_subcommand(name, help);
        add_spec_options(c, spec);
        c->add_option("--instances", spec.instances, "Number of instances (seeds seed..seed+n-1)")->check(CLI::PositiveNumber);
        c->add_option("--method", method, "Method for the parallel model");
        return c;
    };
    auto* vss_cmd = add_sweep("vss", "Value of the stochastic solution");
    auto* serial_cmd = add_sweep("compare-serial", "Parallel (2 and 3 IRs) against serial processing");
    std::vector<double> ratios{0.5, 1.0, 2.0};
    serial_cmd->add_option("--ratios", ratios, "Turnover/induction ratios");
    auto* weights_cmd = add_sweep("sweep-weights", "Twelve cost-weight settings");
    auto* irs_cmd = add_sweep("sweep-irs", "Number of induction rooms");
    std::vector<int> irs{1, 2, 3};
    irs_cmd->add_option("--ir-counts", irs, "IR counts to compare");
    auto* batch_cmd = add_sweep("batch", "Solve a batch of generated instances");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        RunConfig cfg = make_config(g);
        std::filesystem::path out = out_dir(g);
        if (gen->parsed()) {
            GeneratedInstance inst = generate_instance(make_spec(spec), g.seed);
            write_json(out / "instance.json", to_json(inst.instance));
            write_json(out / "scenarios.json", to_json(inst.scenarios));
            std::cout << "wrote " << (out / "instance.json").string() << " and " << (out / "scenarios.json").string() << '\n';
        } else if (solve_cmd->parsed()) {
            GeneratedInstance inst = load_instance(inst_path, scen_path, spec);
            std::filesystem::create_directories(out);
            std::ofstream trace;
            TraceSink sink;
            if (method == "epha") {
                trace.open(out / "trace.jsonl");
                sink = [&](const IterationRecord& r) { trace << to_json_line(r) << '\n' << std::flush; };
            }
            MethodResult r = run_method(method, inst, cfg, sink);
            Json j;
            j["method"] = r.method;
            j["status"] = to_string(r.status);
            j["schedule"] = to_json(r.schedule);
            j["metrics"] = to_json(r.metrics);
            j["iterations"] = r.iterations;
            if (!std::isnan(r.bound)) j["bound"] = r.bound;
            write_json(out / "schedule.json", to_json(r.schedule));
            write_json(out / "result.json", j);
            std::cout << r.method << " cost " << r.metrics.cost << " (" << to_string(r.status) << ")\n";
        } else if (eval_cmd->parsed()) {
            GeneratedInstance inst = load_instance(inst_path, scen_path, spec);
            FirstStageSchedule s = schedule_from_json(read_json(sched_path));
            Metrics m = evaluate_expected(inst.instance, s, inst.scenarios,
                                          serial ? ProcessingMode::serial : ProcessingMode::parallel);
            write_json(out / "metrics.json", to_json(m));
            std::cout << "expected cost " << m.cost << '\n';
        } else if (gantt_cmd->parsed()) {
            GeneratedInstance inst = load_instance(inst_path, scen_path, spec);
            FirstStageSchedule s = schedule_from_json(read_json(sched_path));
            if (scenario_index < 0 || static_cast<std::size_t>(scenario_index) >= inst.scenarios.size())
                throw ValidationError("scenario index out of range");
            const Scenario& sc = inst.scenarios.scenarios[static_cast<std::size_t>(scenario_index)];
            SecondStageOutcome o = evaluate_mode(serial ? ProcessingMode::serial : ProcessingMode::parallel,
                                                 inst.instance, s, sc);
            std::filesystem::create_directories(out);
            export_gantt(inst.instance, o, sc, out / "gantt.svg");
            write_json(out / "outcome.json", to_json(o));
            std::cout << "wrote " << (out / "gantt.svg").string() << '\n';
        } else {
            SweepOptions o;
            o.seeds = seeds_from(g, spec.instances);
            o.method = method;
            o.out = out;
            o.ratios = ratios;
            o.ir_counts = irs;
            ExperimentSpec es = make_spec(spec);
            std::vector<ReportRow> rows;
            if (vss_cmd->parsed()) rows = cmd_vss(es, cfg, o);
            else if (serial_cmd->parsed()) rows = cmd_compare_serial(es, cfg, o);
            else if (weights_cmd->parsed()) rows = cmd_sweep_weights(es, cfg, o);
            else if (irs_cmd->parsed()) rows = cmd_sweep_irs(es, cfg, o);
            else if (batch_cmd->parsed()) rows = cmd_solve_batch(es, cfg, o);
            write_json(out / "config.json", to_json(cfg));
            std::cout << summary_csv(rows) << "report in " << out.string() << '\n';
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kSolver;
    } catch (const SizeGuardError& e) {
        std::cerr << "size limit: " << e.what() << '\n';
        return kSizeGuard;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}
