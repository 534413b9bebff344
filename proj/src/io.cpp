#include "ppsched/io.hpp"

#include <fstream>
#include <set>

namespace ppsched {

namespace {

template <class T>
T get(const Json& j, const char* key) {
    if (!j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("field '") + key + "': " + e.what());
    }
}

void only_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw ValidationError("unknown key '" + it.key() + "' in " + where);
}

}  // namespace

Json to_json(const Instance& inst) {
    Json j;
    j["num_irs"] = inst.num_irs;
    j["num_ors"] = inst.num_ors;
    j["weights"] = {{"or_idle", inst.weights.or_idle}, {"ir_idle", inst.weights.ir_idle}, {"waiting", inst.weights.waiting}};
    j["big_m"] = inst.big_m;
    j["appointment_horizon"] = inst.appointment_horizon;
    Json ps = Json::array();
    for (const Patient& p : inst.patients) ps.push_back({{"id", p.id}, {"acuity", p.acuity}, {"or_id", p.or_id}});
    j["patients"] = ps;
    return j;
}

Instance instance_from_json(const Json& j) {
    Instance inst;
    inst.num_irs = get<int>(j, "num_irs");
    inst.num_ors = get<int>(j, "num_ors");
    const Json& w = j.at("weights");
    inst.weights = {get<double>(w, "or_idle"), get<double>(w, "ir_idle"), get<double>(w, "waiting")};
    inst.big_m = j.value("big_m", 0.0);
    inst.appointment_horizon = get<double>(j, "appointment_horizon");
    for (const Json& p : j.at("patients")) inst.patients.push_back({get<int>(p, "id"), get<int>(p, "acuity"), get<int>(p, "or_id")});
    require_valid(inst);
    return inst;
}

Json to_json(const ScenarioSet& set) {
    Json j;
    j["seed"] = set.seed;
    Json arr = Json::array();
    for (const Scenario& s : set.scenarios)
        arr.push_back({{"probability", s.probability}, {"induction", s.induction}, {"surgery", s.surgery}, {"turnover", s.turnover}});
    j["scenarios"] = arr;
    return j;
}

ScenarioSet scenarios_from_json(const Json& j) {
    ScenarioSet set;
    set.seed = j.value("seed", std::uint64_t{0});
    for (const Json& s : j.at("scenarios"))
        set.scenarios.push_back({get<std::vector<double>>(s, "induction"), get<std::vector<double>>(s, "surgery"),
                                 get<std::vector<double>>(s, "turnover"), get<double>(s, "probability")});
    return set;
}

Json to_json(const FirstStageSchedule& s) { return {{"appointments", s.appointments}, {"order", s.order}}; }

FirstStageSchedule schedule_from_json(const Json& j) {
    return {get<std::vector<int>>(j, "appointments"), get<std::vector<int>>(j, "order")};
}

Json to_json(const Metrics& m) {
    Json j;
    j["cost"] = m.cost;
    j["or_idle"] = m.or_idle_total;
    j["ir_idle"] = m.ir_idle_total;
    j["wait_ir"] = m.wait_ir_total;
    j["wait_or"] = m.wait_or_total;
    j["or_closures"] = m.or_closures;
    j["ir_closures"] = m.ir_closures;
    return j;
}

Json to_json(const SecondStageOutcome& o) {
    Json j;
    j["mode"] = o.mode == ProcessingMode::parallel ? "parallel" : "serial";
    j["ir_assignment"] = o.ir_assignment;
    j["induction_start"] = o.induction_start;
    j["surgery_start"] = o.surgery_start;
    j["wait_ir"] = o.wait_ir;
    j["wait_or"] = o.wait_or;
    j["or_closure"] = o.or_closure;
    j["or_idle"] = o.or_idle;
    j["ir_closure"] = o.ir_closure;
    j["ir_idle"] = o.ir_idle;
    j["metrics"] = to_json(o.metrics);
    return j;
}

RunConfig config_from_json(const Json& j, RunConfig c) {
    only_keys(j, {"solver", "pha", "penalty"}, "config");
    if (j.contains("solver")) {
        const Json& s = j.at("solver");
        only_keys(s, {"backend", "dump_dir", "time_limit", "gap", "threads"}, "solver");
        c.backend = s.value("backend", c.backend);
        c.dump_dir = s.value("dump_dir", c.dump_dir);
        c.time_limit = s.value("time_limit", c.time_limit);
        c.gap = s.value("gap", c.gap);
        c.threads = s.value("threads", c.threads);
    }
    if (j.contains("pha")) {
        const Json& p = j.at("pha");
        only_keys(p, {"rho0", "alpha", "rho_u1", "rho_u2", "rho_u3", "limit_1", "limit_2", "limit_3", "limit_4", "limit_5",
                      "controliter", "fix_share", "max_iterations", "time_limit", "ssp_time_limit", "ssp_gap", "consensus_bracket"},
                  "pha");
        PhaConfig& q = c.pha;
        q.rho0 = p.value("rho0", q.rho0);
        q.alpha = p.value("alpha", q.alpha);
        q.rho_u1 = p.value("rho_u1", q.rho_u1);
        q.rho_u2 = p.value("rho_u2", q.rho_u2);
        q.rho_u3 = p.value("rho_u3", q.rho_u3);
        q.limit_1 = p.value("limit_1", q.limit_1);
        q.limit_2 = p.value("limit_2", q.limit_2);
        q.limit_3 = p.value("limit_3", q.limit_3);
        q.limit_4 = p.value("limit_4", q.limit_4);
        q.limit_5 = p.value("limit_5", q.limit_5);
        q.controliter = p.value("controliter", q.controliter);
        q.fix_share = p.value("fix_share", q.fix_share);
        q.max_iterations = p.value("max_iterations", q.max_iterations);
        q.time_limit = p.value("time_limit", q.time_limit);
        q.ssp_time_limit = p.value("ssp_time_limit", q.ssp_time_limit);
        q.ssp_gap = p.value("ssp_gap", q.ssp_gap);
        q.consensus_bracket = p.value("consensus_bracket", q.consensus_bracket);
    }
    if (j.contains("penalty")) {
        only_keys(j.at("penalty"), {"literal_reciprocal"}, "penalty");
        c.pha.literal_reciprocal = j.at("penalty").value("literal_reciprocal", c.pha.literal_reciprocal);
    }
    c.pha.backend = c.backend;
    c.pha.threads = c.threads;
    validate(c.pha);
    if (c.backend != "highs") throw ValidationError("unknown solver backend '" + c.backend + "'");
    return c;
}

Json to_json(const RunConfig& c) {
    const PhaConfig& q = c.pha;
    Json j;
    j["solver"] = {{"backend", c.backend}, {"dump_dir", c.dump_dir}, {"time_limit", c.time_limit}, {"gap", c.gap},
                   {"threads", c.threads}};
    j["pha"] = {{"rho0", q.rho0},         {"alpha", q.alpha},       {"rho_u1", q.rho_u1},
                {"rho_u2", q.rho_u2},     {"rho_u3", q.rho_u3},     {"limit_1", q.limit_1},
                {"limit_2", q.limit_2},   {"limit_3", q.limit_3},   {"limit_4", q.limit_4},
                {"limit_5", q.limit_5},   {"controliter", q.controliter}, {"fix_share", q.fix_share},
                {"max_iterations", q.max_iterations}, {"time_limit", q.time_limit},
                {"ssp_time_limit", q.ssp_time_limit}, {"ssp_gap", q.ssp_gap},
                {"consensus_bracket", q.consensus_bracket}};
    j["penalty"] = {{"literal_reciprocal", q.literal_reciprocal}};
    return j;
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << text;
}

}  // namespace ppsched
