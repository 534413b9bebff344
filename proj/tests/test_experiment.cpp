#include "doctest.h"
#include "fixtures.hpp"

#include "ppsched/experiment.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace ppsched;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto d = fs::temp_directory_path() / "ppsched_tests" / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(PPSCHED_CLI) + " " + args + " >/dev/null 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

ExperimentSpec small_spec() {
    ExperimentSpec s;
    s.patients = 4;
    s.num_irs = 2;
    s.num_ors = 2;
    s.scenarios = 4;
    return s;
}

}  // namespace

TEST_CASE("config files override defaults and reject unknown keys") {
    Json j = Json::parse(R"({"solver": {"time_limit": 30, "threads": 2},
                             "pha": {"rho0": 0.5, "limit_2": 40},
                             "penalty": {"literal_reciprocal": true}})");
    RunConfig c = config_from_json(j);
    CHECK(c.time_limit == 30);
    CHECK(c.threads == 2);
    CHECK(c.pha.rho0 == 0.5);
    CHECK(c.pha.limit_2 == 40);
    CHECK(c.pha.literal_reciprocal);
    CHECK(c.pha.limit_1 == PhaConfig{}.limit_1);
    CHECK(config_from_json(to_json(c)).pha.rho0 == 0.5);

    CHECK_THROWS_AS(config_from_json(Json::parse(R"({"pha": {"rho": 1}})")), ValidationError);
    CHECK_THROWS_AS(config_from_json(Json::parse(R"({"extra": {}})")), ValidationError);
    CHECK_THROWS_AS(config_from_json(Json::parse(R"({"solver": {"backend": "gurobi"}})")), ValidationError);
    CHECK_THROWS_AS(config_from_json(Json::parse(R"({"pha": {"limit_3": 10}})")), ValidationError);
}

TEST_CASE("weight grid holds twelve normalized settings") {
    auto grid = weight_grid();
    REQUIRE(grid.size() == 12);
    for (const auto& w : grid) CHECK(w.or_idle + w.ir_idle + w.waiting == doctest::Approx(1.0));
    // OR idle at ten times the others: 10/12, 1/12, 1/12
    CHECK(grid[0].or_idle == doctest::Approx(10.0 / 12));
    CHECK(grid[0].waiting == doctest::Approx(1.0 / 12));
}

TEST_CASE("generation is seeded and files round-trip") {
    auto a = generate_instance(small_spec(), 11);
    auto b = generate_instance(small_spec(), 11);
    auto c = generate_instance(small_spec(), 12);
    CHECK(to_json(a.scenarios).dump() == to_json(b.scenarios).dump());
    CHECK(to_json(a.scenarios).dump() != to_json(c.scenarios).dump());
    CHECK(to_json(instance_from_json(to_json(a.instance))).dump() == to_json(a.instance).dump());
    CHECK(to_json(scenarios_from_json(to_json(a.scenarios))).dump() == to_json(a.scenarios).dump());
    FirstStageSchedule s{{0, 5, 9, 30}, {0, 1, 2, 3}};
    CHECK(schedule_from_json(to_json(s)).appointments == s.appointments);
}

TEST_CASE("reports are byte-identical across runs and re-verify") {
    SweepOptions o;
    o.seeds = {1, 2};
    o.method = "SPT-70";
    o.out = scratch("rep_b");
    cmd_solve_batch(small_spec(), RunConfig{}, o);
    o.out = scratch("rep_a");
    auto rows = cmd_solve_batch(small_spec(), RunConfig{}, o);
    REQUIRE(rows.size() == 2);
    CHECK(slurp(o.out / "report.csv") == slurp(o.out.parent_path() / "rep_b" / "report.csv"));
    CHECK(fs::exists(o.out / "timings.csv"));
    CHECK(reverify_report(o.out) < 1e-6);

    // a tampered objective is caught
    std::string text = slurp(o.out / "report.csv");
    auto line = text.find('\n') + 1;
    auto col = line;
    for (int k = 0; k < 6; ++k) col = text.find(',', col) + 1;
    text.insert(col, "9");
    write_text(o.out / "report.csv", text);
    CHECK(reverify_report(o.out) > 1.0);
}

TEST_CASE("command line exit codes") {
    auto d = scratch("cli");
    std::string out = " --out " + d.string();
    CHECK(run_cli("--seed 3" + out + "/g generate --patients 4 --irs 2 --ors 2 --scenarios 3") == 0);
    CHECK(fs::exists(d / "g" / "instance.json"));
    CHECK(run_cli(out + "/s solve --instance " + (d / "g" / "instance.json").string() + " --scenario-set " +
                  (d / "g" / "scenarios.json").string() + " --method LPT-80") == 0);
    CHECK(fs::exists(d / "s" / "schedule.json"));
    CHECK(run_cli(out + "/e evaluate --instance " + (d / "g" / "instance.json").string() + " --scenario-set " +
                  (d / "g" / "scenarios.json").string() + " --schedule " + (d / "s" / "schedule.json").string()) == 0);
    CHECK(fs::exists(d / "e" / "metrics.json"));

    CHECK(run_cli(out + "/x generate --patients 0") == 2);
    CHECK(run_cli(out + "/x solve --instance /nonexistent.json --scenario-set /nonexistent.json") == 2);
    CHECK(run_cli(out + "/x solve --instance " + (d / "g" / "instance.json").string() + " --scenario-set " +
                  (d / "g" / "scenarios.json").string() + " --method FIFO") == 2);
    write_text(d / "bad.json", R"({"pha": {"unknown": 1}})");
    CHECK(run_cli("--config " + (d / "bad.json").string() + out + "/x generate") == 2);
    CHECK(run_cli("--no-such-flag") == 2);
}
