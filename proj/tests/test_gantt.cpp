#include "doctest.h"
#include "fixtures.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace ppsched;
using namespace fixtures;

TEST_CASE("svg round-trips every bar") {
    WorkedExample f;
    auto o = evaluate_myopic(f.inst, f.sched, f.sc);
    auto bars = gantt_bars(f.inst, o, f.sc);
    auto back = parse_gantt_svg(gantt_svg(f.inst, o, f.sc));
    REQUIRE(back.size() == bars.size());
    for (std::size_t k = 0; k < bars.size(); ++k) {
        CHECK(back[k].row == bars[k].row);
        CHECK(back[k].kind == bars[k].kind);
        CHECK(back[k].patient == bars[k].patient);
        CHECK(back[k].start == bars[k].start);
        CHECK(back[k].end == bars[k].end);
    }
}

TEST_CASE("bars agree with the timeline") {
    WorkedExample f;
    auto o = evaluate_myopic(f.inst, f.sched, f.sc);
    auto bars = gantt_bars(f.inst, o, f.sc);
    double surgery = 0, induction = 0, hold = 0;
    for (const auto& b : bars) {
        CHECK(b.end > b.start);
        if (b.kind == "surgery") surgery += b.end - b.start;
        if (b.kind == "induction") induction += b.end - b.start;
        if (b.kind == "hold") hold += b.end - b.start;
    }
    CHECK(surgery == doctest::Approx(53 + 10 + 77 + 14 + 55 + 65 + 12));
    CHECK(induction == doctest::Approx(141));
    CHECK(hold == doctest::Approx(48));  // OR waits spent in the IR

    // Patient 1 is induced in IR 1 from 34 to 44 and held until OR 1 frees at 59.
    bool found = false;
    for (const auto& b : bars)
        if (b.patient == 1 && b.kind == "hold") {
            CHECK(b.row == "IR1");
            CHECK(b.start == 44);
            CHECK(b.end == 59);
            found = true;
        }
    CHECK(found);

    // Bars in one row never overlap.
    std::map<std::string, std::vector<std::pair<double, double>>> rows;
    for (const auto& b : bars) rows[b.row].push_back({b.start, b.end});
    for (auto& [row, spans] : rows) {
        std::sort(spans.begin(), spans.end());
        for (std::size_t k = 1; k < spans.size(); ++k) CHECK(spans[k].first >= spans[k - 1].second - 1e-9);
    }
}

TEST_CASE("export writes the chart and a text timeline") {
    WorkedExample f;
    auto o = evaluate_myopic(f.inst, f.sched, f.sc);
    auto dir = std::filesystem::temp_directory_path() / "ppsched_tests";
    std::filesystem::create_directories(dir);
    auto path = dir / "fig.svg";
    export_gantt(f.inst, o, f.sc, path);
    std::ifstream svg(path), txt(path.string() + ".txt");
    REQUIRE(svg.good());
    REQUIRE(txt.good());
    std::stringstream s;
    s << txt.rdbuf();
    CHECK(s.str().find("or_idle 98") != std::string::npos);
    CHECK(s.str().find("wait_ir 22") != std::string::npos);
    CHECK(s.str() == gantt_text(f.inst, o, f.sc));
}

TEST_CASE("serial charts have no IR rows") {
    WorkedExample f;
    auto o = evaluate_serial(f.inst, f.sched, f.sc);
    for (const auto& b : gantt_bars(f.inst, o, f.sc)) CHECK(b.row.rfind("OR", 0) == 0);
}
