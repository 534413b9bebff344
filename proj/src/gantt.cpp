#include "ppsched/simulate.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <regex>
#include <sstream>

namespace ppsched {

namespace {

// Shortest text that parses back to the same double.
std::string num(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string row_name(const char* prefix, int index) { return prefix + std::to_string(index + 1); }

}  // namespace

std::vector<GanttBar> gantt_bars(const Instance& inst, const SecondStageOutcome& o, const Scenario& sc) {
    std::vector<GanttBar> bars;
    for (std::size_t i = 0; i < o.surgery_start.size(); ++i) {
        int label = static_cast<int>(i) + 1;
        std::string or_row = row_name("OR", inst.patients[i].or_id);
        Minutes b = o.induction_start[i], a = o.surgery_start[i];
        Minutes ind_end = b + sc.induction[i];
        if (o.mode == ProcessingMode::parallel) {
            std::string ir_row = row_name("IR", o.ir_assignment[i]);
            bars.push_back({ir_row, "induction", label, b, ind_end});
            if (a - ind_end > kTimeTol) bars.push_back({ir_row, "hold", label, ind_end, a});
        } else {
            bars.push_back({or_row, "induction", label, b, ind_end});
        }
        bars.push_back({or_row, "surgery", label, a, a + sc.surgery[i]});
        bars.push_back({or_row, "turnover", label, a + sc.surgery[i], a + sc.surgery[i] + sc.turnover[i]});
    }
    std::stable_sort(bars.begin(), bars.end(), [](const GanttBar& x, const GanttBar& y) {
        if (x.row != y.row) return x.row < y.row;
        return x.start < y.start;
    });
    return bars;
}

std::string gantt_svg(const Instance& inst, const SecondStageOutcome& o, const Scenario& sc) {
    const double scale = 4.0, row_h = 28.0, left = 60.0, top = 30.0;
    std::vector<std::string> rows;
    if (o.mode == ProcessingMode::parallel)
        for (int k = 0; k < inst.num_irs; ++k) rows.push_back(row_name("IR", k));
    for (int r = 0; r < inst.num_ors; ++r) rows.push_back(row_name("OR", r));

    auto bars = gantt_bars(inst, o, sc);
    double horizon = 0.0;
    for (const auto& b : bars) horizon = std::max(horizon, b.end);
    double width = left + horizon * scale + 20.0;
    double height = top + row_h * static_cast<double>(rows.size()) + 20.0;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
       << num(height) << "\">\n";
    os << "<style>.induction{fill:#ffffff;stroke:#000}.hold{fill:#dddddd;stroke:#000}"
          ".surgery{fill:#ffffff;stroke:#000}.turnover{fill:#444444;stroke:#000}"
          "text{font-family:sans-serif;font-size:11px}</style>\n";
    os << "<text x=\"4\" y=\"16\">cost " << num(o.metrics.cost) << "</text>\n";
    for (std::size_t r = 0; r < rows.size(); ++r)
        os << "<text x=\"4\" y=\"" << num(top + row_h * static_cast<double>(r) + 18.0) << "\">"
           << rows[r] << "</text>\n";
    for (const auto& b : bars) {
        auto r = std::find(rows.begin(), rows.end(), b.row) - rows.begin();
        double y = top + row_h * static_cast<double>(r) + 4.0;
        double x = left + b.start * scale;
        os << "<rect class=\"" << b.kind << "\" x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\""
           << num((b.end - b.start) * scale) << "\" height=\"" << num(row_h - 8.0) << "\" data-row=\""
           << b.row << "\" data-kind=\"" << b.kind << "\" data-patient=\"" << b.patient
           << "\" data-start=\"" << num(b.start) << "\" data-end=\"" << num(b.end) << "\"/>\n";
        if (b.kind == "induction" || b.kind == "surgery")
            os << "<text x=\"" << num(x + 2.0) << "\" y=\"" << num(y + 14.0) << "\">" << b.patient
               << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string gantt_text(const Instance& inst, const SecondStageOutcome& o, const Scenario& sc) {
    std::ostringstream os;
    for (const auto& b : gantt_bars(inst, o, sc))
        os << b.row << ' ' << b.kind << ' ' << b.patient << ' ' << num(b.start) << ' ' << num(b.end) << '\n';
    const Metrics& m = o.metrics;
    os << "or_idle " << num(m.or_idle_total) << '\n'
       << "ir_idle " << num(m.ir_idle_total) << '\n'
       << "wait_ir " << num(m.wait_ir_total) << '\n'
       << "wait_or " << num(m.wait_or_total) << '\n'
       << "cost " << num(m.cost) << '\n';
    return os.str();
}

void export_gantt(const Instance& inst, const SecondStageOutcome& o, const Scenario& sc,
                  const std::filesystem::path& path) {
    std::ofstream svg(path);
    if (!svg) throw ValidationError("cannot write " + path.string());
    svg << gantt_svg(inst, o, sc);
    std::ofstream txt(path.string() + ".txt");
    if (!txt) throw ValidationError("cannot write " + path.string() + ".txt");
    txt << gantt_text(inst, o, sc);
}

std::vector<GanttBar> parse_gantt_svg(const std::string& svg) {
    static const std::regex rect(
        "<rect [^>]*data-row=\"([^\"]+)\" data-kind=\"([^\"]+)\" data-patient=\"([0-9]+)\" "
        "data-start=\"([^\"]+)\" data-end=\"([^\"]+)\"/>");
    std::vector<GanttBar> out;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), rect); it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        out.push_back({m[1].str(), m[2].str(), std::stoi(m[3].str()), std::stod(m[4].str()),
                       std::stod(m[5].str())});
    }
    return out;
}

}  // namespace ppsched
