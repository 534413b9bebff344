#include "ppsched/model.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

namespace ppsched {

namespace {

std::string num(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string bound(double x) {
    if (std::isinf(x)) return x > 0 ? "+inf" : "-inf";
    return num(x);
}

// Writes " + 2 x - 3 y" and wraps long lines.
void write_terms(std::ostream& os, const MipDescription& mip, const std::vector<std::pair<int, double>>& terms) {
    int on_line = 0;
    for (auto [j, c] : terms) {
        if (c == 0.0) continue;
        os << (c < 0 ? " - " : " + ") << num(std::abs(c)) << ' ' << mip.variables[static_cast<std::size_t>(j)].name;
        if (++on_line == 8) {
            os << "\n   ";
            on_line = 0;
        }
    }
}

}  // namespace

void write_lp(const MipDescription& mip, std::ostream& os) {
    os << "\\ " << mip.variables.size() << " variables, " << mip.constraints.size() << " constraints\n";
    os << "Minimize\n obj:";
    write_terms(os, mip, mip.objective.terms);
    if (mip.objective.constant != 0.0)
        os << (mip.objective.constant < 0 ? " - " : " + ") << num(std::abs(mip.objective.constant));
    if (mip.objective.terms.empty() && mip.objective.constant == 0.0) os << " 0";
    os << "\nSubject To\n";
    for (const auto& c : mip.constraints) {
        os << ' ' << c.name << ':';
        if (c.terms.empty()) os << " 0 " << mip.variables.front().name;
        write_terms(os, mip, c.terms);
        os << (c.sense == Sense::le ? " <= " : c.sense == Sense::ge ? " >= " : " = ") << num(c.rhs) << '\n';
    }
    os << "Bounds\n";
    for (const auto& v : mip.variables) {
        if (v.kind == VarKind::binary && v.lower == 0.0 && v.upper == 1.0) continue;
        if (v.lower == v.upper)
            os << ' ' << v.name << " = " << num(v.lower) << '\n';
        else
            os << ' ' << bound(v.lower) << " <= " << v.name << " <= " << bound(v.upper) << '\n';
    }
    bool header = false;
    for (const auto& v : mip.variables)
        if (v.kind == VarKind::integer) {
            if (!header) os << "General\n";
            header = true;
            os << ' ' << v.name << '\n';
        }
    header = false;
    for (const auto& v : mip.variables)
        if (v.kind == VarKind::binary) {
            if (!header) os << "Binary\n";
            header = true;
            os << ' ' << v.name << '\n';
        }
    os << "End\n";
}

std::string to_lp_string(const MipDescription& mip) {
    std::ostringstream os;
    write_lp(mip, os);
    return os.str();
}

}  // namespace ppsched
