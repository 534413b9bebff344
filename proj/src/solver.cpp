#include "ppsched/solver.hpp"

namespace ppsched {

std::unique_ptr<MipBackend> make_highs_backend();

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::feasible: return "feasible";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::time_limit: return "time_limit";
        case SolveStatus::error: return "error";
    }
    return "error";
}

std::map<std::string, double> SolveResult::assignment(const MipDescription& mip) const {
    std::map<std::string, double> out;
    for (std::size_t j = 0; j < values.size() && j < mip.variables.size(); ++j) out[mip.variables[j].name] = values[j];
    return out;
}

std::vector<std::string> backend_names() { return {"highs"}; }

std::unique_ptr<MipBackend> make_backend(const std::string& name) {
    if (name == "highs") return make_highs_backend();
    throw ValidationError("unknown solver backend '" + name + "'");
}

SolveResult solve(const MipDescription& mip, const SolveOptions& options, const std::string& backend) {
    return make_backend(backend)->solve(mip, options);
}

}  // namespace ppsched
