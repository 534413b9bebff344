#include "ppsched/solver.hpp"

#include "Highs.h"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>

namespace ppsched {

namespace {

HighsLp to_highs(const MipDescription& mip) {
    HighsLp lp;
    const auto n = static_cast<HighsInt>(mip.variables.size());
    lp.num_col_ = n;
    lp.num_row_ = static_cast<HighsInt>(mip.constraints.size());
    lp.sense_ = ObjSense::kMinimize;
    lp.offset_ = mip.objective.constant;
    lp.col_cost_.assign(static_cast<std::size_t>(n), 0.0);
    for (auto [j, c] : mip.objective.terms) lp.col_cost_[static_cast<std::size_t>(j)] += c;
    bool any_integer = false;
    for (const auto& v : mip.variables) {
        lp.col_lower_.push_back(v.lower);
        lp.col_upper_.push_back(v.upper);
        bool integral = v.kind != VarKind::continuous;
        any_integer = any_integer || integral;
        lp.integrality_.push_back(integral ? HighsVarType::kInteger : HighsVarType::kContinuous);
        lp.col_names_.push_back(v.name);
    }
    if (!any_integer) lp.integrality_.clear();
    // Column-wise assembly; duplicate terms within a row are summed.
    std::vector<std::vector<std::pair<HighsInt, double>>> cols(static_cast<std::size_t>(n));
    for (std::size_t r = 0; r < mip.constraints.size(); ++r) {
        const auto& c = mip.constraints[r];
        for (auto [j, v] : c.terms) {
            auto& col = cols[static_cast<std::size_t>(j)];
            if (!col.empty() && col.back().first == static_cast<HighsInt>(r)) col.back().second += v;
            else col.emplace_back(static_cast<HighsInt>(r), v);
        }
        lp.row_lower_.push_back(c.sense == Sense::le ? -kHighsInf : c.rhs);
        lp.row_upper_.push_back(c.sense == Sense::ge ? kHighsInf : c.rhs);
        lp.row_names_.push_back(c.name);
    }
    auto& a = lp.a_matrix_;
    a.format_ = MatrixFormat::kColwise;
    a.num_col_ = n;
    a.num_row_ = lp.num_row_;
    a.start_.assign(1, 0);  // the default matrix already holds a leading 0
    for (const auto& col : cols) {
        for (auto [r, v] : col) {
            a.index_.push_back(r);
            a.value_.push_back(v);
        }
        a.start_.push_back(static_cast<HighsInt>(a.index_.size()));
    }
    return lp;
}

void quiet(Highs& h, double time_limit, int threads) {
    const bool log = std::getenv("PPSCHED_HIGHS_LOG") != nullptr;
    h.setOptionValue("output_flag", log);
    h.setOptionValue("log_to_console", log);
    h.setOptionValue("time_limit", time_limit);
    h.setOptionValue("threads", static_cast<HighsInt>(std::max(1, threads)));
    h.setOptionValue("random_seed", static_cast<HighsInt>(0));
}

// Re-solves the LP with integer columns fixed at their rounded values, so
// that reported continuous values satisfy big-M rows exactly.
bool polish(const HighsLp& base, std::vector<double>& x, double& objective) {
    HighsLp lp = base;
    for (std::size_t j = 0; j < lp.integrality_.size(); ++j)
        if (lp.integrality_[j] == HighsVarType::kInteger) lp.col_lower_[j] = lp.col_upper_[j] = std::round(x[j]);
    lp.integrality_.clear();
    Highs h;
    quiet(h, 60.0, 1);
    if (h.passModel(std::move(lp)) != HighsStatus::kOk) return false;
    if (h.run() == HighsStatus::kError || h.getModelStatus() != HighsModelStatus::kOptimal) return false;
    x = h.getSolution().col_value;
    objective = h.getInfo().objective_function_value;
    return true;
}

class HighsBackend final : public MipBackend {
public:
    std::string name() const override { return "highs"; }

    SolveResult solve(const MipDescription& mip, const SolveOptions& opt) override {
        auto t0 = std::chrono::steady_clock::now();
        if (!opt.dump_dir.empty()) {
            std::filesystem::create_directories(opt.dump_dir);
            std::ofstream f(std::filesystem::path(opt.dump_dir) / (opt.dump_name + ".lp"));
            write_lp(mip, f);
        }
        HighsLp lp = to_highs(mip);
        Highs h;
        quiet(h, opt.time_limit, opt.threads);
        h.setOptionValue("mip_rel_gap", opt.rel_gap);
        h.setOptionValue("mip_abs_gap", opt.abs_gap);
        if (h.passModel(lp) != HighsStatus::kOk) throw SolverError("HiGHS rejected the model");
        if (!opt.dump_dir.empty())
            h.writeModel((std::filesystem::path(opt.dump_dir) / (opt.dump_name + ".highs.mps")).string());
        if (!opt.start.empty()) {
            if (opt.start.size() != mip.variables.size()) throw SolverError("MIP start has the wrong length");
            HighsSolution s;
            s.col_value = opt.start;
            s.value_valid = true;
            h.setSolution(s);
        }
        if (h.run() == HighsStatus::kError) throw SolverError("HiGHS failed");

        SolveResult r;
        const HighsInfo& info = h.getInfo();
        const bool is_mip = !lp.integrality_.empty();
        const HighsModelStatus ms = h.getModelStatus();
        const bool have = info.primal_solution_status == kSolutionStatusFeasible;
        if (have) {
            r.values = h.getSolution().col_value;
            r.objective = info.objective_function_value;
            if (is_mip) polish(lp, r.values, r.objective);
        }
        r.bound = is_mip ? info.mip_dual_bound : r.objective;
        if (have) r.bound = std::min(r.bound, r.objective);
        r.nodes = is_mip ? static_cast<double>(info.mip_node_count) : 0.0;
        switch (ms) {
            case HighsModelStatus::kOptimal: r.status = SolveStatus::optimal; break;
            case HighsModelStatus::kInfeasible:
            case HighsModelStatus::kUnboundedOrInfeasible: r.status = SolveStatus::infeasible; break;
            case HighsModelStatus::kTimeLimit: r.status = SolveStatus::time_limit; break;
            default: r.status = have ? SolveStatus::feasible : SolveStatus::error; break;
        }
        r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    }
};

}  // namespace

std::unique_ptr<MipBackend> make_highs_backend() { return std::make_unique<HighsBackend>(); }

}  // namespace ppsched
