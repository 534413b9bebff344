#include "ppsched/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace ppsched {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) {
        auto b = cell.find_first_not_of(" \t\r");
        auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return out;
}

double parse_number(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("not a number at " + where + ": '" + s + "'");
    }
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               const std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || split_csv(line) != header) {
        std::string want;
        for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
        throw ValidationError(path.string() + ": expected header " + want);
    }
    std::vector<std::vector<std::string>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto cells = split_csv(line);
        if (cells.size() != header.size())
            throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": wrong column count");
        rows.push_back(std::move(cells));
    }
    return rows;
}

// Uniform draw on [0, 1) from the top 53 bits.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Moments sample_moments(const std::vector<double>& xs) {
    if (xs.empty()) return {};
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    double sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    return {mean, sd};
}

std::vector<AcuityClass> load_pools(const std::filesystem::path& path) {
    auto rows = read_csv(path, {"acuity", "kind", "duration_minutes"});
    std::map<int, AcuityClass> by_id;
    int lineno = 1;
    for (const auto& r : rows) {
        ++lineno;
        std::string where = path.string() + ":" + std::to_string(lineno);
        double acuity = parse_number(r[0], where);
        if (acuity != std::floor(acuity) || acuity < 0)
            throw ValidationError(where + ": acuity must be a non-negative integer");
        double dur = parse_number(r[2], where);
        if (!(dur > 0)) throw ValidationError(where + ": duration must be positive");
        AcuityClass& c = by_id[static_cast<int>(acuity)];
        c.id = static_cast<int>(acuity);
        if (r[1] == "induction")
            c.induction_pool.push_back(dur);
        else if (r[1] == "surgery")
            c.surgery_pool.push_back(dur);
        else
            throw ValidationError(where + ": kind must be induction or surgery");
    }
    std::vector<AcuityClass> out;
    double total = 0.0;
    for (auto& [id, c] : by_id) {
        if (c.induction_pool.empty() || c.surgery_pool.empty())
            throw ValidationError("class " + std::to_string(id) + " needs both induction and surgery samples");
        c.label = "acuity " + std::to_string(id);
        c.count_weight = static_cast<double>(std::max(c.induction_pool.size(), c.surgery_pool.size()));
        c.induction_moments = sample_moments(c.induction_pool);
        c.surgery_moments = sample_moments(c.surgery_pool);
        total += c.count_weight;
        out.push_back(std::move(c));
    }
    if (out.empty()) throw ValidationError(path.string() + ": no rows");
    for (auto& c : out) c.count_weight /= total;
    return out;
}

std::vector<AcuityClass> load_moments(const std::filesystem::path& path) {
    auto rows = read_csv(path, {"acuity", "count", "ind_mean", "ind_sd", "surg_mean", "surg_sd"});
    std::vector<AcuityClass> out;
    double total = 0.0;
    int lineno = 1;
    for (const auto& r : rows) {
        ++lineno;
        std::string where = path.string() + ":" + std::to_string(lineno);
        AcuityClass c;
        c.id = static_cast<int>(parse_number(r[0], where));
        c.label = "acuity " + std::to_string(c.id);
        c.count_weight = parse_number(r[1], where);
        c.induction_moments = {parse_number(r[2], where), parse_number(r[3], where)};
        c.surgery_moments = {parse_number(r[4], where), parse_number(r[5], where)};
        if (c.count_weight <= 0 || c.induction_moments.mean <= 0 || c.surgery_moments.mean <= 0 ||
            c.induction_moments.sd < 0 || c.surgery_moments.sd < 0)
            throw ValidationError(where + ": counts and means must be positive, sds non-negative");
        total += c.count_weight;
        out.push_back(std::move(c));
    }
    if (out.empty()) throw ValidationError(path.string() + ": no rows");
    for (auto& c : out) c.count_weight /= total;
    return out;
}

std::pair<double, double> lognormal_params(const Moments& m) {
    if (!(m.mean > 0)) throw ValidationError("lognormal mean must be positive");
    double cv = m.sd / m.mean;
    double s2 = std::log1p(cv * cv);
    return {std::log(m.mean) - s2 / 2.0, std::sqrt(s2)};
}

std::vector<AcuityClass> synthesize_pools(const std::vector<AcuityClass>& classes,
                                          std::size_t pool_size, std::uint64_t seed) {
    if (pool_size == 0) throw ValidationError("pool_size must be positive");
    std::mt19937_64 rng(seed);
    std::vector<AcuityClass> out = classes;
    for (AcuityClass& c : out) {
        auto draw = [&](const Moments& m) {
            auto [mu, sigma] = lognormal_params(m);
            std::lognormal_distribution<double> dist(mu, sigma);
            std::vector<Minutes> pool(pool_size);
            for (auto& x : pool) x = dist(rng);
            return pool;
        };
        c.induction_pool = draw(c.induction_moments);
        c.surgery_pool = draw(c.surgery_moments);
    }
    return out;
}

const AcuityClass& find_class(const std::vector<AcuityClass>& classes, int id) {
    for (const auto& c : classes)
        if (c.id == id) return c;
    throw ValidationError("unknown acuity class " + std::to_string(id));
}

ScenarioSet sample_scenarios(const Instance& instance, const std::vector<AcuityClass>& classes,
                             std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ValidationError("scenario count must be positive");
    std::vector<const AcuityClass*> cls;
    for (const Patient& p : instance.patients) {
        const AcuityClass& c = find_class(classes, p.acuity);
        if (c.induction_pool.empty() || c.surgery_pool.empty())
            throw ValidationError("class " + std::to_string(c.id) + " has an empty pool");
        cls.push_back(&c);
    }
    std::mt19937_64 rng(seed);
    auto pick = [&](const std::vector<Minutes>& pool) {
        auto k = static_cast<std::size_t>(unit(rng) * static_cast<double>(pool.size()));
        return pool[std::min(k, pool.size() - 1)];
    };
    ScenarioSet set;
    set.seed = seed;
    set.scenarios.resize(n);
    for (Scenario& s : set.scenarios) {
        s.probability = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < instance.size(); ++i) {
            s.induction.push_back(pick(cls[i]->induction_pool));
            s.surgery.push_back(pick(cls[i]->surgery_pool));
            s.turnover.push_back(kTurnoverLow + (kTurnoverHigh - kTurnoverLow) * unit(rng));
        }
    }
    return set;
}

Scenario mean_scenario(const ScenarioSet& set) {
    if (set.scenarios.empty()) throw ValidationError("empty scenario set");
    const std::size_t n = set.scenarios.front().size();
    Scenario m;
    m.induction.assign(n, 0.0);
    m.surgery.assign(n, 0.0);
    m.turnover.assign(n, 0.0);
    double ptotal = 0.0;
    for (const Scenario& s : set.scenarios) ptotal += s.probability;
    for (const Scenario& s : set.scenarios) {
        double p = s.probability / ptotal;
        for (std::size_t i = 0; i < n; ++i) {
            m.induction[i] += p * s.induction[i];
            m.surgery[i] += p * s.surgery[i];
            m.turnover[i] += p * s.turnover[i];
        }
    }
    m.probability = 1.0;
    return m;
}

double turnover_induction_ratio(const ScenarioSet& set) {
    double e = 0.0, q = 0.0;
    for (const Scenario& s : set.scenarios)
        for (std::size_t i = 0; i < s.size(); ++i) {
            e += s.probability * s.induction[i];
            q += s.probability * s.turnover[i];
        }
    if (!(e > 0)) throw ValidationError("induction durations must be positive");
    return q / e;
}

ScenarioSet scale_turnover(const ScenarioSet& set, double ratio) {
    if (!(ratio > 0)) throw ValidationError("turnover ratio must be positive");
    double factor = ratio / turnover_induction_ratio(set);
    ScenarioSet out = set;
    for (Scenario& s : out.scenarios)
        for (auto& q : s.turnover) q *= factor;
    return out;
}

void validate_scenarios(const Instance& instance, const ScenarioSet& set) {
    if (set.scenarios.empty()) throw ValidationError("scenario set is empty");
    double ptotal = 0.0;
    for (std::size_t w = 0; w < set.size(); ++w) {
        const Scenario& s = set.scenarios[w];
        std::string where = "scenario " + std::to_string(w);
        if (s.induction.size() != instance.size() || s.surgery.size() != instance.size() ||
            s.turnover.size() != instance.size())
            throw ValidationError(where + ": duration vectors must have one entry per patient");
        for (std::size_t i = 0; i < instance.size(); ++i)
            if (!(s.induction[i] > 0) || !(s.surgery[i] > 0) || !(s.turnover[i] >= 0))
                throw ValidationError(where + ": durations must be positive");
        if (!(s.probability > 0)) throw ValidationError(where + ": probability must be positive");
        ptotal += s.probability;
    }
    if (std::abs(ptotal - 1.0) > 1e-9) throw ValidationError("scenario probabilities must sum to 1");
}

}  // namespace ppsched
