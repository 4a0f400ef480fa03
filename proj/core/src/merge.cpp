#include "haystacks/merge.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "haystacks/rng.hpp"
#include "haystacks/util.hpp"

namespace haystacks {

void StageConfig::validate() const {
    if (formulas_per_stage < 2)
        throw MergeError("K must be >= 2");
    if (base_size < 1)
        throw MergeError("base size must be >= 1");
    if (max_stage < 0)
        throw MergeError("max stage must be >= 0");
    if (max_failure_ratio < 0.0 || max_failure_ratio > 1.0)
        throw MergeError("failure ratio must be in [0,1]");
}

nlohmann::json StageFormula::to_json() const {
    nlohmann::json j;
    j["stage"] = stage;
    j["digest"] = model_digest;
    auto arr = nlohmann::json::array();
    for (const auto& c : clauses)
        arr.push_back(c.to_json());
    j["clauses"] = arr;
    return j;
}

StageFormula StageFormula::from_json(const nlohmann::json& j) {
    StageFormula f;
    f.stage = j.at("stage").get<int>();
    f.model_digest = j.at("digest").get<std::uint64_t>();
    for (const auto& c : j.at("clauses"))
        f.clauses.push_back(SourcedClause::from_json(c));
    return f;
}

nlohmann::json RemovalEvent::to_json() const {
    nlohmann::json j;
    j["removed"] = removed_id;
    j["core"] = core_ids;
    return j;
}

RemovalEvent RemovalEvent::from_json(const nlohmann::json& j) {
    RemovalEvent e;
    e.removed_id = j.at("removed").get<int>();
    e.core_ids = j.at("core").get<std::vector<int>>();
    return e;
}

MergeOutcome satisfiable_merge(const StageFormula& a, const StageFormula& b,
                               const Domain& domain, std::uint64_t seed,
                               const SolveLimits& budget) {
    if (a.stage != b.stage)
        throw MergeError("cannot merge formulas from different stages");

    // concatenated clause list with ids 0..n-1
    std::vector<SourcedClause> pool;
    pool.reserve(a.clauses.size() + b.clauses.size());
    for (const auto& c : a.clauses)
        pool.push_back(c);
    for (const auto& c : b.clauses)
        pool.push_back(c);
    for (std::size_t i = 0; i < pool.size(); ++i)
        pool[i].id = static_cast<int>(i);

    std::vector<std::pair<int, FormulaPtr>> formulas;
    formulas.reserve(pool.size());
    for (const auto& c : pool)
        formulas.emplace_back(c.id, c.formula);

    MergeOutcome out;
    GroundCNF cnf = ground(formulas, domain);
    SourceSolver solver(cnf);
    std::set<int> active;
    for (const auto& c : pool)
        active.insert(c.id);

    auto rng = make_rng(seed);
    while (true) {
        SatVerdict v;
        try {
            v = solver.solve(active, budget);
        } catch (const SolverBudgetExceeded& e) {
            out.ok = false;
            out.failure = e.what();
            return out;
        }
        if (v.sat()) {
            out.merged.model_digest = model_digest(v.model);
            break;
        }
        if (v.core.empty()) {
            out.ok = false;
            out.failure = "unsat with empty core";
            return out;
        }
        std::vector<int> core(v.core.begin(), v.core.end());
        int pick = core[std::uniform_int_distribution<std::size_t>(0, core.size() - 1)(rng)];
        active.erase(pick);
        out.removals.push_back({pick, std::move(core)});
    }

    out.ok = true;
    out.merged.stage = a.stage + 1;
    for (const auto& c : pool)
        if (active.count(c.id))
            out.merged.clauses.push_back(c);
    for (std::size_t i = 0; i < out.merged.clauses.size(); ++i) {
        out.merged.clauses[i].id = static_cast<int>(i);
        out.merged.clauses[i].stage = out.merged.stage;
    }
    return out;
}

LadderResult run_ladder(const StageConfig& cfg, const Domain& domain,
                        std::vector<StageFormula> bases) {
    cfg.validate();
    if (static_cast<int>(bases.size()) != cfg.formulas_per_stage)
        throw MergeError("expected K base formulas");
    for (const auto& f : bases)
        if (f.stage != 0)
            throw MergeError("bases must be stage 0");

    LadderResult result;
    result.stages.push_back(std::move(bases));

    for (int stage = 0; stage < cfg.max_stage; ++stage) {
        const auto& prev = result.stages.back();
        if (prev.size() < 2)
            throw MergeError("fewer than two formulas left, cannot pair");
        const int k = cfg.formulas_per_stage;
        auto pair_rng = make_rng(derive_seed(cfg.seed, "ladder-pairs", stage));
        std::vector<std::pair<int, int>> pairs;
        pairs.reserve(k);
        std::uniform_int_distribution<int> pick(0, static_cast<int>(prev.size()) - 1);
        for (int m = 0; m < k; ++m) {
            int ia = pick(pair_rng);
            int ib = pick(pair_rng);
            while (ib == ia)
                ib = pick(pair_rng);
            pairs.emplace_back(ia, ib);
        }

        std::vector<MergeOutcome> outcomes(k);
        parallel_for(k, cfg.workers, [&](int m) {
            auto [ia, ib] = pairs[m];
            outcomes[m] = satisfiable_merge(prev[ia], prev[ib], domain,
                                            derive_seed(cfg.seed, "merge", stage * 1000003ull + m),
                                            cfg.per_check_budget);
        });

        std::vector<StageFormula> next;
        std::vector<MergeRecord> log;
        int failures = 0;
        for (int m = 0; m < k; ++m) {
            MergeRecord rec;
            rec.pair_a = pairs[m].first;
            rec.pair_b = pairs[m].second;
            rec.ok = outcomes[m].ok;
            rec.removals = outcomes[m].removals;
            log.push_back(std::move(rec));
            if (!outcomes[m].ok) {
                ++failures;
                continue;
            }
            next.push_back(std::move(outcomes[m].merged));
        }
        if (failures > cfg.max_failure_ratio * k) {
            std::ostringstream os;
            os << "ladder abort at stage " << stage + 1 << ": " << failures << "/" << k
               << " merges failed";
            throw MergeError(os.str());
        }
        result.merge_logs.push_back(std::move(log));
        result.stages.push_back(std::move(next));
    }
    return result;
}

void write_stage_file(const std::string& path, const std::vector<StageFormula>& formulas) {
    std::ostringstream os;
    for (const auto& f : formulas)
        os << f.to_json().dump() << "\n";
    atomic_write_file(path, os.str());
}

std::vector<StageFormula> read_stage_file(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<StageFormula> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        try {
            out.push_back(StageFormula::from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw MergeError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace haystacks
