#include "haystacks/sat.hpp"

#include <chrono>

#include "haystacks/rng.hpp"

namespace haystacks {

std::uint64_t model_digest(const std::map<std::string, bool>& model) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& [atom, val] : model) {
        h = fnv1a64(atom, h);
        h = fnv1a64_mix(h, val ? 1 : 0);
    }
    return h;
}

SourceSolver::SourceSolver(const GroundCNF& cnf) : cnf_(cnf) {
    for (int v = 0; v < cnf.num_vars; ++v)
        solver_.new_var();
    for (const auto& c : cnf.clauses)
        for (int s : c.sources)
            sources_.insert(s);
    for (int s : sources_) {
        int v = solver_.new_var();
        activation_[s] = v;
        source_of_var_[v] = s;
    }
    for (const auto& c : cnf.clauses) {
        std::vector<int> lits = c.lits;
        for (int s : c.sources)
            lits.push_back(-activation_[s]);
        solver_.add_clause(lits);
    }
}

SatVerdict SourceSolver::solve(const std::set<int>& active_ids, const SolveLimits& limits) {
    std::vector<int> assumps;
    assumps.reserve(active_ids.size());
    for (int s : active_ids) {
        auto it = activation_.find(s);
        if (it == activation_.end())
            throw std::invalid_argument("unknown source id: " + std::to_string(s));
        assumps.push_back(it->second);
    }
    solver_.set_conflict_budget(limits.max_conflicts);
    solver_.set_timeout(limits.timeout_s);

    const auto t0 = std::chrono::steady_clock::now();
    const auto before = solver_.stats();
    Solver::Result r = solver_.solve(assumps);
    const auto after = solver_.stats();
    last_stats_.decisions = after.decisions - before.decisions;
    last_stats_.conflicts = after.conflicts - before.conflicts;
    last_stats_.propagations = after.propagations - before.propagations;
    last_stats_.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    if (r == Solver::Result::Unknown)
        throw SolverBudgetExceeded("solver budget exhausted");

    SatVerdict out;
    if (r == Solver::Result::Sat) {
        out.verdict = SatVerdict::V::Sat;
        for (const auto& [atom, var] : cnf_.var_of_atom)
            out.model[atom] = solver_.model_value(var);
    } else {
        out.verdict = SatVerdict::V::Unsat;
        for (int lit : solver_.failed_assumptions()) {
            int var = lit > 0 ? lit : -lit;
            auto it = source_of_var_.find(var);
            if (it != source_of_var_.end())
                out.core.insert(it->second);
        }
    }
    return out;
}

SatVerdict SourceSolver::solve_all(const SolveLimits& limits) {
    return solve(sources_, limits);
}

std::pair<SatVerdict, SolveStats> solve(const GroundCNF& cnf, const SolveLimits& limits) {
    SourceSolver s(cnf);
    SatVerdict v = s.solve_all(limits);
    return {std::move(v), s.last_stats()};
}

std::vector<std::vector<bool>> enumerate_models(const GroundCNF& cnf, std::size_t limit) {
    if (cnf.num_vars > 24)
        throw std::invalid_argument("enumeration guard: more than 24 variables");
    std::vector<std::vector<bool>> models;
    const int n = cnf.num_vars;
    for (std::uint64_t m = 0; m < (1ull << n); ++m) {
        bool ok = true;
        for (const auto& c : cnf.clauses) {
            bool sat = false;
            for (int l : c.lits) {
                int v = l > 0 ? l : -l;
                bool val = (m >> (v - 1)) & 1;
                if ((l > 0) == val) {
                    sat = true;
                    break;
                }
            }
            if (!sat) {
                ok = false;
                break;
            }
        }
        if (ok) {
            std::vector<bool> model(n + 1, false);
            for (int v = 1; v <= n; ++v)
                model[v] = (m >> (v - 1)) & 1;
            models.push_back(std::move(model));
            if (models.size() >= limit)
                break;
        }
    }
    return models;
}

bool is_core_valid(const GroundCNF& cnf, const std::set<int>& core, const SolveLimits& limits) {
    SourceSolver s(cnf);
    for (int id : core)
        if (!s.source_ids().count(id))
            throw std::invalid_argument("core id not present in CNF sources: " +
                                        std::to_string(id));
    return !s.solve(core, limits).sat();
}

}  // namespace haystacks
