#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "haystacks/ground.hpp"
#include "haystacks/solver.hpp"

namespace haystacks {

struct SolverBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SatVerdict {
    enum class V { Sat, Unsat };
    V verdict;
    // SAT: ground-atom truth assignment
    std::map<std::string, bool> model;
    // UNSAT: source-clause ids of a (not necessarily minimal) core
    std::set<int> core;

    bool sat() const { return verdict == V::Sat; }
};

struct SolveStats {
    std::uint64_t decisions = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t propagations = 0;
    double wall_ms = 0.0;
};

struct SolveLimits {
    std::int64_t max_conflicts = -1;  // unlimited
    double timeout_s = 0.0;           // none
};

// FNV digest of a model (sorted atom=value lines); used as the
// satisfiability certificate stored with stage formulas.
std::uint64_t model_digest(const std::map<std::string, bool>& model);

// Repeated source-restricted solving over one grounding. One activation
// variable per source clause; restriction passes only the active ids as
// assumptions, so failed assumptions map straight back to source ids.
// Not shareable across threads.
class SourceSolver {
public:
    explicit SourceSolver(const GroundCNF& cnf);

    // Active set given explicitly. Throws SolverBudgetExceeded on a
    // budget/timeout "unknown" outcome; never returns a wrong verdict.
    SatVerdict solve(const std::set<int>& active_ids, const SolveLimits& limits = {});
    SatVerdict solve_all(const SolveLimits& limits = {});

    const std::set<int>& source_ids() const { return sources_; }
    SolveStats last_stats() const { return last_stats_; }

private:
    const GroundCNF& cnf_;
    Solver solver_;
    std::set<int> sources_;
    std::map<int, int> activation_;     // source id -> activation var
    std::map<int, int> source_of_var_;  // activation var -> source id
    SolveStats last_stats_;
};

// One-shot decision with core extraction at source granularity.
std::pair<SatVerdict, SolveStats> solve(const GroundCNF& cnf, const SolveLimits& limits = {});

// Exhaustive enumeration oracle. Refuses instances over 24 variables.
// Returns complete assignments indexed by variable (slot 0 unused).
std::vector<std::vector<bool>> enumerate_models(const GroundCNF& cnf,
                                                std::size_t limit = SIZE_MAX);

// True iff the clauses sourced entirely within `core` are unsatisfiable.
bool is_core_valid(const GroundCNF& cnf, const std::set<int>& core,
                   const SolveLimits& limits = {});

}  // namespace haystacks
