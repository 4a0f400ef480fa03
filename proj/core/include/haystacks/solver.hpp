#pragma once

#include <cstdint>
#include <vector>

namespace haystacks {

// Incremental CDCL solver: watched-literal propagation, first-UIP
// learning with basic clause minimization, activity-based branching
// (ties broken by variable index, so runs are deterministic), Luby
// restarts and periodic learnt-clause reduction. Assumption solving
// yields failed-assumption sets for unsat-core extraction.
//
// Literals use the DIMACS convention: +v / -v with 1-based variables.
// An instance accumulates clauses across solve() calls; it is not
// shareable between threads.
class Solver {
public:
    enum class Result { Sat, Unsat, Unknown };

    struct Stats {
        std::uint64_t decisions = 0;
        std::uint64_t conflicts = 0;
        std::uint64_t propagations = 0;
    };

    Solver();
    ~Solver();
    Solver(const Solver&) = delete;
    Solver& operator=(const Solver&) = delete;

    int new_var();  // 1-based
    int num_vars() const { return nvars_; }

    // Clauses over existing variables; empty/false clauses make the
    // instance permanently unsat.
    void add_clause(const std::vector<int>& dimacs_lits);

    // -1 means unlimited; 0 seconds means no timeout.
    void set_conflict_budget(std::int64_t conflicts) { conflict_budget_ = conflicts; }
    void set_timeout(double seconds) { timeout_s_ = seconds; }

    Result solve(const std::vector<int>& assumptions = {});

    // After Sat: truth value of a variable in the found model.
    bool model_value(int var) const;
    // After Unsat under assumptions: the subset of assumption literals
    // that were jointly inconsistent (empty when unsat outright).
    const std::vector<int>& failed_assumptions() const { return conflict_; }

    const Stats& stats() const { return stats_; }

private:
    struct Clause;

    // internal literal encoding: 2*v (positive) / 2*v+1 (negative), v 0-based
    static int ilit(int dimacs) {
        int v = dimacs > 0 ? dimacs : -dimacs;
        return 2 * (v - 1) + (dimacs < 0 ? 1 : 0);
    }
    static int to_dimacs(int l) { return (l & 1) ? -(l / 2 + 1) : l / 2 + 1; }
    static int neg(int l) { return l ^ 1; }
    static int var_of(int l) { return l >> 1; }

    int value_lit(int l) const;
    void enqueue(int l, Clause* from);
    Clause* propagate();
    void analyze(Clause* confl, std::vector<int>& out_learnt, int& out_btlevel);
    void analyze_final(int p, std::vector<int>& out);
    void cancel_until(int level);
    void new_decision_level();
    int decision_level() const;
    int pick_branch();
    void attach(Clause* c);
    void bump_var(int v);
    void bump_clause(Clause* c);
    void decay_activities();
    void reduce_db();
    bool locked(Clause* c) const;

    int nvars_ = 0;
    bool ok_ = true;
    std::int64_t conflict_budget_ = -1;
    double timeout_s_ = 0.0;

    std::vector<signed char> assigns_;   // per var: 0 undef, 1 true, -1 false
    std::vector<signed char> polarity_;  // saved phase, 1 = negative next time
    std::vector<int> level_;
    std::vector<Clause*> reason_;
    std::vector<int> trail_;
    std::vector<int> trail_lim_;
    std::size_t qhead_ = 0;

    std::vector<std::vector<Clause*>> watches_;  // indexed by internal lit
    std::vector<Clause*> clauses_;
    std::vector<Clause*> learnts_;

    std::vector<double> activity_;
    double var_inc_ = 1.0;
    double cla_inc_ = 1.0;

    std::vector<signed char> seen_;
    std::vector<int> heap_;      // max-heap of vars by (activity, -index)
    std::vector<int> heap_pos_;  // -1 when absent

    std::vector<signed char> model_;
    std::vector<int> conflict_;

    Stats stats_;

    // heap helpers
    bool heap_lt(int a, int b) const;
    void heap_up(int i);
    void heap_down(int i);
    void heap_insert(int v);
    int heap_pop();
    void heap_update(int v);
};

}  // namespace haystacks
