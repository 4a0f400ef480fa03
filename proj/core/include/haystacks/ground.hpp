#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "haystacks/logic.hpp"

namespace haystacks {

// One propositional clause, DIMACS-style signed literals over 1-based
// variables. `sources` lists the source-clause ids the clause derives
// from; Tseitin definition clauses keep the id of the formula they encode.
struct GroundClause {
    std::vector<int> lits;
    std::vector<int> sources;
    bool tseitin = false;
};

struct GroundCNF {
    int num_vars = 0;
    std::vector<std::string> atom_of_var;            // index 0 unused; "" for aux vars
    std::unordered_map<std::string, int> var_of_atom;
    std::vector<GroundClause> clauses;

    int intern_atom(const std::string& name);
    int fresh_aux();
};

// Grounds the conjunction of source-tagged formulas over the finite
// roster. Quantifiers expand over every roster member (everyone on the
// roster is in the room by construction). Equisatisfiable via full
// biconditional Tseitin, so model counts over the ground atoms are
// preserved. Deterministic for a fixed input order.
//
// AtLeastK is supported in positive root position only (the grammar never
// nests it); the at-least-k constraint over the roster instances expands
// to all (n-k+1)-subset clauses over per-instance definition literals.
GroundCNF ground(const std::vector<std::pair<int, FormulaPtr>>& formulas,
                 const Domain& domain, int max_depth = 6);

// Adds more source-tagged formulas to an existing grounding, sharing the
// atom table. Source ids may not collide with existing ones.
void ground_into(GroundCNF& cnf, const std::vector<std::pair<int, FormulaPtr>>& formulas,
                 const Domain& domain, int max_depth = 6);

// Ground-atom name, e.g. "rich(mary)" or "tower_leans".
std::string ground_atom_name(const std::string& pred, const std::vector<std::string>& args);

std::string to_dimacs(const GroundCNF& cnf);

}  // namespace haystacks
