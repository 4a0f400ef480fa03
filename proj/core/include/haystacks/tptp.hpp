#pragma once

#include <string>
#include <utility>
#include <vector>

#include "haystacks/logic.hpp"

namespace haystacks {

// Renders a TPTP FOF problem: one axiom per source clause (named c{id}),
// plus room membership, pairwise distinctness and domain closure axioms
// for the roster. Byte-identical output for identical input, so external
// prover runs are reproducible.
std::string emit_tptp(const std::vector<std::pair<int, FormulaPtr>>& formulas,
                      const Domain& domain);

}  // namespace haystacks
