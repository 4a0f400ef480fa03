#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "haystacks/grammar.hpp"
#include "haystacks/merge.hpp"
#include "haystacks/sat.hpp"

namespace haystacks {

enum class PairLabel { Contradiction, Entailment, Neutral, Unknown };

const char* to_string(PairLabel l);

// A contradiction example whose evidence set is certified sufficient and
// necessary: the evidence with the hypothesis is unsatisfiable, and
// dropping any single evidence clause restores satisfiability. The
// certificates are model digests of those counterfactual solves.
struct CertifiedExample {
    int premise_index = 0;
    int hypothesis_index = 0;
    std::vector<SourcedClause> premise;  // ids 0..n-1
    SourcedClause hypothesis;
    std::vector<int> evidence;                   // sorted premise ids
    std::vector<std::uint64_t> certificates;     // parallel to evidence

    nlohmann::json to_json() const;
    static CertifiedExample from_json(const nlohmann::json& j);
};

// contradiction iff premise ∧ h is UNSAT; else entailment iff
// premise ∧ ¬h is UNSAT; else neutral. Unknown on budget exhaustion.
PairLabel label_pair(const std::vector<SourcedClause>& premise, const SourcedClause& hypothesis,
                     const Domain& domain, const SolveLimits& limits = {});

// Premise-side ids of the unsat core of premise ∧ hypothesis.
// Precondition: the pair is a contradiction.
std::set<int> sufficient_evidence(const std::vector<SourcedClause>& premise,
                                  const SourcedClause& hypothesis, const Domain& domain,
                                  const SolveLimits& limits = {});

struct CertifyOutcome {
    bool accepted = false;
    int failed_evidence = -1;  // first non-necessary clause id, -1 if none
    std::string reason;
    std::vector<std::uint64_t> certificates;
};

// Counterfactual check: every evidence clause must be necessary.
CertifyOutcome certify_necessity(const std::vector<SourcedClause>& premise,
                                 const SourcedClause& hypothesis,
                                 const std::set<int>& evidence, const Domain& domain,
                                 const SolveLimits& limits = {});

struct MineConfig {
    int hypotheses_per_premise = 32;
    std::uint64_t seed = 1;
    double reuse_prob = 0.9;  // draw hypothesis symbols from the premise
    int min_evidence = 1;
    int max_evidence = 3;
    SolveLimits budget;
    int max_examples = -1;  // -1 = unlimited
    int workers = 1;
};

// Samples hypotheses per premise, filters same-surface hypotheses,
// labels, extracts cores and keeps certified contradictions with
// 1..3 necessary evidences. Deterministic for a fixed seed.
std::vector<CertifiedExample> mine(const std::vector<StageFormula>& premises,
                                   const ClauseGrammar& grammar, const MineConfig& cfg);

}  // namespace haystacks
