#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "haystacks/grammar.hpp"
#include "haystacks/sat.hpp"

namespace haystacks {

struct MergeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StageConfig {
    int formulas_per_stage = 64;  // K
    int base_size = 32;
    int max_stage = 7;  // base 32 doubled 7 times = 4096
    std::uint64_t seed = 1;
    SolveLimits per_check_budget;  // applies to every solve in the loop
    double max_failure_ratio = 0.10;
    int workers = 1;

    void validate() const;
};

// A satisfiable conjunction at some ladder stage. The digest is the
// model fingerprint from the certifying solve.
struct StageFormula {
    int stage = 0;
    std::vector<SourcedClause> clauses;
    std::uint64_t model_digest = 0;

    nlohmann::json to_json() const;
    static StageFormula from_json(const nlohmann::json& j);
};

// One proof-guided deletion during a merge: `removed_id` indexes the
// concatenated clause list (a followed by b), `core_ids` is the unsat
// core reported at that step.
struct RemovalEvent {
    int removed_id = 0;
    std::vector<int> core_ids;

    nlohmann::json to_json() const;
    static RemovalEvent from_json(const nlohmann::json& j);
};

struct MergeOutcome {
    bool ok = false;
    std::string failure;  // set when !ok
    StageFormula merged;
    std::vector<RemovalEvent> removals;
};

// Concatenates two same-stage satisfiable formulas, then removes one
// uniformly sampled core clause at a time until the conjunction solves
// SAT. Clause ids are re-assigned contiguously; stage-0 lineage stays in
// `origin`.
MergeOutcome satisfiable_merge(const StageFormula& a, const StageFormula& b,
                               const Domain& domain, std::uint64_t seed,
                               const SolveLimits& budget = {});

struct MergeRecord {
    int pair_a = 0;
    int pair_b = 0;
    bool ok = false;
    std::vector<RemovalEvent> removals;
};

struct LadderResult {
    std::vector<std::vector<StageFormula>> stages;     // [0] = bases
    std::vector<std::vector<MergeRecord>> merge_logs;  // per produced stage
};

// Full stage ladder: per stage, K pairs sampled with replacement
// (self-pairing excluded), merged, and carried to the next stage.
// Aborts when more than max_failure_ratio of a stage's merges fail.
LadderResult run_ladder(const StageConfig& cfg, const Domain& domain,
                        std::vector<StageFormula> bases);

// Stage checkpoint files: one StageFormula JSON record per line.
void write_stage_file(const std::string& path, const std::vector<StageFormula>& formulas);
std::vector<StageFormula> read_stage_file(const std::string& path);

}  // namespace haystacks
