#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "haystacks/client.hpp"
#include "haystacks/eval.hpp"
#include "haystacks/grammar.hpp"
#include "haystacks/haystack.hpp"
#include "haystacks/merge.hpp"
#include "haystacks/mine.hpp"

namespace haystacks {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a subcommand runs before the one producing its input.
struct MissingPrerequisite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised by the audit pass; message names the offending example.
struct AuditError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Whole-run configuration. The global seed fans out to per-step seeds
// through labeled hashing, so steps are independently reproducible.
struct RunConfig {
    std::uint64_t seed = 1;
    int workers = 1;
    std::string workdir = "work";

    GrammarConfig grammar;
    StageConfig stage;
    MineConfig mine;

    std::vector<int> sizes = {8, 16, 32, 64, 128, 256};
    int quota = 200;  // examples per (size, k, mode) cell
    std::string corpus_path;
    PromptTemplate prompt_template = PromptTemplate::Primary;
    std::vector<EndpointConfig> endpoints;

    void validate() const;  // throws ConfigError with a field name

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::string& path);
};

// Workdir layout helpers.
std::string stage_path(const std::string& workdir, int stage);
std::string merge_log_path(const std::string& workdir, int stage);
std::string certified_path(const std::string& workdir);
std::string dataset_path(const std::string& workdir, HaystackMode mode);
std::string prompts_path(const std::string& workdir);
std::string records_path(const std::string& workdir, const std::string& endpoint_name);
std::string report_path(const std::string& workdir);

// Each step is idempotent: when its outputs already exist it returns
// false without recomputation, otherwise it produces them and returns
// true. Missing inputs raise MissingPrerequisite naming the prior step.
bool run_gen_base(const RunConfig& cfg);
bool run_merge(const RunConfig& cfg);
bool run_mine(const RunConfig& cfg);
bool run_assemble(const RunConfig& cfg, HaystackMode mode);
bool run_pad(const RunConfig& cfg);
bool run_prompt(const RunConfig& cfg);
bool run_query(const RunConfig& cfg, const std::string& endpoint_name);
bool run_score(const RunConfig& cfg, const std::string& endpoint_name);
bool run_report(const RunConfig& cfg);

// Re-certifies every released example from provenance: schema shape,
// gold/evidence correspondence, contradiction label, sufficiency and
// necessity. Throws AuditError naming the first violating example.
void run_audit(const RunConfig& cfg);

}  // namespace haystacks
