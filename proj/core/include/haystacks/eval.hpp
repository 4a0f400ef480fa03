#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "haystacks/haystack.hpp"

namespace haystacks {

// Which wording the retrieval prompt uses. The primary template asks for
// line identifiers between <answer> tags; the legacy variant asks for
// bare comma-separated line ids.
enum class PromptTemplate { Primary, Legacy };

struct PromptRecord {
    std::string example_id;
    HaystackMode mode = HaystackMode::Standard;
    int n = 0;
    int k = 0;
    std::string text;
    std::vector<int> gold;  // sorted line indices

    nlohmann::json to_json() const;
    static PromptRecord from_json(const nlohmann::json& j);
};

// Pure template instantiation. Embedded mode drops the hypothesis block
// and asks for mutually contradicting lines instead.
PromptRecord render_prompt(const HaystackExample& example,
                           PromptTemplate tmpl = PromptTemplate::Primary);

enum class ParseStatus { Ok, NoTags, Empty, MalformedTokens };

const char* to_string(ParseStatus s);
ParseStatus parse_status_from_string(const std::string& s);

struct ParsedAnswer {
    std::set<int> ids;  // line indices
    ParseStatus status = ParseStatus::Ok;
};

// Total: every input yields a set and a status. First <answer> span wins;
// without tags the whole text is scanned for L-ids.
ParsedAnswer parse_answer(const std::string& raw);

// Exact Jaccard similarity as a reduced fraction.
struct Rational {
    long long num = 0;
    long long den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rational&) const = default;
};

// |pred ∩ gold| / |pred ∪ gold|. Gold must be non-empty.
Rational score(const std::set<int>& pred, const std::set<int>& gold);

struct EvalRecord {
    std::string example_id;
    std::string model;
    HaystackMode mode = HaystackMode::Standard;
    int n = 0;
    int k = 0;
    std::string raw_output;
    std::set<int> prediction;
    std::vector<int> gold;
    Rational jaccard;
    ParseStatus parse_status = ParseStatus::Ok;
    bool transport_error = false;

    nlohmann::json to_json() const;
    static EvalRecord from_json(const nlohmann::json& j);
};

struct AggregateCell {
    std::string model;
    std::string mode;
    int n = 0;
    int k = 0;
    int count = 0;             // scored records
    int parse_failures = 0;    // status != ok
    int transport_errors = 0;  // excluded from the mean
    double mean_jaccard = 0.0;
};

// Mean Jaccard per (model, mode, n, k); transport errors are tallied but
// never averaged. Cells without records simply do not appear.
std::vector<AggregateCell> aggregate(const std::vector<EvalRecord>& records);

// Tab-separated table, one header line then one line per cell.
std::string render_report(const std::vector<AggregateCell>& cells);

void write_records(const std::string& path, const std::vector<EvalRecord>& records);
std::vector<EvalRecord> read_records(const std::string& path);

void write_prompts(const std::string& path, const std::vector<PromptRecord>& prompts);
std::vector<PromptRecord> read_prompts(const std::string& path);

}  // namespace haystacks
