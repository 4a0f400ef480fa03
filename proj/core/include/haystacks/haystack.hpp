#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "haystacks/mine.hpp"

namespace haystacks {

struct DatasetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class HaystackMode { Standard, Padded, Embedded };

const char* to_string(HaystackMode m);
HaystackMode mode_from_string(const std::string& s);

// Lineage back to the certified example, enabling re-certification:
// clause_ids[i] is the certified-premise clause id behind line i
// (-1 for an embedded hypothesis line).
struct Provenance {
    int premise_index = 0;
    int hypothesis_index = 0;
    int stage = 0;
    std::uint64_t seed = 0;
    std::vector<int> clause_ids;
};

struct HaystackExample {
    std::string id;
    HaystackMode mode = HaystackMode::Standard;
    int n = 0;  // line count
    int k = 0;  // gold size
    std::vector<std::string> lines;  // line i renders as "L{i}: {text}"
    std::string hypothesis;          // stored in every mode
    std::vector<int> gold;           // sorted line indices
    Provenance prov;

    nlohmann::json to_json() const;
    static HaystackExample from_json(const nlohmann::json& j);
};

struct PaddingCorpus {
    std::vector<std::string> sentences;
};

// Keeps every evidence clause plus n-|evidence| uniformly sampled
// distractors, preserving the original clause order.
HaystackExample subsample(const CertifiedExample& example, int n, std::uint64_t seed);

// Replaces every non-gold line with a distinct corpus sentence; gold
// lines and all positions are untouched.
HaystackExample pad_with_corpus(const HaystackExample& example, const PaddingCorpus& corpus,
                                std::uint64_t seed);

// Inserts the hypothesis at a uniformly random line and adds it to gold.
HaystackExample embed_hypothesis(const HaystackExample& example, std::uint64_t seed);

// Rule-based splitter: terminal punctuation followed by whitespace and a
// capital, with an abbreviation guard; fragments under 3 words dropped.
PaddingCorpus split_sentences(const std::string& text);

// Line-delimited JSON records, schema-versioned, atomic write.
void write_dataset(const std::string& path, const std::vector<HaystackExample>& examples);
std::vector<HaystackExample> read_dataset(const std::string& path);

inline std::string line_id(int i) { return "L" + std::to_string(i); }

}  // namespace haystacks
