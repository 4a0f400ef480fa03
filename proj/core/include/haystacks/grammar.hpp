#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "haystacks/logic.hpp"

namespace haystacks {

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Predicate lexicon entry: symbol plus the positive/negative surface
// phrases that follow the subject ("is a night owl" / "is not a night
// owl"). Propositional entries hold full sentences without the final
// period; binary phrases are completed by an object name.
struct PredEntry {
    std::string symbol;
    std::string positive;
    std::string negative;
};

struct Lexicon {
    std::vector<std::string> names;  // English capitalized form
    std::vector<PredEntry> unary;
    std::vector<PredEntry> binary;
    std::vector<PredEntry> propositional;

    static const Lexicon& builtin();
    static std::vector<std::string> load_names(const std::string& path);
    // line format: symbol|positive phrase|negative phrase
    static std::vector<PredEntry> load_predicates(const std::string& path);
};

std::string constant_of_name(const std::string& english_name);

enum class ClauseCategory {
    Fact,
    NegatedFact,
    GuardedConditional,
    GuardedBiconditional,
    Existential,
    AtLeastK,
    RelationalFact,
    PropositionalCompound,
};

struct GrammarConfig {
    std::uint64_t seed = 1;
    int name_budget = 78;
    int unary_budget = 52;
    int binary_budget = 13;
    int propositional_budget = 13;
    std::map<std::string, double> category_weights;  // empty = uniform
    int max_depth = 6;
    Lexicon lexicon = Lexicon::builtin();

    void validate() const;  // throws GenerationError
};

// One premise line: English surface paired with its formula. `stage` is
// the merge stage the clause was produced at; `origin` tracks the
// stage-0 lineage through merges.
struct SourcedClause {
    int id = 0;
    std::string english;
    FormulaPtr formula;
    int stage = 0;
    std::string origin;

    nlohmann::json to_json() const;
    static SourcedClause from_json(const nlohmann::json& j);
};

// Symbols available for hypothesis sampling biased toward a premise.
struct SymbolPool {
    std::vector<std::string> names;
    std::vector<std::string> unary;
    std::vector<std::string> binary;
    std::vector<std::string> propositional;
};

// A quantifier-body literal: unary predicate of the bound person, or a
// binary predicate with a constant object; optionally negated.
struct PredLitSpec {
    std::string symbol;
    bool negated = false;
    std::string object;  // English name, empty for unary
};

enum class PropConnective { Or, Xor, Iff, And };

class ClauseGrammar {
public:
    explicit ClauseGrammar(GrammarConfig cfg);

    const Domain& domain() const { return domain_; }
    const GrammarConfig& config() const { return cfg_; }

    // One clause; category drawn by the configured weights unless forced.
    SourcedClause generate_clause(std::mt19937_64& rng,
                                  std::optional<ClauseCategory> forced = std::nullopt) const;

    // n distinct-surface clauses with stage 0 and ids 0..n-1.
    std::vector<SourcedClause> generate_base_formula(int n, std::uint64_t seed) const;

    // A (possibly negated) single atom with its surface. With a pool,
    // symbols are drawn from it with probability reuse_prob.
    SourcedClause sample_hypothesis(std::mt19937_64& rng, const SymbolPool* pool = nullptr,
                                    double reuse_prob = 0.0) const;

    // Names and predicate symbols occurring in a clause set.
    SymbolPool collect_symbols(const std::vector<SourcedClause>& clauses) const;

    // Deterministic builders behind the random draws; also the fixed
    // realization scheme the golden-pair tests pin down.
    SourcedClause unary_fact(const std::string& name, const std::string& symbol,
                             bool negated) const;
    SourcedClause relational_fact(const std::string& subject, const std::string& symbol,
                                  const std::string& object, bool negated) const;
    SourcedClause propositional_fact(const std::string& symbol, bool negated) const;
    SourcedClause guarded_conditional(const PredLitSpec& antecedent,
                                      const PredLitSpec& consequent) const;
    SourcedClause guarded_biconditional(const PredLitSpec& antecedent,
                                        const PredLitSpec& consequent) const;
    SourcedClause existential_clause(const PredLitSpec& lit) const;
    SourcedClause at_least_clause(int k, const PredLitSpec& lit) const;
    SourcedClause prop_compound(const std::string& a_symbol, bool a_negated,
                                PropConnective conn, const std::string& b_symbol,
                                bool b_negated) const;

private:
    GrammarConfig cfg_;
    Domain domain_;
    std::map<std::string, const PredEntry*> unary_of_, binary_of_, prop_of_;

    const PredEntry& entry(const std::map<std::string, const PredEntry*>& idx,
                           const std::string& symbol) const;
    std::string lit_phrase(const PredLitSpec& l) const;
    FormulaPtr lit_formula(const PredLitSpec& l) const;

    ClauseCategory draw_category(std::mt19937_64& rng) const;
    PredLitSpec draw_pred_lit(std::mt19937_64& rng) const;
    const std::string& draw_name(std::mt19937_64& rng) const;
};

}  // namespace haystacks
