#include "haystacks/grammar.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "haystacks/rng.hpp"

namespace haystacks {

namespace {

constexpr std::array<std::pair<const char*, ClauseCategory>, 8> kCategories{{
    {"facts", ClauseCategory::Fact},
    {"negated_facts", ClauseCategory::NegatedFact},
    {"guarded_conditionals", ClauseCategory::GuardedConditional},
    {"guarded_biconditionals", ClauseCategory::GuardedBiconditional},
    {"existentials", ClauseCategory::Existential},
    {"at_least_k", ClauseCategory::AtLeastK},
    {"relational_facts", ClauseCategory::RelationalFact},
    {"propositional_compounds", ClauseCategory::PropositionalCompound},
}};

int draw_index(std::mt19937_64& rng, int n) {
    return static_cast<int>(std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng));
}

bool draw_prob(std::mt19937_64& rng, double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

}  // namespace

void GrammarConfig::validate() const {
    if (name_budget < 1 || unary_budget < 1 || binary_budget < 1 || propositional_budget < 1)
        throw GenerationError("lexicon budgets must be >= 1");
    if (name_budget > static_cast<int>(lexicon.names.size()) ||
        unary_budget > static_cast<int>(lexicon.unary.size()) ||
        binary_budget > static_cast<int>(lexicon.binary.size()) ||
        propositional_budget > static_cast<int>(lexicon.propositional.size()))
        throw GenerationError("budget exceeds lexicon size");
    if (!category_weights.empty()) {
        double total = 0.0;
        for (const auto& [key, w] : category_weights) {
            bool known = false;
            for (const auto& [name, cat] : kCategories)
                if (key == name)
                    known = true;
            if (!known)
                throw GenerationError("unknown category weight: " + key);
            if (w < 0.0)
                throw GenerationError("negative category weight: " + key);
            total += w;
        }
        if (total <= 0.0)
            throw GenerationError("category weights sum to zero");
    }
    if (max_depth < 3)
        throw GenerationError("max depth too small for the clause shapes");
}

nlohmann::json SourcedClause::to_json() const {
    nlohmann::json j;
    j["id"] = id;
    j["english"] = english;
    j["stage"] = stage;
    j["origin"] = origin;
    j["formula"] = formula_to_json(formula);
    return j;
}

SourcedClause SourcedClause::from_json(const nlohmann::json& j) {
    SourcedClause c;
    c.id = j.at("id").get<int>();
    c.english = j.at("english").get<std::string>();
    c.stage = j.at("stage").get<int>();
    c.origin = j.value("origin", "");
    c.formula = formula_from_json(j.at("formula"));
    return c;
}

ClauseGrammar::ClauseGrammar(GrammarConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    const auto& lx = cfg_.lexicon;
    for (int i = 0; i < cfg_.name_budget; ++i)
        domain_.roster.push_back(constant_of_name(lx.names[i]));
    for (int i = 0; i < cfg_.unary_budget; ++i) {
        domain_.signature[lx.unary[i].symbol] = 1;
        unary_of_[lx.unary[i].symbol] = &lx.unary[i];
    }
    for (int i = 0; i < cfg_.binary_budget; ++i) {
        domain_.signature[lx.binary[i].symbol] = 2;
        binary_of_[lx.binary[i].symbol] = &lx.binary[i];
    }
    for (int i = 0; i < cfg_.propositional_budget; ++i) {
        domain_.signature[lx.propositional[i].symbol] = 0;
        prop_of_[lx.propositional[i].symbol] = &lx.propositional[i];
    }
    if (domain_.signature.size() != static_cast<std::size_t>(cfg_.unary_budget +
                                                             cfg_.binary_budget +
                                                             cfg_.propositional_budget))
        throw GenerationError("duplicate predicate symbols in lexicon");
    std::set<std::string> uniq(domain_.roster.begin(), domain_.roster.end());
    if (uniq.size() != domain_.roster.size())
        throw GenerationError("duplicate names in lexicon");
}

const PredEntry& ClauseGrammar::entry(const std::map<std::string, const PredEntry*>& idx,
                                      const std::string& symbol) const {
    auto it = idx.find(symbol);
    if (it == idx.end())
        throw GenerationError("unknown predicate symbol: " + symbol);
    return *it->second;
}

std::string ClauseGrammar::lit_phrase(const PredLitSpec& l) const {
    if (l.object.empty()) {
        const auto& e = entry(unary_of_, l.symbol);
        return l.negated ? e.negative : e.positive;
    }
    const auto& e = entry(binary_of_, l.symbol);
    return (l.negated ? e.negative : e.positive) + " " + l.object;
}

FormulaPtr ClauseGrammar::lit_formula(const PredLitSpec& l) const {
    FormulaPtr a;
    if (l.object.empty()) {
        a = Formula::make_atom(l.symbol, {Term::variable(0)});
    } else {
        a = Formula::make_atom(l.symbol,
                               {Term::variable(0), Term::constant(constant_of_name(l.object))});
    }
    return l.negated ? Formula::make_not(a) : a;
}

SourcedClause ClauseGrammar::unary_fact(const std::string& name, const std::string& symbol,
                                        bool negated) const {
    const auto& e = entry(unary_of_, symbol);
    SourcedClause c;
    c.english = name + " " + (negated ? e.negative : e.positive);
    FormulaPtr a = Formula::make_atom(symbol, {Term::constant(constant_of_name(name))});
    c.formula = negated ? Formula::make_not(a) : a;
    return c;
}

SourcedClause ClauseGrammar::relational_fact(const std::string& subject,
                                             const std::string& symbol,
                                             const std::string& object, bool negated) const {
    const auto& e = entry(binary_of_, symbol);
    SourcedClause c;
    c.english = subject + " " + (negated ? e.negative : e.positive) + " " + object;
    FormulaPtr a = Formula::make_atom(
        symbol, {Term::constant(constant_of_name(subject)), Term::constant(constant_of_name(object))});
    c.formula = negated ? Formula::make_not(a) : a;
    return c;
}

SourcedClause ClauseGrammar::propositional_fact(const std::string& symbol, bool negated) const {
    const auto& e = entry(prop_of_, symbol);
    SourcedClause c;
    c.english = negated ? e.negative : e.positive;
    FormulaPtr a = Formula::make_atom(symbol, {});
    c.formula = negated ? Formula::make_not(a) : a;
    return c;
}

SourcedClause ClauseGrammar::guarded_conditional(const PredLitSpec& antecedent,
                                                 const PredLitSpec& consequent) const {
    SourcedClause c;
    c.english = "everyone in the room who " + lit_phrase(antecedent) + " " +
                lit_phrase(consequent);
    c.formula = Formula::forall_in_room(
        Formula::make_implies(lit_formula(antecedent), lit_formula(consequent)));
    return c;
}

SourcedClause ClauseGrammar::guarded_biconditional(const PredLitSpec& antecedent,
                                                   const PredLitSpec& consequent) const {
    SourcedClause c;
    c.english = "everyone in the room " + lit_phrase(consequent) + " if they " +
                lit_phrase(antecedent) + " and vice versa";
    c.formula = Formula::forall_in_room(
        Formula::make_iff(lit_formula(antecedent), lit_formula(consequent)));
    return c;
}

SourcedClause ClauseGrammar::existential_clause(const PredLitSpec& lit) const {
    SourcedClause c;
    c.english = "someone in the room " + lit_phrase(lit);
    c.formula = Formula::exists_in_room(lit_formula(lit));
    return c;
}

SourcedClause ClauseGrammar::at_least_clause(int k, const PredLitSpec& lit) const {
    if (k < 1 || k > 3)
        throw GenerationError("at-least-k supports k in 1..3");
    static const char* words[] = {"one person", "two persons", "three persons"};
    SourcedClause c;
    c.english = std::string("at least ") + words[k - 1] + " in the room " + lit_phrase(lit);
    c.formula = Formula::at_least_k(k, lit_formula(lit));
    return c;
}

SourcedClause ClauseGrammar::prop_compound(const std::string& a_symbol, bool a_negated,
                                           PropConnective conn, const std::string& b_symbol,
                                           bool b_negated) const {
    const auto& ea = entry(prop_of_, a_symbol);
    const auto& eb = entry(prop_of_, b_symbol);
    const std::string sa = (a_negated ? ea.negative : ea.positive);
    const std::string sb = (b_negated ? eb.negative : eb.positive);
    auto quoted = [](const std::string& s) { return "“" + s + ".”"; };
    FormulaPtr fa = Formula::make_atom(a_symbol, {});
    if (a_negated)
        fa = Formula::make_not(fa);
    FormulaPtr fb = Formula::make_atom(b_symbol, {});
    if (b_negated)
        fb = Formula::make_not(fb);
    SourcedClause c;
    switch (conn) {
        case PropConnective::Or:
            c.english = quoted(sa) + " or " + quoted(sb) + " or both";
            c.formula = Formula::make_or({fa, fb});
            break;
        case PropConnective::Xor:
            c.english = quoted(sa) + " or " + quoted(sb) + " but not both";
            c.formula = Formula::make_not(Formula::make_iff(fa, fb));
            break;
        case PropConnective::Iff:
            c.english = quoted(sa) + " if " + quoted(sb) + " and vice versa";
            c.formula = Formula::make_iff(fa, fb);
            break;
        case PropConnective::And:
            c.english = quoted(sa) + " and " + quoted(sb);
            c.formula = Formula::make_and({fa, fb});
            break;
    }
    return c;
}

ClauseCategory ClauseGrammar::draw_category(std::mt19937_64& rng) const {
    std::array<double, kCategories.size()> w;
    w.fill(1.0);
    if (!cfg_.category_weights.empty()) {
        for (std::size_t i = 0; i < kCategories.size(); ++i) {
            auto it = cfg_.category_weights.find(kCategories[i].first);
            w[i] = it == cfg_.category_weights.end() ? 0.0 : it->second;
        }
    }
    double total = 0.0;
    for (double x : w)
        total += x;
    double r = std::uniform_real_distribution<double>(0.0, total)(rng);
    for (std::size_t i = 0; i < kCategories.size(); ++i) {
        r -= w[i];
        if (r < 0.0)
            return kCategories[i].second;
    }
    return kCategories.back().second;
}

const std::string& ClauseGrammar::draw_name(std::mt19937_64& rng) const {
    return cfg_.lexicon.names[draw_index(rng, cfg_.name_budget)];
}

PredLitSpec ClauseGrammar::draw_pred_lit(std::mt19937_64& rng) const {
    PredLitSpec l;
    const bool binary = draw_prob(rng, 0.3);
    l.negated = draw_prob(rng, 0.4);
    if (binary) {
        l.symbol = cfg_.lexicon.binary[draw_index(rng, cfg_.binary_budget)].symbol;
        l.object = draw_name(rng);
    } else {
        l.symbol = cfg_.lexicon.unary[draw_index(rng, cfg_.unary_budget)].symbol;
    }
    return l;
}

SourcedClause ClauseGrammar::generate_clause(std::mt19937_64& rng,
                                             std::optional<ClauseCategory> forced) const {
    ClauseCategory cat = forced ? *forced : draw_category(rng);
    switch (cat) {
        case ClauseCategory::Fact:
        case ClauseCategory::NegatedFact: {
            const bool negated = cat == ClauseCategory::NegatedFact;
            if (draw_prob(rng, 0.2))
                return propositional_fact(
                    cfg_.lexicon.propositional[draw_index(rng, cfg_.propositional_budget)].symbol,
                    negated);
            return unary_fact(draw_name(rng),
                              cfg_.lexicon.unary[draw_index(rng, cfg_.unary_budget)].symbol,
                              negated);
        }
        case ClauseCategory::GuardedConditional: {
            PredLitSpec ant = draw_pred_lit(rng);
            PredLitSpec cons = draw_pred_lit(rng);
            return guarded_conditional(ant, cons);
        }
        case ClauseCategory::GuardedBiconditional: {
            PredLitSpec ant = draw_pred_lit(rng);
            PredLitSpec cons = draw_pred_lit(rng);
            return guarded_biconditional(ant, cons);
        }
        case ClauseCategory::Existential:
            return existential_clause(draw_pred_lit(rng));
        case ClauseCategory::AtLeastK: {
            double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            int k = r < 0.5 ? 1 : (r < 0.85 ? 2 : 3);
            return at_least_clause(k, draw_pred_lit(rng));
        }
        case ClauseCategory::RelationalFact: {
            const std::string& a = draw_name(rng);
            std::string b = draw_name(rng);
            while (b == a)
                b = draw_name(rng);
            return relational_fact(
                a, cfg_.lexicon.binary[draw_index(rng, cfg_.binary_budget)].symbol, b, false);
        }
        case ClauseCategory::PropositionalCompound: {
            int ai = draw_index(rng, cfg_.propositional_budget);
            int bi = draw_index(rng, cfg_.propositional_budget);
            while (cfg_.propositional_budget > 1 && bi == ai)
                bi = draw_index(rng, cfg_.propositional_budget);
            bool an = draw_prob(rng, 0.3);
            bool bn = draw_prob(rng, 0.3);
            static const PropConnective conns[] = {PropConnective::Or, PropConnective::Xor,
                                                   PropConnective::Iff, PropConnective::And};
            PropConnective conn = conns[draw_index(rng, 4)];
            return prop_compound(cfg_.lexicon.propositional[ai].symbol, an, conn,
                                 cfg_.lexicon.propositional[bi].symbol, bn);
        }
    }
    throw GenerationError("unreachable category");
}

std::vector<SourcedClause> ClauseGrammar::generate_base_formula(int n,
                                                                std::uint64_t seed) const {
    if (n < 1)
        throw GenerationError("base formula size must be >= 1");
    auto rng = make_rng(seed);
    std::vector<SourcedClause> out;
    std::unordered_set<std::string> surfaces;
    const int retry_budget = 100 * n;
    int attempts = 0;
    while (static_cast<int>(out.size()) < n) {
        if (++attempts > retry_budget)
            throw GenerationError("surface-duplicate resampling exceeded retry budget");
        SourcedClause c = generate_clause(rng);
        if (!surfaces.insert(c.english).second)
            continue;
        c.id = static_cast<int>(out.size());
        c.stage = 0;
        out.push_back(std::move(c));
    }
    return out;
}

SourcedClause ClauseGrammar::sample_hypothesis(std::mt19937_64& rng, const SymbolPool* pool,
                                               double reuse_prob) const {
    const bool use_pool = pool != nullptr && draw_prob(rng, reuse_prob);
    auto pick = [&](const std::vector<std::string>& pooled,
                    auto fallback) -> std::string {
        if (use_pool && !pooled.empty())
            return pooled[draw_index(rng, static_cast<int>(pooled.size()))];
        return fallback();
    };

    double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const bool negated = draw_prob(rng, 0.4);
    if (r < 0.6) {
        std::string name = pick(pool ? pool->names : std::vector<std::string>{},
                                [&] { return draw_name(rng); });
        std::string sym = pick(pool ? pool->unary : std::vector<std::string>{}, [&] {
            return cfg_.lexicon.unary[draw_index(rng, cfg_.unary_budget)].symbol;
        });
        return unary_fact(name, sym, negated);
    }
    if (r < 0.85) {
        std::string a = pick(pool ? pool->names : std::vector<std::string>{},
                             [&] { return draw_name(rng); });
        std::string b = draw_name(rng);
        while (b == a)
            b = draw_name(rng);
        std::string sym = pick(pool ? pool->binary : std::vector<std::string>{}, [&] {
            return cfg_.lexicon.binary[draw_index(rng, cfg_.binary_budget)].symbol;
        });
        return relational_fact(a, sym, b, negated);
    }
    std::string sym = pick(pool ? pool->propositional : std::vector<std::string>{}, [&] {
        return cfg_.lexicon.propositional[draw_index(rng, cfg_.propositional_budget)].symbol;
    });
    return propositional_fact(sym, negated);
}

SymbolPool ClauseGrammar::collect_symbols(const std::vector<SourcedClause>& clauses) const {
    std::set<std::string> names, unary, binary, props;
    std::function<void(const FormulaPtr&)> walk = [&](const FormulaPtr& f) {
        if (f->kind == Formula::Kind::Atom) {
            int ar = static_cast<int>(f->atom.args.size());
            if (ar == 0)
                props.insert(f->atom.pred);
            else if (ar == 1)
                unary.insert(f->atom.pred);
            else
                binary.insert(f->atom.pred);
            for (const auto& t : f->atom.args)
                if (t.kind == Term::Kind::Constant)
                    names.insert(t.name);
            return;
        }
        for (const auto& k : f->kids)
            walk(k);
    };
    for (const auto& c : clauses)
        walk(c.formula);
    SymbolPool pool;
    // constants back to their English form
    for (int i = 0; i < cfg_.name_budget; ++i)
        if (names.count(constant_of_name(cfg_.lexicon.names[i])))
            pool.names.push_back(cfg_.lexicon.names[i]);
    pool.unary.assign(unary.begin(), unary.end());
    pool.binary.assign(binary.begin(), binary.end());
    pool.propositional.assign(props.begin(), props.end());
    return pool;
}

}  // namespace haystacks
