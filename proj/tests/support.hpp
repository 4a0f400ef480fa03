#pragma once

// Shared helpers for the test binaries: a tiny fixed domain, a random
// formula generator, and a brute-force truth-table oracle that evaluates
// formulas directly (independently of grounding and the CDCL solver).

#include <map>
#include <random>
#include <string>
#include <vector>

#include "haystacks/grammar.hpp"
#include "haystacks/ground.hpp"
#include "haystacks/logic.hpp"

namespace haystacks::testing {

inline Domain tiny_domain() {
    Domain d;
    d.roster = {"a", "b", "c"};
    d.signature = {{"p", 1}, {"q", 1}, {"r", 2}, {"s", 0}};
    return d;
}

// All ground atoms of a domain, in a fixed order.
inline std::vector<std::string> ground_atoms(const Domain& d) {
    std::vector<std::string> atoms;
    for (const auto& [pred, arity] : d.signature) {
        if (arity == 0) {
            atoms.push_back(pred);
        } else if (arity == 1) {
            for (const auto& c : d.roster)
                atoms.push_back(ground_atom_name(pred, {c}));
        } else {
            for (const auto& c1 : d.roster)
                for (const auto& c2 : d.roster)
                    atoms.push_back(ground_atom_name(pred, {c1, c2}));
        }
    }
    return atoms;
}

// Direct evaluation of a formula under a ground-atom interpretation.
inline bool eval_formula(const FormulaPtr& f, const Domain& d,
                         const std::map<std::string, bool>& model,
                         std::vector<std::string>& env) {
    using K = Formula::Kind;
    switch (f->kind) {
        case K::Atom: {
            std::vector<std::string> args;
            for (const auto& t : f->atom.args)
                args.push_back(t.kind == Term::Kind::Constant
                                   ? t.name
                                   : env[env.size() - 1 - t.index]);
            return model.at(ground_atom_name(f->atom.pred, args));
        }
        case K::Not:
            return !eval_formula(f->kids[0], d, model, env);
        case K::And:
            for (const auto& k : f->kids)
                if (!eval_formula(k, d, model, env))
                    return false;
            return true;
        case K::Or:
            for (const auto& k : f->kids)
                if (eval_formula(k, d, model, env))
                    return true;
            return false;
        case K::Implies:
            return !eval_formula(f->kids[0], d, model, env) ||
                   eval_formula(f->kids[1], d, model, env);
        case K::Iff:
            return eval_formula(f->kids[0], d, model, env) ==
                   eval_formula(f->kids[1], d, model, env);
        case K::ForallInRoom:
            for (const auto& c : d.roster) {
                env.push_back(c);
                bool ok = eval_formula(f->kids[0], d, model, env);
                env.pop_back();
                if (!ok)
                    return false;
            }
            return true;
        case K::ExistsInRoom:
            for (const auto& c : d.roster) {
                env.push_back(c);
                bool ok = eval_formula(f->kids[0], d, model, env);
                env.pop_back();
                if (ok)
                    return true;
            }
            return false;
        case K::AtLeastK: {
            int count = 0;
            for (const auto& c : d.roster) {
                env.push_back(c);
                if (eval_formula(f->kids[0], d, model, env))
                    ++count;
                env.pop_back();
            }
            return count >= f->at_least;
        }
    }
    return false;
}

inline bool eval_formula(const FormulaPtr& f, const Domain& d,
                         const std::map<std::string, bool>& model) {
    std::vector<std::string> env;
    return eval_formula(f, d, model, env);
}

// True iff some interpretation satisfies every formula.
inline bool bruteforce_sat(const std::vector<std::pair<int, FormulaPtr>>& formulas,
                           const Domain& d) {
    std::vector<std::string> atoms = ground_atoms(d);
    const std::size_t n = atoms.size();
    for (std::uint64_t bits = 0; bits < (1ull << n); ++bits) {
        std::map<std::string, bool> model;
        for (std::size_t i = 0; i < n; ++i)
            model[atoms[i]] = (bits >> i) & 1;
        bool all = true;
        for (const auto& [id, f] : formulas)
            if (!eval_formula(f, d, model)) {
                all = false;
                break;
            }
        if (all)
            return true;
    }
    return false;
}

inline std::size_t bruteforce_model_count(const std::vector<std::pair<int, FormulaPtr>>& fs,
                                          const Domain& d) {
    std::vector<std::string> atoms = ground_atoms(d);
    const std::size_t n = atoms.size();
    std::size_t count = 0;
    for (std::uint64_t bits = 0; bits < (1ull << n); ++bits) {
        std::map<std::string, bool> model;
        for (std::size_t i = 0; i < n; ++i)
            model[atoms[i]] = (bits >> i) & 1;
        bool all = true;
        for (const auto& [id, f] : fs)
            if (!eval_formula(f, d, model)) {
                all = false;
                break;
            }
        if (all)
            ++count;
    }
    return count;
}

// Random formula over the tiny domain. `binders` counts enclosing
// quantifiers (variables draw indices below it).
inline FormulaPtr random_formula(std::mt19937_64& rng, int depth, int binders,
                                 const Domain& d, bool allow_at_least = true) {
    auto idx = [&](int n) {
        return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(rng));
    };
    auto term = [&]() -> Term {
        if (binders > 0 && idx(2) == 0)
            return Term::variable(idx(binders));
        return Term::constant(d.roster[idx(static_cast<int>(d.roster.size()))]);
    };
    auto atom = [&]() -> FormulaPtr {
        std::vector<std::pair<std::string, int>> sig(d.signature.begin(), d.signature.end());
        const auto& [pred, arity] = sig[idx(static_cast<int>(sig.size()))];
        std::vector<Term> args;
        for (int i = 0; i < arity; ++i)
            args.push_back(term());
        return Formula::make_atom(pred, std::move(args));
    };
    if (depth <= 0)
        return atom();
    switch (idx(allow_at_least ? 9 : 8)) {
        case 0:
        case 1:
            return atom();
        case 2:
            return Formula::make_not(random_formula(rng, depth - 1, binders, d, false));
        case 3:
            return Formula::make_and({random_formula(rng, depth - 1, binders, d, false),
                                      random_formula(rng, depth - 1, binders, d, false)});
        case 4:
            return Formula::make_or({random_formula(rng, depth - 1, binders, d, false),
                                     random_formula(rng, depth - 1, binders, d, false)});
        case 5:
            return Formula::make_implies(random_formula(rng, depth - 1, binders, d, false),
                                         random_formula(rng, depth - 1, binders, d, false));
        case 6:
            return Formula::make_iff(random_formula(rng, depth - 1, binders, d, false),
                                     random_formula(rng, depth - 1, binders, d, false));
        case 7:
            return idx(2) == 0
                       ? Formula::forall_in_room(
                             random_formula(rng, depth - 1, binders + 1, d, false))
                       : Formula::exists_in_room(
                             random_formula(rng, depth - 1, binders + 1, d, false));
        default:
            // root position only
            return Formula::at_least_k(1 + idx(3),
                                       random_formula(rng, depth - 1, binders + 1, d, false));
    }
}

inline std::vector<std::pair<int, FormulaPtr>> random_instance(std::mt19937_64& rng,
                                                               const Domain& d,
                                                               int num_formulas) {
    std::vector<std::pair<int, FormulaPtr>> fs;
    for (int i = 0; i < num_formulas; ++i)
        fs.emplace_back(i, random_formula(rng, 2, 0, d));
    return fs;
}

// The three-line introduction premise: everyone happy is rich, Mary is
// happy, Nina is rich; hypothesis "Mary is not rich".
struct IntroExample {
    ClauseGrammar grammar{GrammarConfig{}};
    std::vector<SourcedClause> premise;
    SourcedClause hypothesis;

    IntroExample() {
        SourcedClause l0 = grammar.guarded_conditional({"happy", false, ""}, {"rich", false, ""});
        SourcedClause l1 = grammar.unary_fact("Mary", "happy", false);
        SourcedClause l2 = grammar.unary_fact("Nina", "rich", false);
        l0.id = 0;
        l1.id = 1;
        l2.id = 2;
        premise = {l0, l1, l2};
        hypothesis = grammar.unary_fact("Mary", "rich", true);
        hypothesis.id = 3;
    }
};

}  // namespace haystacks::testing
