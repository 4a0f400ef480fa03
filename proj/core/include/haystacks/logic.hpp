#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace haystacks {

struct SignatureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StructuralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A term is either a named individual constant or a variable bound by an
// enclosing quantifier. Variables use de Bruijn indices: 0 is the nearest
// enclosing binder.
struct Term {
    enum class Kind { Constant, Variable };
    Kind kind = Kind::Constant;
    std::string name;  // constant name, empty for variables
    int index = -1;    // binder index, -1 for constants

    static Term constant(std::string n) { return {Kind::Constant, std::move(n), -1}; }
    static Term variable(int i) { return {Kind::Variable, {}, i}; }
    bool operator==(const Term&) const = default;
};

// Predicate application; arity 0 (propositional fact), 1 or 2.
struct Atom {
    std::string pred;
    std::vector<Term> args;
    bool operator==(const Atom&) const = default;
};

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Immutable formula tree. Quantifiers are guarded: they range over the
// members of the problem roster, all of whom are in the room by
// construction (the "only persons in the room" closure is structural, not
// a generated axiom).
class Formula {
public:
    enum class Kind {
        Atom,
        Not,
        And,
        Or,
        Implies,
        Iff,
        ForallInRoom,
        ExistsInRoom,
        AtLeastK,
    };

    Kind kind;
    Atom atom;                      // Kind::Atom only
    std::vector<FormulaPtr> kids;   // operands; quantifier body is kids[0]
    int at_least = 0;               // Kind::AtLeastK only, k >= 1

    static FormulaPtr make_atom(Atom a);
    static FormulaPtr make_atom(std::string pred, std::vector<Term> args = {});
    static FormulaPtr make_not(FormulaPtr f);
    static FormulaPtr make_and(std::vector<FormulaPtr> fs);
    static FormulaPtr make_or(std::vector<FormulaPtr> fs);
    static FormulaPtr make_implies(FormulaPtr a, FormulaPtr b);
    static FormulaPtr make_iff(FormulaPtr a, FormulaPtr b);
    static FormulaPtr forall_in_room(FormulaPtr body);
    static FormulaPtr exists_in_room(FormulaPtr body);
    static FormulaPtr at_least_k(int k, FormulaPtr body);

    bool operator==(const Formula& o) const;
};

// Negation with double-negation cancellation.
FormulaPtr negate(const FormulaPtr& f);

int formula_depth(const FormulaPtr& f);

// FOL-ish rendering for diagnostics and tests.
std::string to_string(const FormulaPtr& f);

// Structural (in)equality through the pointers.
bool formula_equal(const FormulaPtr& a, const FormulaPtr& b);

nlohmann::json formula_to_json(const FormulaPtr& f);
FormulaPtr formula_from_json(const nlohmann::json& j);

// The finite universe of a problem: the person roster plus the predicate
// signature. Every roster member is in the room.
struct Domain {
    std::vector<std::string> roster;
    std::map<std::string, int> signature;  // predicate -> arity

    bool has_constant(const std::string& c) const;
    int arity_of(const std::string& pred) const;  // throws SignatureError if unknown

    nlohmann::json to_json() const;
    static Domain from_json(const nlohmann::json& j);
};

// Checks constants/predicates against the domain and the depth bound.
// Throws SignatureError / StructuralError.
void validate_formula(const FormulaPtr& f, const Domain& domain, int max_depth = 6);

}  // namespace haystacks
