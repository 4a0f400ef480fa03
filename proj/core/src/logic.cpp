#include "haystacks/logic.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

namespace haystacks {

FormulaPtr Formula::make_atom(Atom a) {
    auto f = std::make_shared<Formula>();
    f->kind = Kind::Atom;
    f->atom = std::move(a);
    return f;
}

FormulaPtr Formula::make_atom(std::string pred, std::vector<Term> args) {
    return make_atom(Atom{std::move(pred), std::move(args)});
}

FormulaPtr Formula::make_not(FormulaPtr f) {
    auto r = std::make_shared<Formula>();
    r->kind = Kind::Not;
    r->kids = {std::move(f)};
    return r;
}

FormulaPtr Formula::make_and(std::vector<FormulaPtr> fs) {
    auto r = std::make_shared<Formula>();
    r->kind = Kind::And;
    r->kids = std::move(fs);
    return r;
}

FormulaPtr Formula::make_or(std::vector<FormulaPtr> fs) {
    auto r = std::make_shared<Formula>();
    r->kind = Kind::Or;
    r->kids = std::move(fs);
    return r;
}

FormulaPtr Formula::make_implies(FormulaPtr a, FormulaPtr b) {
    auto r = std::make_shared<Formula>();
    r->kind = Kind::Implies;
    r->kids = {std::move(a), std::move(b)};
    return r;
}

FormulaPtr Formula::make_iff(FormulaPtr a, FormulaPtr b) {
    auto r = std::make_shared<Formula>();
    r->kind = Kind::Iff;
    r->kids = {std::move(a), std::move(b)};
    return r;
}

FormulaPtr Formula::forall_in_room(FormulaPtr body) {
    auto r = std::make_shared<Formula>();
    r->kind = Kind::ForallInRoom;
    r->kids = {std::move(body)};
    return r;
}

FormulaPtr Formula::exists_in_room(FormulaPtr body) {
    auto r = std::make_shared<Formula>();
    r->kind = Kind::ExistsInRoom;
    r->kids = {std::move(body)};
    return r;
}

FormulaPtr Formula::at_least_k(int k, FormulaPtr body) {
    if (k < 1)
        throw StructuralError("at_least_k requires k >= 1");
    auto r = std::make_shared<Formula>();
    r->kind = Kind::AtLeastK;
    r->at_least = k;
    r->kids = {std::move(body)};
    return r;
}

bool Formula::operator==(const Formula& o) const {
    if (kind != o.kind || at_least != o.at_least || kids.size() != o.kids.size())
        return false;
    if (kind == Kind::Atom && !(atom == o.atom))
        return false;
    for (size_t i = 0; i < kids.size(); ++i)
        if (!(*kids[i] == *o.kids[i]))
            return false;
    return true;
}

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (a == b)
        return true;
    if (!a || !b)
        return false;
    return *a == *b;
}

FormulaPtr negate(const FormulaPtr& f) {
    if (f->kind == Formula::Kind::Not)
        return f->kids[0];
    return Formula::make_not(f);
}

int formula_depth(const FormulaPtr& f) {
    int d = 0;
    for (const auto& k : f->kids)
        d = std::max(d, formula_depth(k));
    return d + 1;
}

namespace {

void term_str(std::ostream& os, const Term& t) {
    if (t.kind == Term::Kind::Constant)
        os << t.name;
    else
        os << "X" << t.index;
}

void fml_str(std::ostream& os, const FormulaPtr& f) {
    using K = Formula::Kind;
    switch (f->kind) {
        case K::Atom: {
            os << f->atom.pred;
            if (!f->atom.args.empty()) {
                os << "(";
                for (size_t i = 0; i < f->atom.args.size(); ++i) {
                    if (i)
                        os << ",";
                    term_str(os, f->atom.args[i]);
                }
                os << ")";
            }
            break;
        }
        case K::Not:
            os << "~";
            fml_str(os, f->kids[0]);
            break;
        case K::And:
        case K::Or: {
            os << "(";
            const char* sep = f->kind == K::And ? " & " : " | ";
            for (size_t i = 0; i < f->kids.size(); ++i) {
                if (i)
                    os << sep;
                fml_str(os, f->kids[i]);
            }
            os << ")";
            break;
        }
        case K::Implies:
            os << "(";
            fml_str(os, f->kids[0]);
            os << " => ";
            fml_str(os, f->kids[1]);
            os << ")";
            break;
        case K::Iff:
            os << "(";
            fml_str(os, f->kids[0]);
            os << " <=> ";
            fml_str(os, f->kids[1]);
            os << ")";
            break;
        case K::ForallInRoom:
            os << "forall_room ";
            fml_str(os, f->kids[0]);
            break;
        case K::ExistsInRoom:
            os << "exists_room ";
            fml_str(os, f->kids[0]);
            break;
        case K::AtLeastK:
            os << "atleast[" << f->at_least << "] ";
            fml_str(os, f->kids[0]);
            break;
    }
}

nlohmann::json term_json(const Term& t) {
    if (t.kind == Term::Kind::Constant)
        return nlohmann::json::array({"c", t.name});
    return nlohmann::json::array({"v", t.index});
}

Term term_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2)
        throw StructuralError("bad term encoding");
    if (j[0] == "c")
        return Term::constant(j[1].get<std::string>());
    if (j[0] == "v")
        return Term::variable(j[1].get<int>());
    throw StructuralError("bad term tag");
}

const char* kind_tag(Formula::Kind k) {
    using K = Formula::Kind;
    switch (k) {
        case K::Atom: return "atom";
        case K::Not: return "not";
        case K::And: return "and";
        case K::Or: return "or";
        case K::Implies: return "implies";
        case K::Iff: return "iff";
        case K::ForallInRoom: return "forall";
        case K::ExistsInRoom: return "exists";
        case K::AtLeastK: return "atleast";
    }
    return "?";
}

}  // namespace

std::string to_string(const FormulaPtr& f) {
    std::ostringstream os;
    fml_str(os, f);
    return os.str();
}

nlohmann::json formula_to_json(const FormulaPtr& f) {
    nlohmann::json j;
    j["k"] = kind_tag(f->kind);
    if (f->kind == Formula::Kind::Atom) {
        j["p"] = f->atom.pred;
        auto args = nlohmann::json::array();
        for (const auto& t : f->atom.args)
            args.push_back(term_json(t));
        if (!args.empty())
            j["a"] = args;
        return j;
    }
    if (f->kind == Formula::Kind::AtLeastK)
        j["n"] = f->at_least;
    auto kids = nlohmann::json::array();
    for (const auto& k : f->kids)
        kids.push_back(formula_to_json(k));
    j["f"] = kids;
    return j;
}

FormulaPtr formula_from_json(const nlohmann::json& j) {
    const std::string tag = j.at("k").get<std::string>();
    if (tag == "atom") {
        Atom a;
        a.pred = j.at("p").get<std::string>();
        if (j.contains("a"))
            for (const auto& t : j["a"])
                a.args.push_back(term_from_json(t));
        return Formula::make_atom(std::move(a));
    }
    std::vector<FormulaPtr> kids;
    for (const auto& k : j.at("f"))
        kids.push_back(formula_from_json(k));
    using K = Formula::Kind;
    if (tag == "not")
        return Formula::make_not(kids.at(0));
    if (tag == "and")
        return Formula::make_and(std::move(kids));
    if (tag == "or")
        return Formula::make_or(std::move(kids));
    if (tag == "implies")
        return Formula::make_implies(kids.at(0), kids.at(1));
    if (tag == "iff")
        return Formula::make_iff(kids.at(0), kids.at(1));
    if (tag == "forall")
        return Formula::forall_in_room(kids.at(0));
    if (tag == "exists")
        return Formula::exists_in_room(kids.at(0));
    if (tag == "atleast")
        return Formula::at_least_k(j.at("n").get<int>(), kids.at(0));
    (void)sizeof(K);
    throw StructuralError("unknown formula tag: " + tag);
}

bool Domain::has_constant(const std::string& c) const {
    return std::find(roster.begin(), roster.end(), c) != roster.end();
}

int Domain::arity_of(const std::string& pred) const {
    auto it = signature.find(pred);
    if (it == signature.end())
        throw SignatureError("unknown predicate: " + pred);
    return it->second;
}

nlohmann::json Domain::to_json() const {
    nlohmann::json j;
    j["roster"] = roster;
    j["signature"] = signature;
    return j;
}

Domain Domain::from_json(const nlohmann::json& j) {
    Domain d;
    d.roster = j.at("roster").get<std::vector<std::string>>();
    d.signature = j.at("signature").get<std::map<std::string, int>>();
    return d;
}

namespace {

void validate_rec(const FormulaPtr& f, const Domain& domain, int binders) {
    if (f->kind == Formula::Kind::Atom) {
        int ar = domain.arity_of(f->atom.pred);
        if (ar != static_cast<int>(f->atom.args.size()))
            throw SignatureError("arity mismatch for predicate " + f->atom.pred);
        for (const auto& t : f->atom.args) {
            if (t.kind == Term::Kind::Constant) {
                if (!domain.has_constant(t.name))
                    throw SignatureError("unknown constant: " + t.name);
            } else if (t.index < 0 || t.index >= binders) {
                throw StructuralError("unbound variable index");
            }
        }
        return;
    }
    int b = binders;
    if (f->kind == Formula::Kind::ForallInRoom || f->kind == Formula::Kind::ExistsInRoom ||
        f->kind == Formula::Kind::AtLeastK)
        ++b;
    for (const auto& k : f->kids)
        validate_rec(k, domain, b);
}

}  // namespace

void validate_formula(const FormulaPtr& f, const Domain& domain, int max_depth) {
    if (formula_depth(f) > max_depth)
        throw StructuralError("formula depth exceeds limit");
    validate_rec(f, domain, 0);
}

}  // namespace haystacks
