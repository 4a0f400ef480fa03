#include "haystacks/ground.hpp"

#include <sstream>

namespace haystacks {

int GroundCNF::intern_atom(const std::string& name) {
    auto it = var_of_atom.find(name);
    if (it != var_of_atom.end())
        return it->second;
    int v = ++num_vars;
    if (atom_of_var.empty())
        atom_of_var.push_back("");  // slot 0
    atom_of_var.push_back(name);
    var_of_atom.emplace(name, v);
    return v;
}

int GroundCNF::fresh_aux() {
    int v = ++num_vars;
    if (atom_of_var.empty())
        atom_of_var.push_back("");
    atom_of_var.push_back("");
    return v;
}

std::string ground_atom_name(const std::string& pred, const std::vector<std::string>& args) {
    if (args.empty())
        return pred;
    std::string s = pred + "(";
    for (size_t i = 0; i < args.size(); ++i) {
        if (i)
            s += ",";
        s += args[i];
    }
    s += ")";
    return s;
}

namespace {

using K = Formula::Kind;

class Grounder {
public:
    Grounder(GroundCNF& cnf, const Domain& domain) : cnf_(cnf), dom_(domain) {}

    void add_formula(int source, const FormulaPtr& f) {
        src_ = source;
        add_root_(f);
    }

private:
    GroundCNF& cnf_;
    const Domain& dom_;
    int src_ = -1;
    std::vector<std::string> env_;  // binder stack, back() = index 0

    void emit(std::vector<int> lits, bool tseitin) {
        cnf_.clauses.push_back({std::move(lits), {src_}, tseitin});
    }

    const std::string& resolve(const Term& t) {
        if (t.kind == Term::Kind::Constant) {
            if (!dom_.has_constant(t.name))
                throw SignatureError("unknown constant: " + t.name);
            return t.name;
        }
        if (t.index < 0 || t.index >= static_cast<int>(env_.size()))
            throw StructuralError("unbound variable index");
        return env_[env_.size() - 1 - t.index];
    }

    int atom_lit(const Atom& a) {
        if (dom_.arity_of(a.pred) != static_cast<int>(a.args.size()))
            throw SignatureError("arity mismatch for predicate " + a.pred);
        std::vector<std::string> args;
        args.reserve(a.args.size());
        for (const auto& t : a.args)
            args.push_back(resolve(t));
        return cnf_.intern_atom(ground_atom_name(a.pred, args));
    }

    // Tseitin literal for a subformula (both polarities defined).
    int lit_of(const FormulaPtr& f) {
        switch (f->kind) {
            case K::Atom:
                return atom_lit(f->atom);
            case K::Not:
                return -lit_of(f->kids[0]);
            case K::And: {
                std::vector<int> ls;
                for (const auto& k : f->kids)
                    ls.push_back(lit_of(k));
                return def_and(ls);
            }
            case K::Or: {
                std::vector<int> ls;
                for (const auto& k : f->kids)
                    ls.push_back(lit_of(k));
                return def_or(ls);
            }
            case K::Implies:
                return def_or({-lit_of(f->kids[0]), lit_of(f->kids[1])});
            case K::Iff: {
                int a = lit_of(f->kids[0]);
                int b = lit_of(f->kids[1]);
                int t = cnf_.fresh_aux();
                emit({-t, -a, b}, true);
                emit({-t, a, -b}, true);
                emit({t, a, b}, true);
                emit({t, -a, -b}, true);
                return t;
            }
            case K::ForallInRoom: {
                std::vector<int> ls;
                for (const auto& c : dom_.roster) {
                    env_.push_back(c);
                    ls.push_back(lit_of(f->kids[0]));
                    env_.pop_back();
                }
                return def_and(ls);
            }
            case K::ExistsInRoom: {
                std::vector<int> ls;
                for (const auto& c : dom_.roster) {
                    env_.push_back(c);
                    ls.push_back(lit_of(f->kids[0]));
                    env_.pop_back();
                }
                return def_or(ls);
            }
            case K::AtLeastK:
                throw StructuralError("at-least-k is only supported at formula root");
        }
        throw StructuralError("unreachable formula kind");
    }

    int def_and(const std::vector<int>& ls) {
        if (ls.size() == 1)
            return ls[0];
        int t = cnf_.fresh_aux();
        std::vector<int> big{t};
        for (int l : ls) {
            emit({-t, l}, true);
            big.push_back(-l);
        }
        emit(std::move(big), true);
        return t;
    }

    int def_or(const std::vector<int>& ls) {
        if (ls.size() == 1)
            return ls[0];
        int t = cnf_.fresh_aux();
        std::vector<int> big{-t};
        for (int l : ls) {
            emit({t, -l}, true);
            big.push_back(l);
        }
        emit(std::move(big), true);
        return t;
    }

    // Flattens nested Or / Implies into a disjunct list.
    void collect_disjuncts(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
        if (f->kind == K::Or) {
            for (const auto& k : f->kids)
                collect_disjuncts(k, out);
        } else if (f->kind == K::Implies) {
            out.push_back(negate(f->kids[0]));
            collect_disjuncts(f->kids[1], out);
        } else {
            out.push_back(f);
        }
    }

    void add_root_(const FormulaPtr& f) {
        switch (f->kind) {
            case K::And:
                for (const auto& k : f->kids)
                    add_root_(k);
                return;
            case K::ForallInRoom:
                for (const auto& c : dom_.roster) {
                    env_.push_back(c);
                    add_root_(f->kids[0]);
                    env_.pop_back();
                }
                return;
            case K::AtLeastK:
                add_at_least(f->at_least, f->kids[0]);
                return;
            default: {
                std::vector<FormulaPtr> dis;
                collect_disjuncts(f, dis);
                std::vector<int> lits;
                lits.reserve(dis.size());
                for (const auto& d : dis)
                    lits.push_back(lit_of(d));
                emit(std::move(lits), false);
                return;
            }
        }
    }

    // At least k of the roster instances satisfy the body: clause set
    // { OR_{i in T} s_i : |T| = n-k+1 } over instance literals s_i.
    void add_at_least(int k, const FormulaPtr& body) {
        const int n = static_cast<int>(dom_.roster.size());
        std::vector<int> inst;
        inst.reserve(n);
        for (const auto& c : dom_.roster) {
            env_.push_back(c);
            inst.push_back(lit_of(body));
            env_.pop_back();
        }
        if (k > n) {
            // Unsatisfiable by counting; encode without an empty clause.
            int t = cnf_.fresh_aux();
            emit({t}, false);
            emit({-t}, false);
            return;
        }
        const int m = n - k + 1;
        std::vector<int> idx(m);
        for (int i = 0; i < m; ++i)
            idx[i] = i;
        while (true) {
            std::vector<int> cl(m);
            for (int i = 0; i < m; ++i)
                cl[i] = inst[idx[i]];
            emit(std::move(cl), false);
            int i = m - 1;
            while (i >= 0 && idx[i] == n - m + i)
                --i;
            if (i < 0)
                break;
            ++idx[i];
            for (int j = i + 1; j < m; ++j)
                idx[j] = idx[j - 1] + 1;
        }
    }
};

}  // namespace

GroundCNF ground(const std::vector<std::pair<int, FormulaPtr>>& formulas,
                 const Domain& domain, int max_depth) {
    GroundCNF cnf;
    ground_into(cnf, formulas, domain, max_depth);
    return cnf;
}

void ground_into(GroundCNF& cnf, const std::vector<std::pair<int, FormulaPtr>>& formulas,
                 const Domain& domain, int max_depth) {
    Grounder g(cnf, domain);
    for (const auto& [id, f] : formulas) {
        if (formula_depth(f) > max_depth)
            throw StructuralError("formula depth exceeds limit");
        g.add_formula(id, f);
    }
}

std::string to_dimacs(const GroundCNF& cnf) {
    std::ostringstream os;
    os << "p cnf " << cnf.num_vars << " " << cnf.clauses.size() << "\n";
    for (const auto& c : cnf.clauses) {
        for (int l : c.lits)
            os << l << " ";
        os << "0\n";
    }
    return os.str();
}

}  // namespace haystacks
