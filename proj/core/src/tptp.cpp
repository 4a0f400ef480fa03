#include "haystacks/tptp.hpp"

#include <sstream>

namespace haystacks {

namespace {

using K = Formula::Kind;

std::string var_name(int depth) { return "V" + std::to_string(depth); }

void term_fof(std::ostream& os, const Term& t, int depth) {
    if (t.kind == Term::Kind::Constant)
        os << t.name;
    else
        os << var_name(depth - 1 - t.index);
}

// depth = number of enclosing binders
void fof(std::ostream& os, const FormulaPtr& f, int depth) {
    switch (f->kind) {
        case K::Atom: {
            os << f->atom.pred;
            if (!f->atom.args.empty()) {
                os << "(";
                for (std::size_t i = 0; i < f->atom.args.size(); ++i) {
                    if (i)
                        os << ",";
                    term_fof(os, f->atom.args[i], depth);
                }
                os << ")";
            }
            break;
        }
        case K::Not:
            os << "~(";
            fof(os, f->kids[0], depth);
            os << ")";
            break;
        case K::And:
        case K::Or: {
            const char* sep = f->kind == K::And ? " & " : " | ";
            os << "(";
            for (std::size_t i = 0; i < f->kids.size(); ++i) {
                if (i)
                    os << sep;
                os << "(";
                fof(os, f->kids[i], depth);
                os << ")";
            }
            os << ")";
            break;
        }
        case K::Implies:
        case K::Iff: {
            os << "((";
            fof(os, f->kids[0], depth);
            os << ") " << (f->kind == K::Implies ? "=>" : "<=>") << " (";
            fof(os, f->kids[1], depth);
            os << "))";
            break;
        }
        case K::ForallInRoom: {
            std::string v = var_name(depth);
            os << "(![" << v << "]: (in_room(" << v << ") => (";
            fof(os, f->kids[0], depth + 1);
            os << ")))";
            break;
        }
        case K::ExistsInRoom: {
            std::string v = var_name(depth);
            os << "(?[" << v << "]: (in_room(" << v << ") & (";
            fof(os, f->kids[0], depth + 1);
            os << ")))";
            break;
        }
        case K::AtLeastK: {
            // k distinct in-room witnesses, body instantiated per witness
            const int k = f->at_least;
            os << "(?[";
            for (int i = 0; i < k; ++i) {
                if (i)
                    os << ",";
                os << var_name(depth + i);
            }
            os << "]: (";
            bool first = true;
            for (int i = 0; i < k; ++i)
                for (int j = i + 1; j < k; ++j) {
                    if (!first)
                        os << " & ";
                    os << var_name(depth + i) << " != " << var_name(depth + j);
                    first = false;
                }
            for (int i = 0; i < k; ++i) {
                if (!first)
                    os << " & ";
                os << "in_room(" << var_name(depth + i) << ")";
                first = false;
            }
            for (int i = 0; i < k; ++i) {
                // body index 0 resolves to witness i
                os << " & (";
                fof(os, f->kids[0], depth + i + 1);
                os << ")";
            }
            os << "))";
            break;
        }
    }
}

}  // namespace

std::string emit_tptp(const std::vector<std::pair<int, FormulaPtr>>& formulas,
                      const Domain& domain) {
    std::ostringstream os;
    os << "% finite-room FOF problem, " << domain.roster.size() << " constants, "
       << formulas.size() << " clauses\n";
    for (const auto& c : domain.roster)
        os << "fof(room_member_" << c << ", axiom, in_room(" << c << ")).\n";
    const auto& r = domain.roster;
    if (r.size() >= 2) {
        os << "fof(roster_distinct, axiom, (";
        bool first = true;
        for (std::size_t i = 0; i < r.size(); ++i)
            for (std::size_t j = i + 1; j < r.size(); ++j) {
                if (!first)
                    os << " & ";
                os << r[i] << " != " << r[j];
                first = false;
            }
        os << ")).\n";
    }
    if (!r.empty()) {
        os << "fof(roster_closure, axiom, (![X]: (";
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i)
                os << " | ";
            os << "X = " << r[i];
        }
        os << "))).\n";
    }
    for (const auto& [id, f] : formulas) {
        os << "fof(c" << id << ", axiom, ";
        fof(os, f, 0);
        os << ").\n";
    }
    return os.str();
}

}  // namespace haystacks
