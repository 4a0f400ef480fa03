#include "haystacks/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace haystacks {

namespace {
constexpr double kVarDecay = 1.0 / 0.95;
constexpr double kClaDecay = 1.0 / 0.999;
constexpr int kRestartBase = 100;

// Luby sequence (1,1,2,1,1,2,4,...).
int luby(int i) {
    int size = 1, seq = 0;
    while (size < i + 1) {
        ++seq;
        size = 2 * size + 1;
    }
    while (size - 1 != i) {
        size = (size - 1) / 2;
        --seq;
        i = i % size;
    }
    return 1 << seq;
}
}  // namespace

struct Solver::Clause {
    bool learnt = false;
    bool deleted = false;
    double act = 0.0;
    std::vector<int> lits;  // internal encoding
};

Solver::Solver() = default;

Solver::~Solver() {
    for (Clause* c : clauses_)
        delete c;
    for (Clause* c : learnts_)
        delete c;
}

int Solver::new_var() {
    ++nvars_;
    assigns_.push_back(0);
    polarity_.push_back(1);  // default phase: false
    level_.push_back(0);
    reason_.push_back(nullptr);
    activity_.push_back(0.0);
    seen_.push_back(0);
    heap_pos_.push_back(-1);
    watches_.emplace_back();
    watches_.emplace_back();
    heap_insert(nvars_ - 1);
    return nvars_;
}

int Solver::value_lit(int l) const {
    signed char a = assigns_[var_of(l)];
    return (l & 1) ? -a : a;
}

void Solver::attach(Clause* c) {
    watches_[neg(c->lits[0])].push_back(c);
    watches_[neg(c->lits[1])].push_back(c);
}

void Solver::add_clause(const std::vector<int>& dimacs_lits) {
    if (!ok_)
        return;
    if (decision_level() != 0)
        throw std::logic_error("add_clause outside decision level 0");
    std::vector<int> ls;
    ls.reserve(dimacs_lits.size());
    for (int d : dimacs_lits) {
        int v = d > 0 ? d : -d;
        if (v < 1 || v > nvars_)
            throw std::logic_error("literal over unknown variable");
        ls.push_back(ilit(d));
    }
    std::sort(ls.begin(), ls.end());
    ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
    std::vector<int> out;
    for (std::size_t i = 0; i < ls.size(); ++i) {
        if (i + 1 < ls.size() && ls[i + 1] == neg(ls[i]))
            return;  // tautology
        int val = value_lit(ls[i]);
        if (val > 0)
            return;  // already satisfied at root
        if (val < 0)
            continue;  // false at root, drop literal
        out.push_back(ls[i]);
    }
    if (out.empty()) {
        ok_ = false;
        return;
    }
    if (out.size() == 1) {
        enqueue(out[0], nullptr);
        if (propagate() != nullptr)
            ok_ = false;
        return;
    }
    auto* c = new Clause{false, false, 0.0, std::move(out)};
    clauses_.push_back(c);
    attach(c);
}

void Solver::enqueue(int l, Clause* from) {
    int v = var_of(l);
    assigns_[v] = (l & 1) ? -1 : 1;
    level_[v] = decision_level();
    reason_[v] = from;
    trail_.push_back(l);
    ++stats_.propagations;
}

Solver::Clause* Solver::propagate() {
    Clause* confl = nullptr;
    while (qhead_ < trail_.size()) {
        int p = trail_[qhead_++];
        auto& ws = watches_[p];
        std::size_t i = 0, j = 0;
        while (i < ws.size()) {
            Clause* c = ws[i];
            int false_lit = neg(p);
            auto& lits = c->lits;
            if (lits[0] == false_lit)
                std::swap(lits[0], lits[1]);
            if (value_lit(lits[0]) > 0) {
                ws[j++] = ws[i++];
                continue;
            }
            bool moved = false;
            for (std::size_t k = 2; k < lits.size(); ++k) {
                if (value_lit(lits[k]) >= 0) {
                    std::swap(lits[1], lits[k]);
                    watches_[neg(lits[1])].push_back(c);
                    moved = true;
                    break;
                }
            }
            if (moved) {
                ++i;  // dropped from this list
                continue;
            }
            ws[j++] = ws[i++];
            if (value_lit(lits[0]) < 0) {
                confl = c;
                qhead_ = trail_.size();
                while (i < ws.size())
                    ws[j++] = ws[i++];
            } else {
                enqueue(lits[0], c);
            }
        }
        ws.resize(j);
    }
    return confl;
}

void Solver::new_decision_level() { trail_lim_.push_back(static_cast<int>(trail_.size())); }

int Solver::decision_level() const { return static_cast<int>(trail_lim_.size()); }

void Solver::cancel_until(int level) {
    if (decision_level() <= level)
        return;
    for (int i = static_cast<int>(trail_.size()) - 1; i >= trail_lim_[level]; --i) {
        int v = var_of(trail_[i]);
        polarity_[v] = static_cast<signed char>(trail_[i] & 1);
        assigns_[v] = 0;
        reason_[v] = nullptr;
        if (heap_pos_[v] < 0)
            heap_insert(v);
    }
    trail_.resize(trail_lim_[level]);
    trail_lim_.resize(level);
    qhead_ = trail_.size();
}

void Solver::bump_var(int v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
        for (double& a : activity_)
            a *= 1e-100;
        var_inc_ *= 1e-100;
    }
    if (heap_pos_[v] >= 0)
        heap_update(v);
}

void Solver::bump_clause(Clause* c) {
    c->act += cla_inc_;
    if (c->act > 1e20) {
        for (Clause* l : learnts_)
            l->act *= 1e-20;
        cla_inc_ *= 1e-20;
    }
}

void Solver::decay_activities() {
    var_inc_ *= kVarDecay;
    cla_inc_ *= kClaDecay;
}

void Solver::analyze(Clause* confl, std::vector<int>& out_learnt, int& out_btlevel) {
    out_learnt.clear();
    out_learnt.push_back(0);  // slot for the asserting literal
    int path_c = 0;
    int p = -1;
    int index = static_cast<int>(trail_.size()) - 1;
    std::vector<int> to_clear;

    do {
        bump_clause(confl);
        auto& lits = confl->lits;
        for (std::size_t j = (p == -1) ? 0 : 1; j < lits.size(); ++j) {
            int q = lits[j];
            int v = var_of(q);
            if (!seen_[v] && level_[v] > 0) {
                seen_[v] = 1;
                to_clear.push_back(v);
                bump_var(v);
                if (level_[v] >= decision_level())
                    ++path_c;
                else
                    out_learnt.push_back(q);
            }
        }
        while (!seen_[var_of(trail_[index--])]) {
        }
        p = trail_[index + 1];
        confl = reason_[var_of(p)];
        seen_[var_of(p)] = 0;
        --path_c;
    } while (path_c > 0);
    out_learnt[0] = neg(p);

    // basic minimization: drop literals implied by the rest
    std::size_t j = 1;
    for (std::size_t i = 1; i < out_learnt.size(); ++i) {
        int v = var_of(out_learnt[i]);
        Clause* r = reason_[v];
        bool redundant = false;
        if (r != nullptr) {
            redundant = true;
            for (int q : r->lits) {
                int w = var_of(q);
                if (w == v)
                    continue;
                if (!seen_[w] && level_[w] > 0) {
                    redundant = false;
                    break;
                }
            }
        }
        if (!redundant)
            out_learnt[j++] = out_learnt[i];
    }
    out_learnt.resize(j);

    if (out_learnt.size() == 1) {
        out_btlevel = 0;
    } else {
        std::size_t max_i = 1;
        for (std::size_t i = 2; i < out_learnt.size(); ++i)
            if (level_[var_of(out_learnt[i])] > level_[var_of(out_learnt[max_i])])
                max_i = i;
        std::swap(out_learnt[1], out_learnt[max_i]);
        out_btlevel = level_[var_of(out_learnt[1])];
    }
    for (int v : to_clear)
        seen_[v] = 0;
}

void Solver::analyze_final(int p, std::vector<int>& out) {
    out.clear();
    out.push_back(to_dimacs(p));
    if (decision_level() == 0)
        return;
    std::vector<int> to_clear;
    seen_[var_of(p)] = 1;
    to_clear.push_back(var_of(p));
    for (int i = static_cast<int>(trail_.size()) - 1; i >= trail_lim_[0]; --i) {
        int v = var_of(trail_[i]);
        if (!seen_[v])
            continue;
        if (reason_[v] == nullptr) {
            // decision within the assumption prefix
            out.push_back(to_dimacs(trail_[i]));
        } else {
            for (int q : reason_[v]->lits) {
                int w = var_of(q);
                if (w != v && level_[w] > 0 && !seen_[w]) {
                    seen_[w] = 1;
                    to_clear.push_back(w);
                }
            }
        }
        seen_[v] = 0;
    }
    for (int v : to_clear)
        seen_[v] = 0;
}

bool Solver::locked(Clause* c) const {
    int v = var_of(c->lits[0]);
    return reason_[v] == c && assigns_[v] != 0;
}

void Solver::reduce_db() {
    // called at decision level 0; drop the less active half
    std::vector<Clause*> sorted = learnts_;
    std::sort(sorted.begin(), sorted.end(),
              [](const Clause* a, const Clause* b) { return a->act < b->act; });
    std::size_t target = sorted.size() / 2;
    std::size_t removed = 0;
    for (Clause* c : sorted) {
        if (removed >= target)
            break;
        if (c->lits.size() <= 2 || locked(c))
            continue;
        c->deleted = true;
        ++removed;
    }
    if (removed == 0)
        return;
    for (auto& ws : watches_)
        ws.erase(std::remove_if(ws.begin(), ws.end(), [](Clause* c) { return c->deleted; }),
                 ws.end());
    std::vector<Clause*> kept;
    kept.reserve(learnts_.size() - removed);
    for (Clause* c : learnts_) {
        if (c->deleted)
            delete c;
        else
            kept.push_back(c);
    }
    learnts_ = std::move(kept);
}

bool Solver::heap_lt(int a, int b) const {
    if (activity_[a] != activity_[b])
        return activity_[a] > activity_[b];
    return a < b;
}

void Solver::heap_up(int i) {
    int v = heap_[i];
    while (i > 0) {
        int parent = (i - 1) / 2;
        if (!heap_lt(v, heap_[parent]))
            break;
        heap_[i] = heap_[parent];
        heap_pos_[heap_[i]] = i;
        i = parent;
    }
    heap_[i] = v;
    heap_pos_[v] = i;
}

void Solver::heap_down(int i) {
    int v = heap_[i];
    int n = static_cast<int>(heap_.size());
    while (true) {
        int child = 2 * i + 1;
        if (child >= n)
            break;
        if (child + 1 < n && heap_lt(heap_[child + 1], heap_[child]))
            ++child;
        if (!heap_lt(heap_[child], v))
            break;
        heap_[i] = heap_[child];
        heap_pos_[heap_[i]] = i;
        i = child;
    }
    heap_[i] = v;
    heap_pos_[v] = i;
}

void Solver::heap_insert(int v) {
    heap_.push_back(v);
    heap_pos_[v] = static_cast<int>(heap_.size()) - 1;
    heap_up(heap_pos_[v]);
}

int Solver::heap_pop() {
    int v = heap_[0];
    heap_pos_[v] = -1;
    heap_[0] = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
        heap_pos_[heap_[0]] = 0;
        heap_down(0);
    }
    return v;
}

void Solver::heap_update(int v) { heap_up(heap_pos_[v]); }

int Solver::pick_branch() {
    while (!heap_.empty()) {
        int v = heap_pop();
        if (assigns_[v] == 0) {
            ++stats_.decisions;
            return 2 * v + (polarity_[v] ? 1 : 0);
        }
    }
    return -1;
}

bool Solver::model_value(int var) const { return model_.at(var) > 0; }

Solver::Result Solver::solve(const std::vector<int>& assumptions) {
    conflict_.clear();
    model_.assign(nvars_ + 1, 0);
    if (!ok_)
        return Result::Unsat;

    std::vector<int> assumps;
    assumps.reserve(assumptions.size());
    for (int d : assumptions) {
        int v = d > 0 ? d : -d;
        if (v < 1 || v > nvars_)
            throw std::logic_error("assumption over unknown variable");
        assumps.push_back(ilit(d));
    }

    const auto t0 = std::chrono::steady_clock::now();
    auto timed_out = [&] {
        if (timeout_s_ <= 0.0)
            return false;
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >
               timeout_s_;
    };

    std::int64_t conflicts_at_entry = static_cast<std::int64_t>(stats_.conflicts);
    std::size_t max_learnts =
        std::max<std::size_t>(4000, clauses_.size() / 3);
    int restart_idx = 0;
    std::int64_t restart_limit = static_cast<std::int64_t>(luby(restart_idx)) * kRestartBase;
    std::int64_t conflict_c = 0;
    std::vector<int> learnt;

    Result res = Result::Unknown;
    while (true) {
        Clause* confl = propagate();
        if (confl != nullptr) {
            ++stats_.conflicts;
            ++conflict_c;
            if (decision_level() == 0) {
                // conflict below the assumption prefix: unsat outright
                conflict_.clear();
                ok_ = false;
                res = Result::Unsat;
                break;
            }
            int btlevel = 0;
            analyze(confl, learnt, btlevel);
            cancel_until(btlevel);
            if (learnt.size() == 1) {
                enqueue(learnt[0], nullptr);
            } else {
                auto* c = new Clause{true, false, 0.0, learnt};
                learnts_.push_back(c);
                attach(c);
                bump_clause(c);
                enqueue(learnt[0], c);
            }
            decay_activities();
            if (conflict_budget_ >= 0 &&
                static_cast<std::int64_t>(stats_.conflicts) - conflicts_at_entry >=
                    conflict_budget_) {
                res = Result::Unknown;
                break;
            }
            if ((stats_.conflicts & 0xff) == 0 && timed_out()) {
                res = Result::Unknown;
                break;
            }
        } else {
            if (conflict_c >= restart_limit) {
                conflict_c = 0;
                ++restart_idx;
                restart_limit = static_cast<std::int64_t>(luby(restart_idx)) * kRestartBase;
                cancel_until(0);
                if (learnts_.size() >= max_learnts) {
                    reduce_db();
                    max_learnts = max_learnts + max_learnts / 5;
                }
                continue;
            }
            int next = -1;
            while (decision_level() < static_cast<int>(assumps.size())) {
                int p = assumps[decision_level()];
                int val = value_lit(p);
                if (val > 0) {
                    new_decision_level();  // dummy level, already satisfied
                } else if (val < 0) {
                    analyze_final(p, conflict_);
                    res = Result::Unsat;
                    goto done;
                } else {
                    next = p;
                    break;
                }
            }
            if (next == -1) {
                next = pick_branch();
                if (next == -1) {
                    model_.assign(nvars_ + 1, 0);
                    for (int v = 0; v < nvars_; ++v)
                        model_[v + 1] = assigns_[v];
                    res = Result::Sat;
                    break;
                }
            }
            new_decision_level();
            enqueue(next, nullptr);
        }
    }
done:
    cancel_until(0);
    return res;
}

}  // namespace haystacks
