#include "haystacks/mine.hpp"

#include <algorithm>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "haystacks/rng.hpp"
#include "haystacks/util.hpp"

namespace haystacks {

const char* to_string(PairLabel l) {
    switch (l) {
        case PairLabel::Contradiction: return "contradiction";
        case PairLabel::Entailment: return "entailment";
        case PairLabel::Neutral: return "neutral";
        case PairLabel::Unknown: return "unknown";
    }
    return "?";
}

nlohmann::json CertifiedExample::to_json() const {
    nlohmann::json j;
    j["premise_index"] = premise_index;
    j["hypothesis_index"] = hypothesis_index;
    auto arr = nlohmann::json::array();
    for (const auto& c : premise)
        arr.push_back(c.to_json());
    j["premise"] = arr;
    j["hypothesis"] = hypothesis.to_json();
    j["evidence"] = evidence;
    j["certificates"] = certificates;
    return j;
}

CertifiedExample CertifiedExample::from_json(const nlohmann::json& j) {
    CertifiedExample e;
    e.premise_index = j.at("premise_index").get<int>();
    e.hypothesis_index = j.at("hypothesis_index").get<int>();
    for (const auto& c : j.at("premise"))
        e.premise.push_back(SourcedClause::from_json(c));
    e.hypothesis = SourcedClause::from_json(j.at("hypothesis"));
    e.evidence = j.at("evidence").get<std::vector<int>>();
    e.certificates = j.at("certificates").get<std::vector<std::uint64_t>>();
    return e;
}

namespace {

int max_id(const std::vector<SourcedClause>& premise) {
    int m = -1;
    for (const auto& c : premise)
        m = std::max(m, c.id);
    return m;
}

std::vector<std::pair<int, FormulaPtr>> premise_formulas(
    const std::vector<SourcedClause>& premise) {
    std::vector<std::pair<int, FormulaPtr>> fs;
    fs.reserve(premise.size());
    for (const auto& c : premise)
        fs.emplace_back(c.id, c.formula);
    return fs;
}

std::set<int> premise_id_set(const std::vector<SourcedClause>& premise) {
    std::set<int> ids;
    for (const auto& c : premise)
        ids.insert(c.id);
    return ids;
}

}  // namespace

PairLabel label_pair(const std::vector<SourcedClause>& premise, const SourcedClause& hypothesis,
                     const Domain& domain, const SolveLimits& limits) {
    const int hyp_id = max_id(premise) + 1;
    const int neg_id = hyp_id + 1;
    auto fs = premise_formulas(premise);
    fs.emplace_back(hyp_id, hypothesis.formula);
    fs.emplace_back(neg_id, negate(hypothesis.formula));
    GroundCNF cnf = ground(fs, domain);
    SourceSolver solver(cnf);
    std::set<int> ids = premise_id_set(premise);
    try {
        std::set<int> with_h = ids;
        with_h.insert(hyp_id);
        if (!solver.solve(with_h, limits).sat())
            return PairLabel::Contradiction;
        std::set<int> with_neg = ids;
        with_neg.insert(neg_id);
        if (!solver.solve(with_neg, limits).sat())
            return PairLabel::Entailment;
        return PairLabel::Neutral;
    } catch (const SolverBudgetExceeded&) {
        return PairLabel::Unknown;
    }
}

std::set<int> sufficient_evidence(const std::vector<SourcedClause>& premise,
                                  const SourcedClause& hypothesis, const Domain& domain,
                                  const SolveLimits& limits) {
    const int hyp_id = max_id(premise) + 1;
    auto fs = premise_formulas(premise);
    fs.emplace_back(hyp_id, hypothesis.formula);
    GroundCNF cnf = ground(fs, domain);
    SourceSolver solver(cnf);
    std::set<int> ids = premise_id_set(premise);
    ids.insert(hyp_id);
    SatVerdict v = solver.solve(ids, limits);
    if (v.sat())
        throw std::logic_error("sufficient_evidence requires a contradiction pair");
    std::set<int> core = v.core;
    core.erase(hyp_id);
    return core;
}

CertifyOutcome certify_necessity(const std::vector<SourcedClause>& premise,
                                 const SourcedClause& hypothesis,
                                 const std::set<int>& evidence, const Domain& domain,
                                 const SolveLimits& limits) {
    CertifyOutcome out;
    if (evidence.empty()) {
        out.reason = "empty evidence cannot be sufficient";
        return out;
    }
    const int hyp_id = max_id(premise) + 1;
    auto fs = premise_formulas(premise);
    fs.emplace_back(hyp_id, hypothesis.formula);
    GroundCNF cnf = ground(fs, domain);
    SourceSolver solver(cnf);
    std::set<int> all = premise_id_set(premise);
    for (int e : evidence)
        if (!all.count(e)) {
            out.reason = "evidence id not in premise: " + std::to_string(e);
            return out;
        }
    all.insert(hyp_id);
    try {
        for (int e : evidence) {
            std::set<int> active = all;
            active.erase(e);
            SatVerdict v = solver.solve(active, limits);
            if (!v.sat()) {
                out.failed_evidence = e;
                out.reason = "clause " + std::to_string(e) + " is not necessary";
                out.certificates.clear();
                return out;
            }
            out.certificates.push_back(model_digest(v.model));
        }
    } catch (const SolverBudgetExceeded&) {
        out.certificates.clear();
        out.reason = "unknown";
        return out;
    }
    out.accepted = true;
    return out;
}

std::vector<CertifiedExample> mine(const std::vector<StageFormula>& premises,
                                   const ClauseGrammar& grammar, const MineConfig& cfg) {
    const Domain& domain = grammar.domain();
    std::vector<std::vector<CertifiedExample>> per_premise(premises.size());

    parallel_for(static_cast<int>(premises.size()), cfg.workers, [&](int pi) {
        const auto& premise = premises[pi].clauses;
        const int n = max_id(premise) + 1;
        std::unordered_set<std::string> premise_surfaces;
        for (const auto& c : premise)
            premise_surfaces.insert(c.english);

        auto rng = make_rng(derive_seed(cfg.seed, "mine-hyp", pi));
        SymbolPool pool = grammar.collect_symbols(premise);

        // sample first so the draw sequence is independent of solver work
        std::vector<SourcedClause> candidates;
        std::unordered_set<std::string> seen;
        for (int j = 0; j < cfg.hypotheses_per_premise; ++j) {
            SourcedClause h = grammar.sample_hypothesis(rng, &pool, cfg.reuse_prob);
            if (premise_surfaces.count(h.english))
                continue;  // same surface form as a premise line
            if (!seen.insert(h.english).second)
                continue;
            h.id = static_cast<int>(candidates.size());
            candidates.push_back(std::move(h));
        }
        if (candidates.empty())
            return;

        // one grounding and one incremental solver per premise: the
        // hypothesis (and its negation) of candidate j get source ids
        // n+2j and n+2j+1
        auto fs = premise_formulas(premise);
        for (std::size_t j = 0; j < candidates.size(); ++j) {
            fs.emplace_back(n + 2 * static_cast<int>(j), candidates[j].formula);
            fs.emplace_back(n + 2 * static_cast<int>(j) + 1, negate(candidates[j].formula));
        }
        GroundCNF cnf = ground(fs, domain);
        SourceSolver solver(cnf);
        const std::set<int> base_ids = premise_id_set(premise);

        for (std::size_t j = 0; j < candidates.size(); ++j) {
            const int hyp_id = n + 2 * static_cast<int>(j);
            try {
                std::set<int> with_h = base_ids;
                with_h.insert(hyp_id);
                SatVerdict v = solver.solve(with_h, cfg.budget);
                if (v.sat())
                    continue;  // not a contradiction; retrieval uses contradictions only
                std::set<int> evidence = v.core;
                evidence.erase(hyp_id);
                const int k = static_cast<int>(evidence.size());
                if (k < cfg.min_evidence || k > cfg.max_evidence)
                    continue;

                // counterfactual necessity of every evidence clause
                std::vector<std::uint64_t> certs;
                bool necessary = true;
                for (int e : evidence) {
                    std::set<int> active = with_h;
                    active.erase(e);
                    SatVerdict cv = solver.solve(active, cfg.budget);
                    if (!cv.sat()) {
                        necessary = false;
                        break;
                    }
                    certs.push_back(model_digest(cv.model));
                }
                if (!necessary)
                    continue;

                CertifiedExample ex;
                ex.premise_index = pi;
                ex.hypothesis_index = static_cast<int>(j);
                ex.premise = premise;
                ex.hypothesis = candidates[j];
                ex.evidence.assign(evidence.begin(), evidence.end());
                ex.certificates = std::move(certs);
                per_premise[pi].push_back(std::move(ex));
            } catch (const SolverBudgetExceeded&) {
                continue;  // candidate skipped
            }
        }
    });

    std::vector<CertifiedExample> out;
    for (auto& v : per_premise)
        for (auto& e : v) {
            if (cfg.max_examples >= 0 && static_cast<int>(out.size()) >= cfg.max_examples)
                return out;
            out.push_back(std::move(e));
        }
    return out;
}

}  // namespace haystacks
