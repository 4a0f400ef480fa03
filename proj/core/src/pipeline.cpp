#include "haystacks/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "haystacks/rng.hpp"
#include "haystacks/util.hpp"

namespace haystacks {

namespace fs = std::filesystem;

void RunConfig::validate() const {
    if (sizes.empty())
        throw ConfigError("sizes: must not be empty");
    int prev = 0;
    for (int s : sizes) {
        if (s < 1 || (s & (s - 1)) != 0)
            throw ConfigError("sizes: " + std::to_string(s) + " is not a power of two");
        if (s <= prev)
            throw ConfigError("sizes: must be strictly increasing");
        prev = s;
    }
    if (quota < 1)
        throw ConfigError("quota: must be >= 1");
    if (workers < 1)
        throw ConfigError("workers: must be >= 1");
    if (workdir.empty())
        throw ConfigError("workdir: must not be empty");
    grammar.validate();
    stage.validate();
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["workers"] = workers;
    j["workdir"] = workdir;
    j["grammar"] = {{"name_budget", grammar.name_budget},
                    {"unary_budget", grammar.unary_budget},
                    {"binary_budget", grammar.binary_budget},
                    {"propositional_budget", grammar.propositional_budget},
                    {"category_weights", grammar.category_weights},
                    {"max_depth", grammar.max_depth}};
    j["stage"] = {{"formulas_per_stage", stage.formulas_per_stage},
                  {"base_size", stage.base_size},
                  {"max_stage", stage.max_stage},
                  {"max_failure_ratio", stage.max_failure_ratio},
                  {"max_conflicts", stage.per_check_budget.max_conflicts},
                  {"timeout_s", stage.per_check_budget.timeout_s}};
    j["mine"] = {{"hypotheses_per_premise", mine.hypotheses_per_premise},
                 {"reuse_prob", mine.reuse_prob},
                 {"min_evidence", mine.min_evidence},
                 {"max_evidence", mine.max_evidence},
                 {"max_examples", mine.max_examples},
                 {"max_conflicts", mine.budget.max_conflicts},
                 {"timeout_s", mine.budget.timeout_s}};
    j["sizes"] = sizes;
    j["quota"] = quota;
    j["corpus_path"] = corpus_path;
    j["prompt_template"] =
        prompt_template == PromptTemplate::Primary ? "primary" : "legacy";
    auto eps = nlohmann::json::array();
    for (const auto& e : endpoints)
        eps.push_back(e.to_json());
    j["endpoints"] = eps;
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig c;
    if (j.contains("seed"))
        c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("workers"))
        c.workers = j.at("workers").get<int>();
    if (j.contains("workdir"))
        c.workdir = j.at("workdir").get<std::string>();
    if (j.contains("grammar")) {
        const auto& g = j.at("grammar");
        if (g.contains("name_budget"))
            c.grammar.name_budget = g.at("name_budget").get<int>();
        if (g.contains("unary_budget"))
            c.grammar.unary_budget = g.at("unary_budget").get<int>();
        if (g.contains("binary_budget"))
            c.grammar.binary_budget = g.at("binary_budget").get<int>();
        if (g.contains("propositional_budget"))
            c.grammar.propositional_budget = g.at("propositional_budget").get<int>();
        if (g.contains("category_weights"))
            c.grammar.category_weights =
                g.at("category_weights").get<std::map<std::string, double>>();
        if (g.contains("max_depth"))
            c.grammar.max_depth = g.at("max_depth").get<int>();
        if (g.contains("names_file"))
            c.grammar.lexicon.names = Lexicon::load_names(g.at("names_file").get<std::string>());
        if (g.contains("unary_file"))
            c.grammar.lexicon.unary =
                Lexicon::load_predicates(g.at("unary_file").get<std::string>());
        if (g.contains("binary_file"))
            c.grammar.lexicon.binary =
                Lexicon::load_predicates(g.at("binary_file").get<std::string>());
        if (g.contains("propositional_file"))
            c.grammar.lexicon.propositional =
                Lexicon::load_predicates(g.at("propositional_file").get<std::string>());
    }
    if (j.contains("stage")) {
        const auto& s = j.at("stage");
        if (s.contains("formulas_per_stage"))
            c.stage.formulas_per_stage = s.at("formulas_per_stage").get<int>();
        if (s.contains("base_size"))
            c.stage.base_size = s.at("base_size").get<int>();
        if (s.contains("max_stage"))
            c.stage.max_stage = s.at("max_stage").get<int>();
        if (s.contains("max_failure_ratio"))
            c.stage.max_failure_ratio = s.at("max_failure_ratio").get<double>();
        if (s.contains("max_conflicts"))
            c.stage.per_check_budget.max_conflicts = s.at("max_conflicts").get<std::int64_t>();
        if (s.contains("timeout_s"))
            c.stage.per_check_budget.timeout_s = s.at("timeout_s").get<double>();
    }
    if (j.contains("mine")) {
        const auto& m = j.at("mine");
        if (m.contains("hypotheses_per_premise"))
            c.mine.hypotheses_per_premise = m.at("hypotheses_per_premise").get<int>();
        if (m.contains("reuse_prob"))
            c.mine.reuse_prob = m.at("reuse_prob").get<double>();
        if (m.contains("min_evidence"))
            c.mine.min_evidence = m.at("min_evidence").get<int>();
        if (m.contains("max_evidence"))
            c.mine.max_evidence = m.at("max_evidence").get<int>();
        if (m.contains("max_examples"))
            c.mine.max_examples = m.at("max_examples").get<int>();
        if (m.contains("max_conflicts"))
            c.mine.budget.max_conflicts = m.at("max_conflicts").get<std::int64_t>();
        if (m.contains("timeout_s"))
            c.mine.budget.timeout_s = m.at("timeout_s").get<double>();
    }
    if (j.contains("sizes"))
        c.sizes = j.at("sizes").get<std::vector<int>>();
    if (j.contains("quota"))
        c.quota = j.at("quota").get<int>();
    if (j.contains("corpus_path"))
        c.corpus_path = j.at("corpus_path").get<std::string>();
    if (j.contains("prompt_template")) {
        const std::string t = j.at("prompt_template").get<std::string>();
        if (t == "primary")
            c.prompt_template = PromptTemplate::Primary;
        else if (t == "legacy")
            c.prompt_template = PromptTemplate::Legacy;
        else
            throw ConfigError("prompt_template: unknown value " + t);
    }
    if (j.contains("endpoints"))
        for (const auto& e : j.at("endpoints"))
            c.endpoints.push_back(EndpointConfig::from_json(e));
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const std::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    RunConfig c = from_json(j);
    c.validate();
    return c;
}

std::string stage_path(const std::string& workdir, int stage) {
    return workdir + "/stage_" + std::to_string(stage) + ".jsonl";
}
std::string merge_log_path(const std::string& workdir, int stage) {
    return workdir + "/merge_log_stage_" + std::to_string(stage) + ".jsonl";
}
std::string certified_path(const std::string& workdir) {
    return workdir + "/certified.jsonl";
}
std::string dataset_path(const std::string& workdir, HaystackMode mode) {
    return workdir + "/dataset_" + to_string(mode) + ".jsonl";
}
std::string prompts_path(const std::string& workdir) {
    return workdir + "/prompts.jsonl";
}
std::string records_path(const std::string& workdir, const std::string& endpoint_name) {
    return workdir + "/records_" + endpoint_name + ".jsonl";
}
std::string report_path(const std::string& workdir) {
    return workdir + "/report.tsv";
}

namespace {

void require(const std::string& path, const std::string& producer) {
    if (!fs::exists(path))
        throw MissingPrerequisite(path + " is missing; run `" + producer + "` first");
}

std::uint64_t derive_seed2(std::uint64_t base, const char* label, int a, int b) {
    return derive_seed(base, label, static_cast<std::uint64_t>(a) * 1000003u +
                                        static_cast<std::uint64_t>(b));
}

}  // namespace

bool run_gen_base(const RunConfig& cfg) {
    const std::string out = stage_path(cfg.workdir, 0);
    if (fs::exists(out))
        return false;
    fs::create_directories(cfg.workdir);

    ClauseGrammar grammar(cfg.grammar);
    const int K = cfg.stage.formulas_per_stage;
    std::vector<StageFormula> bases(K);

    parallel_for(K, cfg.workers, [&](int k) {
        // resample until the base conjunction is satisfiable
        for (int attempt = 0;; ++attempt) {
            if (attempt >= 64)
                throw MergeError("base formula " + std::to_string(k) +
                                 ": no satisfiable draw in 64 attempts");
            std::uint64_t s = derive_seed2(cfg.seed, "base", k, attempt);
            StageFormula f;
            f.stage = 0;
            f.clauses = grammar.generate_base_formula(cfg.stage.base_size, s);
            for (auto& c : f.clauses)  // stage-0 lineage survives merges
                c.origin = std::to_string(k) + ":" + std::to_string(c.id);
            std::vector<std::pair<int, FormulaPtr>> fs_;
            for (const auto& c : f.clauses)
                fs_.emplace_back(c.id, c.formula);
            GroundCNF cnf = ground(fs_, grammar.domain());
            SourceSolver solver(cnf);
            SatVerdict v = solver.solve_all(cfg.stage.per_check_budget);
            if (v.sat()) {
                f.model_digest = model_digest(v.model);
                bases[k] = std::move(f);
                return;
            }
        }
    });

    write_stage_file(out, bases);
    return true;
}

bool run_merge(const RunConfig& cfg) {
    const std::string last = stage_path(cfg.workdir, cfg.stage.max_stage);
    if (fs::exists(last))
        return false;
    require(stage_path(cfg.workdir, 0), "gen-base");

    ClauseGrammar grammar(cfg.grammar);
    StageConfig sc = cfg.stage;
    sc.seed = derive_seed(cfg.seed, "ladder");
    sc.workers = cfg.workers;
    std::vector<StageFormula> bases = read_stage_file(stage_path(cfg.workdir, 0));
    LadderResult ladder = run_ladder(sc, grammar.domain(), std::move(bases));

    for (int s = 1; s < static_cast<int>(ladder.stages.size()); ++s) {
        write_stage_file(stage_path(cfg.workdir, s), ladder.stages[s]);
        std::ostringstream os;
        for (const auto& rec : ladder.merge_logs[s - 1]) {
            nlohmann::json j;
            j["pair_a"] = rec.pair_a;
            j["pair_b"] = rec.pair_b;
            j["ok"] = rec.ok;
            auto rem = nlohmann::json::array();
            for (const auto& ev : rec.removals)
                rem.push_back(ev.to_json());
            j["removals"] = rem;
            os << j.dump() << "\n";
        }
        atomic_write_file(merge_log_path(cfg.workdir, s), os.str());
    }
    return true;
}

bool run_mine(const RunConfig& cfg) {
    const std::string out = certified_path(cfg.workdir);
    if (fs::exists(out))
        return false;
    require(stage_path(cfg.workdir, cfg.stage.max_stage), "merge");

    ClauseGrammar grammar(cfg.grammar);
    std::vector<StageFormula> premises =
        read_stage_file(stage_path(cfg.workdir, cfg.stage.max_stage));
    MineConfig mc = cfg.mine;
    mc.seed = derive_seed(cfg.seed, "mine");
    mc.workers = cfg.workers;
    std::vector<CertifiedExample> certified = haystacks::mine(premises, grammar, mc);

    std::ostringstream os;
    for (const auto& e : certified)
        os << e.to_json().dump() << "\n";
    atomic_write_file(out, os.str());
    return true;
}

namespace {

std::vector<CertifiedExample> read_certified(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<CertifiedExample> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty())
            out.push_back(CertifiedExample::from_json(nlohmann::json::parse(line)));
    return out;
}

}  // namespace

bool run_assemble(const RunConfig& cfg, HaystackMode mode) {
    if (mode == HaystackMode::Padded)
        throw ConfigError("padded datasets come from the pad step, not assemble");
    const std::string out = dataset_path(cfg.workdir, mode);
    if (fs::exists(out))
        return false;
    require(certified_path(cfg.workdir), "mine");

    std::vector<CertifiedExample> certified = read_certified(certified_path(cfg.workdir));
    const int max_size = cfg.sizes.back();

    std::vector<HaystackExample> dataset;
    std::map<std::pair<int, int>, int> cell_count;  // (n, evidence k) -> count
    for (std::size_t i = 0; i < certified.size(); ++i) {
        const auto& ex = certified[i];
        if (static_cast<int>(ex.premise.size()) < max_size)
            continue;
        const int k = static_cast<int>(ex.evidence.size());
        for (int n : cfg.sizes) {
            int& count = cell_count[{n, k}];
            if (count >= cfg.quota)
                continue;
            HaystackExample h = subsample(
                ex, n, derive_seed2(cfg.seed, "subsample", static_cast<int>(i), n));
            if (mode == HaystackMode::Embedded)
                h = embed_hypothesis(
                    h, derive_seed2(cfg.seed, "embed", static_cast<int>(i), n));
            h.id = std::to_string(i) + "-n" + std::to_string(n) + "-" + to_string(mode);
            dataset.push_back(std::move(h));
            ++count;
        }
    }
    write_dataset(out, dataset);
    return true;
}

bool run_pad(const RunConfig& cfg) {
    const std::string out = dataset_path(cfg.workdir, HaystackMode::Padded);
    if (fs::exists(out))
        return false;
    require(dataset_path(cfg.workdir, HaystackMode::Standard), "assemble");
    if (cfg.corpus_path.empty())
        throw ConfigError("corpus_path: required for the pad step");

    PaddingCorpus corpus = split_sentences(read_file(cfg.corpus_path));
    std::vector<HaystackExample> dataset =
        read_dataset(dataset_path(cfg.workdir, HaystackMode::Standard));
    std::vector<HaystackExample> padded;
    padded.reserve(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        HaystackExample p = pad_with_corpus(
            dataset[i], corpus, derive_seed(cfg.seed, "pad", static_cast<int>(i)));
        const std::string suffix = "-standard";
        if (p.id.size() > suffix.size() &&
            p.id.compare(p.id.size() - suffix.size(), suffix.size(), suffix) == 0)
            p.id.resize(p.id.size() - suffix.size());
        p.id += "-padded";
        padded.push_back(std::move(p));
    }
    write_dataset(out, padded);
    return true;
}

bool run_prompt(const RunConfig& cfg) {
    const std::string out = prompts_path(cfg.workdir);
    if (fs::exists(out))
        return false;

    std::vector<PromptRecord> prompts;
    bool any_input = false;
    for (HaystackMode m :
         {HaystackMode::Standard, HaystackMode::Padded, HaystackMode::Embedded}) {
        const std::string in = dataset_path(cfg.workdir, m);
        if (!fs::exists(in))
            continue;
        any_input = true;
        for (const auto& ex : read_dataset(in))
            prompts.push_back(render_prompt(ex, cfg.prompt_template));
    }
    if (!any_input)
        throw MissingPrerequisite("no dataset files in " + cfg.workdir +
                                  "; run `assemble` first");
    write_prompts(out, prompts);
    return true;
}

namespace {

const EndpointConfig& find_endpoint(const RunConfig& cfg, const std::string& name) {
    for (const auto& e : cfg.endpoints)
        if (e.name == name)
            return e;
    throw ConfigError("endpoints: no endpoint named " + name);
}

}  // namespace

bool run_query(const RunConfig& cfg, const std::string& endpoint_name) {
    const std::string out = records_path(cfg.workdir, endpoint_name);
    if (fs::exists(out))
        return false;
    require(prompts_path(cfg.workdir), "prompt");

    EndpointConfig ep = find_endpoint(cfg, endpoint_name);
    if (ep.cache_dir.empty())
        ep.cache_dir = cfg.workdir + "/cache/" + endpoint_name;
    std::vector<PromptRecord> prompts = read_prompts(prompts_path(cfg.workdir));
    std::vector<EvalRecord> records = query_model(ep, prompts, cfg.workers);
    write_records(out, records);
    return true;
}

bool run_score(const RunConfig& cfg, const std::string& endpoint_name) {
    const std::string path = records_path(cfg.workdir, endpoint_name);
    require(path, "query");
    std::vector<EvalRecord> records = read_records(path);
    for (auto& r : records) {
        if (r.transport_error)
            continue;
        ParsedAnswer parsed = parse_answer(r.raw_output);
        r.prediction = parsed.ids;
        r.parse_status = parsed.status;
        r.jaccard = score(r.prediction, std::set<int>(r.gold.begin(), r.gold.end()));
    }
    write_records(path, records);
    return true;
}

bool run_report(const RunConfig& cfg) {
    std::vector<EvalRecord> all;
    bool any = false;
    for (const auto& e : cfg.endpoints) {
        const std::string path = records_path(cfg.workdir, e.name);
        if (!fs::exists(path))
            continue;
        any = true;
        for (auto& r : read_records(path))
            all.push_back(std::move(r));
    }
    if (!any)
        throw MissingPrerequisite("no record files in " + cfg.workdir +
                                  "; run `query` first");
    atomic_write_file(report_path(cfg.workdir), render_report(aggregate(all)));
    return true;
}

namespace {

void audit_example(const HaystackExample& h,
                   const std::map<std::pair<int, int>, const CertifiedExample*>& certified,
                   const Domain& domain, const SolveLimits& budget) {
    auto fail = [&](const std::string& why) {
        throw AuditError("example " + h.id + ": " + why);
    };

    if (static_cast<int>(h.lines.size()) != h.n)
        fail("line count differs from n");
    if (static_cast<int>(h.gold.size()) != h.k)
        fail("gold size differs from k");
    if (static_cast<int>(h.prov.clause_ids.size()) != h.n)
        fail("provenance clause ids do not cover all lines");
    for (int g : h.gold)
        if (g < 0 || g >= h.n)
            fail("gold index out of range");

    auto it = certified.find({h.prov.premise_index, h.prov.hypothesis_index});
    if (it == certified.end())
        fail("no certified source example");
    const CertifiedExample& src = *it->second;

    std::map<int, const SourcedClause*> by_id;
    for (const auto& c : src.premise)
        by_id[c.id] = &c;

    // reconstruct the logical premise; line -1 is the embedded hypothesis
    std::vector<SourcedClause> clauses;
    int embedded_line = -1;
    for (int i = 0; i < h.n; ++i) {
        int cid = h.prov.clause_ids[i];
        if (cid == -1) {
            if (h.mode != HaystackMode::Embedded)
                fail("hypothesis marker outside embedded mode");
            if (embedded_line != -1)
                fail("multiple hypothesis lines");
            embedded_line = i;
            if (h.lines[i] != h.hypothesis)
                fail("embedded hypothesis surface mismatch");
            continue;
        }
        auto cit = by_id.find(cid);
        if (cit == by_id.end())
            fail("line " + line_id(i) + " has unknown clause id");
        clauses.push_back(*cit->second);
        if (h.mode != HaystackMode::Padded || std::count(h.gold.begin(), h.gold.end(), i))
            if (h.lines[i] != cit->second->english)
                fail("line " + line_id(i) + " surface differs from its clause");
    }
    if (h.mode == HaystackMode::Embedded && embedded_line == -1)
        fail("embedded mode without a hypothesis line");

    // gold lines must map exactly onto the certified evidence set
    std::set<int> gold_ids;
    for (int g : h.gold) {
        int cid = h.prov.clause_ids[g];
        if (cid == -1)
            continue;
        gold_ids.insert(cid);
    }
    std::set<int> evidence(src.evidence.begin(), src.evidence.end());
    if (gold_ids != evidence)
        fail("gold lines do not match the certified evidence");
    if (h.hypothesis != src.hypothesis.english)
        fail("hypothesis surface differs from the certified one");

    if (label_pair(clauses, src.hypothesis, domain, budget) != PairLabel::Contradiction)
        fail("premise does not contradict the hypothesis");

    std::vector<SourcedClause> evidence_clauses;
    for (const auto& c : clauses)
        if (evidence.count(c.id))
            evidence_clauses.push_back(c);
    if (label_pair(evidence_clauses, src.hypothesis, domain, budget) !=
        PairLabel::Contradiction)
        fail("evidence set is not sufficient");

    CertifyOutcome nec = certify_necessity(clauses, src.hypothesis, evidence, domain, budget);
    if (!nec.accepted)
        fail("necessity re-check failed: " + nec.reason);
}

}  // namespace

void run_audit(const RunConfig& cfg) {
    require(certified_path(cfg.workdir), "mine");
    std::vector<CertifiedExample> certified = read_certified(certified_path(cfg.workdir));
    std::map<std::pair<int, int>, const CertifiedExample*> index;
    for (const auto& e : certified)
        index[{e.premise_index, e.hypothesis_index}] = &e;

    ClauseGrammar grammar(cfg.grammar);
    bool any = false;
    for (HaystackMode m :
         {HaystackMode::Standard, HaystackMode::Padded, HaystackMode::Embedded}) {
        const std::string path = dataset_path(cfg.workdir, m);
        if (!fs::exists(path))
            continue;
        any = true;
        std::vector<HaystackExample> dataset = read_dataset(path);
        parallel_for(static_cast<int>(dataset.size()), cfg.workers, [&](int i) {
            audit_example(dataset[i], index, grammar.domain(), cfg.mine.budget);
        });
    }
    if (!any)
        throw MissingPrerequisite("no dataset files in " + cfg.workdir +
                                  "; run `assemble` first");
}

}  // namespace haystacks
