#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "haystacks/pipeline.hpp"
#include "haystacks/util.hpp"

using namespace haystacks;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) {
        path = fs::temp_directory_path() / name;
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

RunConfig small_config(const std::string& workdir) {
    RunConfig cfg;
    cfg.seed = 7;
    cfg.workers = 4;
    cfg.workdir = workdir;
    cfg.stage.formulas_per_stage = 6;
    cfg.stage.base_size = 12;
    cfg.stage.max_stage = 1;
    cfg.mine.hypotheses_per_premise = 32;
    cfg.sizes = {4, 8};
    cfg.quota = 50;
    return cfg;
}

std::string write_corpus(const fs::path& dir) {
    const std::string path = (dir / "corpus.txt").string();
    std::string text;
    for (int i = 0; i < 60; ++i)
        text += "Filler sentence number " + std::to_string(i) + " rolls on. ";
    atomic_write_file(path, text);
    return path;
}

}  // namespace

TEST_CASE("run config validation names the offending field") {
    RunConfig cfg = small_config("w");
    CHECK_NOTHROW(cfg.validate());

    cfg.sizes = {4, 12};
    try {
        cfg.validate();
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("sizes") != std::string::npos);
        CHECK(std::string(e.what()).find("12") != std::string::npos);
    }

    cfg = small_config("w");
    cfg.sizes = {8, 8};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config("w");
    cfg.sizes.clear();
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config("w");
    cfg.quota = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config("w");
    cfg.workers = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config("w");
    cfg.workdir.clear();
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("run config JSON round-trip") {
    RunConfig cfg = small_config("w");
    cfg.prompt_template = PromptTemplate::Legacy;
    cfg.corpus_path = "corpus.txt";
    EndpointConfig ep;
    ep.name = "m";
    ep.base_url = "http://127.0.0.1:1";
    ep.model = "m-model";
    cfg.endpoints.push_back(ep);

    RunConfig back = RunConfig::from_json(cfg.to_json());
    CHECK(back.to_json().dump() == cfg.to_json().dump());
    CHECK(back.prompt_template == PromptTemplate::Legacy);
    CHECK(back.sizes == cfg.sizes);
    REQUIRE(back.endpoints.size() == 1);
    CHECK(back.endpoints[0].name == "m");

    nlohmann::json bad = cfg.to_json();
    bad["prompt_template"] = "mystery";
    CHECK_THROWS_AS(RunConfig::from_json(bad), ConfigError);
}

TEST_CASE("missing prerequisites name the step that produces them") {
    TempDir tmp("haystacks_pipeline_missing");
    RunConfig cfg = small_config((tmp.path / "w").string());
    try {
        run_merge(cfg);
        FAIL("expected a missing prerequisite");
    } catch (const MissingPrerequisite& e) {
        CHECK(std::string(e.what()).find("gen-base") != std::string::npos);
    }
    try {
        run_mine(cfg);
        FAIL("expected a missing prerequisite");
    } catch (const MissingPrerequisite& e) {
        CHECK(std::string(e.what()).find("merge") != std::string::npos);
    }
    CHECK_THROWS_AS(run_assemble(cfg, HaystackMode::Standard), MissingPrerequisite);
    CHECK_THROWS_AS(run_pad(cfg), MissingPrerequisite);
    CHECK_THROWS_AS(run_prompt(cfg), MissingPrerequisite);
    CHECK_THROWS_AS(run_report(cfg), MissingPrerequisite);
    CHECK_THROWS_AS(run_audit(cfg), MissingPrerequisite);
    CHECK_THROWS_AS(run_assemble(cfg, HaystackMode::Padded), ConfigError);
}

TEST_CASE("desk run: generate, merge, mine, assemble, pad, prompt, audit") {
    TempDir tmp("haystacks_pipeline_desk");
    RunConfig cfg = small_config((tmp.path / "w").string());
    cfg.corpus_path = write_corpus(tmp.path);

    CHECK(run_gen_base(cfg));
    CHECK(fs::exists(stage_path(cfg.workdir, 0)));
    CHECK(run_merge(cfg));
    CHECK(fs::exists(stage_path(cfg.workdir, 1)));
    CHECK(fs::exists(merge_log_path(cfg.workdir, 1)));
    CHECK(run_mine(cfg));
    CHECK(run_assemble(cfg, HaystackMode::Standard));
    CHECK(run_assemble(cfg, HaystackMode::Embedded));
    CHECK(run_pad(cfg));
    CHECK(run_prompt(cfg));

    // each step is a checkpoint: reruns are no-ops
    CHECK(!run_gen_base(cfg));
    CHECK(!run_merge(cfg));
    CHECK(!run_mine(cfg));
    CHECK(!run_assemble(cfg, HaystackMode::Standard));
    CHECK(!run_assemble(cfg, HaystackMode::Embedded));
    CHECK(!run_pad(cfg));
    CHECK(!run_prompt(cfg));

    auto standard = read_dataset(dataset_path(cfg.workdir, HaystackMode::Standard));
    REQUIRE(!standard.empty());
    for (const auto& e : standard) {
        CHECK((e.n == 4 || e.n == 8));
        CHECK(e.mode == HaystackMode::Standard);
        CHECK(e.id.find("-standard") != std::string::npos);
    }
    auto embedded = read_dataset(dataset_path(cfg.workdir, HaystackMode::Embedded));
    REQUIRE(!embedded.empty());
    for (const auto& e : embedded)
        CHECK((e.n == 5 || e.n == 9));
    auto padded = read_dataset(dataset_path(cfg.workdir, HaystackMode::Padded));
    CHECK(padded.size() == standard.size());
    for (const auto& e : padded)
        CHECK(e.id.find("-padded") != std::string::npos);

    auto prompts = read_prompts(prompts_path(cfg.workdir));
    CHECK(prompts.size() == standard.size() + embedded.size() + padded.size());

    CHECK_NOTHROW(run_audit(cfg));

    // score and report from synthetic records for the configured endpoint
    EndpointConfig ep;
    ep.name = "m";
    ep.base_url = "http://127.0.0.1:1";
    ep.model = "m-model";
    cfg.endpoints.push_back(ep);
    std::vector<EvalRecord> records;
    for (const auto& p : prompts) {
        EvalRecord r;
        r.example_id = p.example_id;
        r.model = ep.model;
        r.mode = p.mode;
        r.n = p.n;
        r.k = p.k;
        std::string ans;
        for (int g : p.gold)
            ans += (ans.empty() ? "" : ",") + line_id(g);
        r.raw_output = "<answer>" + ans + "</answer>";
        r.gold = p.gold;
        records.push_back(std::move(r));
    }
    write_records(records_path(cfg.workdir, "m"), records);
    CHECK(run_score(cfg, "m"));
    auto scored = read_records(records_path(cfg.workdir, "m"));
    for (const auto& r : scored) {
        CHECK(r.parse_status == ParseStatus::Ok);
        CHECK(r.jaccard == Rational{1, 1});
    }
    CHECK(run_report(cfg));
    std::string report = read_file(report_path(cfg.workdir));
    CHECK(report.rfind("model\tmode\tn\tk\t", 0) == 0);
    CHECK(report.find("1.000000") != std::string::npos);
}

TEST_CASE("two desk runs from one config are byte-identical") {
    TempDir tmp("haystacks_pipeline_repro");
    RunConfig a = small_config((tmp.path / "a").string());
    RunConfig b = small_config((tmp.path / "b").string());
    for (const RunConfig* cfg : {&a, &b}) {
        run_gen_base(*cfg);
        run_merge(*cfg);
        run_mine(*cfg);
        run_assemble(*cfg, HaystackMode::Standard);
    }
    CHECK(read_file(stage_path(a.workdir, 0)) == read_file(stage_path(b.workdir, 0)));
    CHECK(read_file(stage_path(a.workdir, 1)) == read_file(stage_path(b.workdir, 1)));
    CHECK(read_file(certified_path(a.workdir)) == read_file(certified_path(b.workdir)));
    CHECK(read_file(dataset_path(a.workdir, HaystackMode::Standard)) ==
          read_file(dataset_path(b.workdir, HaystackMode::Standard)));
}

TEST_CASE("the audit flags a corrupted gold set") {
    TempDir tmp("haystacks_pipeline_audit");
    RunConfig cfg = small_config((tmp.path / "w").string());
    run_gen_base(cfg);
    run_merge(cfg);
    run_mine(cfg);
    run_assemble(cfg, HaystackMode::Standard);

    const std::string dpath = dataset_path(cfg.workdir, HaystackMode::Standard);
    auto dataset = read_dataset(dpath);
    REQUIRE(!dataset.empty());
    // point one gold entry at a non-evidence line
    bool corrupted = false;
    std::string victim;
    for (auto& e : dataset) {
        for (int i = 0; i < e.n && !corrupted; ++i) {
            if (std::count(e.gold.begin(), e.gold.end(), i))
                continue;
            e.gold[0] = i;
            std::sort(e.gold.begin(), e.gold.end());
            victim = e.id;
            corrupted = true;
        }
        if (corrupted)
            break;
    }
    REQUIRE(corrupted);
    write_dataset(dpath, dataset);
    try {
        run_audit(cfg);
        FAIL("expected the audit to reject the dataset");
    } catch (const AuditError& e) {
        CHECK(std::string(e.what()).find(victim) != std::string::npos);
    }
}
