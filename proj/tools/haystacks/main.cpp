#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "haystacks/pipeline.hpp"

using namespace haystacks;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAudit = 2;
constexpr int kExitMissing = 3;

struct Options {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = 0;
    std::string workdir;
    std::vector<int> sizes;
    std::string mode = "standard";
    std::string corpus;
    std::string model;
    std::string endpoint;
};

RunConfig effective_config(const Options& opt) {
    RunConfig cfg;
    if (!opt.config_path.empty())
        cfg = RunConfig::load(opt.config_path);
    if (opt.seed_set)
        cfg.seed = opt.seed;
    if (opt.workers > 0)
        cfg.workers = opt.workers;
    if (!opt.workdir.empty())
        cfg.workdir = opt.workdir;
    if (!opt.sizes.empty())
        cfg.sizes = opt.sizes;
    if (!opt.corpus.empty())
        cfg.corpus_path = opt.corpus;
    if (!opt.model.empty() && !cfg.endpoints.empty() && opt.endpoint.empty())
        cfg.endpoints.front().model = opt.model;
    cfg.validate();
    return cfg;
}

void report_step(const char* step, bool ran) {
    std::printf("%s: %s\n", step, ran ? "done" : "up to date (checkpoint found)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Logic-haystack dataset generation and evaluation pipeline"};
    app.require_subcommand(1);
    app.fallthrough();  // accept global flags after the subcommand too

    Options opt;
    app.add_option("--config", opt.config_path, "JSON run configuration");
    app.add_option("--seed", opt.seed, "global seed override")
        ->each([&](const std::string&) { opt.seed_set = true; });
    app.add_option("--workers", opt.workers, "worker-pool size override");
    app.add_option("--workdir", opt.workdir, "working directory override");
    app.add_option("--sizes", opt.sizes, "ladder sizes override (powers of two)");
    app.add_option("--corpus", opt.corpus, "padding corpus text file");
    app.add_option("--model", opt.model, "model name override for the first endpoint");
    app.add_option("--endpoint", opt.endpoint, "endpoint name for query/score");

    auto* gen = app.add_subcommand("gen-base", "generate satisfiable stage-0 formulas");
    auto* merge = app.add_subcommand("merge", "run the satisfiable-merging stage ladder");
    auto* mine = app.add_subcommand("mine", "mine certified contradiction examples");
    auto* assemble = app.add_subcommand("assemble", "build the sized dataset ladder");
    assemble->add_option("--mode", opt.mode, "standard or embedded")
        ->check(CLI::IsMember({"standard", "embedded"}));
    auto* pad = app.add_subcommand("pad", "replace distractors with corpus sentences");
    auto* prompt = app.add_subcommand("prompt", "render prompts for all built datasets");
    auto* query = app.add_subcommand("query", "send prompts to a model endpoint");
    auto* score = app.add_subcommand("score", "re-parse and re-score raw outputs");
    auto* report = app.add_subcommand("report", "aggregate scores into a table");
    auto* audit = app.add_subcommand("audit", "re-certify every released example");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        RunConfig cfg = effective_config(opt);
        if (gen->parsed()) {
            report_step("gen-base", run_gen_base(cfg));
        } else if (merge->parsed()) {
            report_step("merge", run_merge(cfg));
        } else if (mine->parsed()) {
            report_step("mine", run_mine(cfg));
        } else if (assemble->parsed()) {
            report_step("assemble", run_assemble(cfg, mode_from_string(opt.mode)));
        } else if (pad->parsed()) {
            report_step("pad", run_pad(cfg));
        } else if (prompt->parsed()) {
            report_step("prompt", run_prompt(cfg));
        } else if (query->parsed()) {
            if (opt.endpoint.empty())
                throw ConfigError("--endpoint is required for query");
            report_step("query", run_query(cfg, opt.endpoint));
        } else if (score->parsed()) {
            if (opt.endpoint.empty())
                throw ConfigError("--endpoint is required for score");
            report_step("score", run_score(cfg, opt.endpoint));
        } else if (report->parsed()) {
            report_step("report", run_report(cfg));
            std::printf("%s\n", report_path(cfg.workdir).c_str());
        } else if (audit->parsed()) {
            run_audit(cfg);
            std::printf("audit: all examples certified\n");
        }
    } catch (const AuditError& e) {
        std::fprintf(stderr, "audit failure: %s\n", e.what());
        return kExitAudit;
    } catch (const MissingPrerequisite& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitMissing;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitOk;
}
