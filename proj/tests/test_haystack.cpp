#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "haystacks/haystack.hpp"
#include "haystacks/rng.hpp"
#include "haystacks/util.hpp"
#include "support.hpp"

using namespace haystacks;
using namespace haystacks::testing;

namespace {

const ClauseGrammar& grammar() {
    static const ClauseGrammar g{GrammarConfig{}};
    return g;
}

CertifiedExample certified_fixture(int premise_size, std::uint64_t seed) {
    MineConfig cfg;
    cfg.hypotheses_per_premise = 32;
    cfg.seed = seed;
    for (std::uint64_t s = seed;; ++s) {
        StageFormula f;
        f.clauses = grammar().generate_base_formula(premise_size, s);
        std::vector<std::pair<int, FormulaPtr>> fs;
        for (const auto& c : f.clauses)
            fs.emplace_back(c.id, c.formula);
        auto [v, stats] = solve(ground(fs, grammar().domain()));
        if (!v.sat())
            continue;
        f.model_digest = model_digest(v.model);
        auto mined = mine({f}, grammar(), cfg);
        if (!mined.empty())
            return mined.front();
    }
}

}  // namespace

TEST_CASE("mode names round-trip") {
    for (HaystackMode m : {HaystackMode::Standard, HaystackMode::Padded, HaystackMode::Embedded})
        CHECK(mode_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(mode_from_string("weird"), DatasetError);
}

TEST_CASE("subsampling at full size keeps every line in order") {
    CertifiedExample ex = certified_fixture(8, 10);
    const int total = static_cast<int>(ex.premise.size());
    HaystackExample h = subsample(ex, total, 99);
    REQUIRE(h.n == total);
    REQUIRE(static_cast<int>(h.lines.size()) == total);
    for (int i = 0; i < total; ++i) {
        CHECK(h.lines[i] == ex.premise[i].english);
        CHECK(h.prov.clause_ids[i] == ex.premise[i].id);
    }
    CHECK(h.k == static_cast<int>(ex.evidence.size()));
    for (std::size_t i = 0; i < ex.evidence.size(); ++i)
        CHECK(h.prov.clause_ids[h.gold[i]] == ex.evidence[i]);
}

TEST_CASE("subsampling keeps the evidence and stays sorted") {
    CertifiedExample ex = certified_fixture(16, 20);
    const int k = static_cast<int>(ex.evidence.size());
    std::set<std::string> evidence_surfaces;
    for (const auto& c : ex.premise)
        if (std::count(ex.evidence.begin(), ex.evidence.end(), c.id))
            evidence_surfaces.insert(c.english);
    for (int n : {k, k + 1, 8, 12}) {
        if (n > static_cast<int>(ex.premise.size()))
            continue;
        HaystackExample h = subsample(ex, n, 7);
        CHECK(h.n == n);
        CHECK(h.k == k);
        CHECK(static_cast<int>(h.lines.size()) == n);
        CHECK(std::is_sorted(h.gold.begin(), h.gold.end()));
        std::set<std::string> found;
        for (int g : h.gold) {
            REQUIRE(g >= 0);
            REQUIRE(g < n);
            found.insert(h.lines[g]);
        }
        CHECK(found == evidence_surfaces);
        // clause order of the original premise is preserved
        std::vector<int> ids = h.prov.clause_ids;
        CHECK(std::is_sorted(ids.begin(), ids.end()));
    }
    CHECK_THROWS_AS(subsample(ex, k - 1, 3), DatasetError);
    CHECK_THROWS_AS(subsample(ex, static_cast<int>(ex.premise.size()) + 1, 3), DatasetError);
}

TEST_CASE("padding replaces exactly the distractors with distinct sentences") {
    CertifiedExample ex = certified_fixture(12, 30);
    HaystackExample h = subsample(ex, 8, 11);
    PaddingCorpus corpus;
    for (int i = 0; i < 40; ++i)
        corpus.sentences.push_back("Filler sentence number " + std::to_string(i) + " here");
    HaystackExample padded = pad_with_corpus(h, corpus, 5);
    CHECK(padded.mode == HaystackMode::Padded);
    CHECK(padded.n == h.n);
    CHECK(padded.gold == h.gold);
    CHECK(padded.prov.clause_ids == h.prov.clause_ids);
    std::set<int> gold(h.gold.begin(), h.gold.end());
    std::set<std::string> used;
    for (int i = 0; i < h.n; ++i) {
        if (gold.count(i)) {
            CHECK(padded.lines[i] == h.lines[i]);
        } else {
            CHECK(padded.lines[i] != h.lines[i]);
            CHECK(std::count(corpus.sentences.begin(), corpus.sentences.end(),
                             padded.lines[i]) == 1);
            CHECK(used.insert(padded.lines[i]).second);  // distinct
        }
    }
    PaddingCorpus tiny;
    tiny.sentences = {"Too small a corpus"};
    CHECK_THROWS_AS(pad_with_corpus(h, tiny, 5), DatasetError);
}

TEST_CASE("embedding inserts the hypothesis and shifts gold") {
    CertifiedExample ex = certified_fixture(8, 40);
    HaystackExample h = subsample(ex, static_cast<int>(ex.premise.size()), 1);
    HaystackExample e = embed_hypothesis(h, 17);
    CHECK(e.mode == HaystackMode::Embedded);
    CHECK(e.n == h.n + 1);
    CHECK(e.k == h.k + 1);
    CHECK(std::is_sorted(e.gold.begin(), e.gold.end()));
    // exactly one line carries the hypothesis, flagged with clause id -1
    int hyp_lines = 0, hyp_pos = -1;
    for (int i = 0; i < e.n; ++i)
        if (e.prov.clause_ids[i] == -1) {
            ++hyp_lines;
            hyp_pos = i;
        }
    REQUIRE(hyp_lines == 1);
    CHECK(e.lines[hyp_pos] == h.hypothesis);
    CHECK(std::count(e.gold.begin(), e.gold.end(), hyp_pos) == 1);
    // the other lines are the original ones in order
    std::vector<std::string> rest;
    for (int i = 0; i < e.n; ++i)
        if (i != hyp_pos)
            rest.push_back(e.lines[i]);
    CHECK(rest == h.lines);
    CHECK_THROWS_AS(embed_hypothesis(e, 3), DatasetError);
}

TEST_CASE("embedding position is uniform over n+1 slots") {
    CertifiedExample ex = certified_fixture(8, 50);
    HaystackExample h = subsample(ex, 8, 2);
    std::map<int, int> counts;
    const int trials = 9000;
    for (int s = 0; s < trials; ++s) {
        HaystackExample e = embed_hypothesis(h, 1000 + s);
        int pos = -1;
        for (int i = 0; i < e.n; ++i)
            if (e.prov.clause_ids[i] == -1)
                pos = i;
        ++counts[pos];
    }
    REQUIRE(counts.size() == 9);  // all slots 0..8 hit
    const double expect = trials / 9.0;
    for (const auto& [pos, c] : counts) {
        CHECK(c > expect * 0.85);
        CHECK(c < expect * 1.15);
    }
}

TEST_CASE("sentence splitting handles punctuation and abbreviations") {
    PaddingCorpus c = split_sentences("The cat sat quietly. A dog barked loudly outside!");
    REQUIRE(c.sentences.size() == 2);
    CHECK(c.sentences[0] == "The cat sat quietly.");
    CHECK(c.sentences[1] == "A dog barked loudly outside!");

    c = split_sentences("Mr. Smith left early today. He won the big race.");
    REQUIRE(c.sentences.size() == 2);
    CHECK(c.sentences[0] == "Mr. Smith left early today.");

    // runs of whitespace collapse, short fragments drop
    c = split_sentences("One two.  A very   fine\nday indeed. Ok no.");
    REQUIRE(c.sentences.size() == 1);
    CHECK(c.sentences[0] == "A very fine day indeed.");

    // no terminal punctuation: one sentence if long enough
    c = split_sentences("plain words without punctuation");
    REQUIRE(c.sentences.size() == 1);

    CHECK_THROWS_AS(split_sentences("a b."), DatasetError);
    CHECK_THROWS_AS(split_sentences("   "), DatasetError);
}

TEST_CASE("dataset files round-trip byte-exactly") {
    CertifiedExample ex = certified_fixture(12, 60);
    std::vector<HaystackExample> all;
    for (int i = 0; i < 40; ++i) {
        HaystackExample h = subsample(ex, 8, 100 + i);
        h.id = "fixture-" + std::to_string(i);
        all.push_back(h);
        all.push_back(embed_hypothesis(h, 200 + i));
    }
    auto tmp = std::filesystem::temp_directory_path() / "haystacks_dataset_test";
    std::filesystem::create_directories(tmp);
    const std::string path = (tmp / "d.jsonl").string();
    write_dataset(path, all);
    std::vector<HaystackExample> back = read_dataset(path);
    REQUIRE(back.size() == all.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        CHECK(back[i].id == all[i].id);
        CHECK(back[i].mode == all[i].mode);
        CHECK(back[i].lines == all[i].lines);
        CHECK(back[i].gold == all[i].gold);
        CHECK(back[i].hypothesis == all[i].hypothesis);
        CHECK(back[i].prov.clause_ids == all[i].prov.clause_ids);
        CHECK(back[i].prov.seed == all[i].prov.seed);
    }
    const std::string again = (tmp / "d2.jsonl").string();
    write_dataset(again, back);
    CHECK(read_file(path) == read_file(again));

    atomic_write_file(path, read_file(path) + "{broken\n");
    try {
        read_dataset(path);
        FAIL("expected a parse failure");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find(std::to_string(all.size() + 1)) != std::string::npos);
    }
    std::filesystem::remove_all(tmp);
}

TEST_CASE("schema validation rejects inconsistent records") {
    CertifiedExample ex = certified_fixture(8, 70);
    HaystackExample h = subsample(ex, 8, 4);
    nlohmann::json j = h.to_json();
    nlohmann::json bad = j;
    bad["version"] = 2;
    CHECK_THROWS_AS(HaystackExample::from_json(bad), DatasetError);
    bad = j;
    bad["n"] = h.n + 1;
    CHECK_THROWS_AS(HaystackExample::from_json(bad), DatasetError);
    bad = j;
    bad["gold"].push_back(line_id(0));
    CHECK_THROWS_AS(HaystackExample::from_json(bad), DatasetError);
}
