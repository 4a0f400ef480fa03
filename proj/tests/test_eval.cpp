#include <doctest.h>

#include <filesystem>

#include <nlohmann/json.hpp>

#include "haystacks/eval.hpp"
#include "haystacks/util.hpp"

using namespace haystacks;

namespace {

HaystackExample standard_example() {
    HaystackExample e;
    e.id = "golden-standard";
    e.mode = HaystackMode::Standard;
    e.n = 3;
    e.k = 2;
    e.lines = {"Mary is happy", "everyone in the room who is happy is rich",
               "Nina is not rich"};
    e.hypothesis = "Mary is not rich";
    e.gold = {0, 1};
    return e;
}

HaystackExample embedded_example() {
    HaystackExample e;
    e.id = "golden-embedded";
    e.mode = HaystackMode::Embedded;
    e.n = 4;
    e.k = 3;
    e.lines = {"Mary is happy", "everyone in the room who is happy is rich",
               "Mary is not rich", "Nina is not rich"};
    e.hypothesis = "Mary is not rich";
    e.gold = {0, 1, 2};
    return e;
}

std::string golden(const std::string& name) {
    return read_file(std::string(HAYSTACKS_GOLDEN_DIR) + "/" + name);
}

}  // namespace

TEST_CASE("rendered prompts match the golden files byte for byte") {
    PromptRecord primary = render_prompt(standard_example(), PromptTemplate::Primary);
    CHECK(primary.text + "\n" == golden("prompt_primary.txt"));
    CHECK(primary.gold == std::vector<int>{0, 1});
    CHECK(primary.n == 3);
    CHECK(primary.k == 2);

    PromptRecord legacy = render_prompt(standard_example(), PromptTemplate::Legacy);
    CHECK(legacy.text + "\n" == golden("prompt_legacy.txt"));

    // embedded mode ignores the template choice: no hypothesis block
    for (PromptTemplate t : {PromptTemplate::Primary, PromptTemplate::Legacy}) {
        PromptRecord embedded = render_prompt(embedded_example(), t);
        CHECK(embedded.text + "\n" == golden("prompt_embedded.txt"));
    }

    CHECK(primary.text.find("\"<answer>L42</answer>\"") != std::string::npos);
}

TEST_CASE("answer parsing fixtures") {
    ParsedAnswer a = parse_answer("<answer>L0,L3</answer>");
    CHECK(a.status == ParseStatus::Ok);
    CHECK(a.ids == std::set<int>{0, 3});

    a = parse_answer("Sure thing: <answer> L12 , L4. </answer> trailing L99 ignored");
    CHECK(a.status == ParseStatus::Ok);
    CHECK(a.ids == std::set<int>{4, 12});

    // first tag span wins
    a = parse_answer("<answer>L1</answer> <answer>L2</answer>");
    CHECK(a.ids == std::set<int>{1});

    a = parse_answer("The answer is L12");
    CHECK(a.status == ParseStatus::NoTags);
    CHECK(a.ids == std::set<int>{12});

    a = parse_answer("lines L3 and L7, but not XL5 or L_8");
    CHECK(a.status == ParseStatus::NoTags);
    CHECK(a.ids == std::set<int>{3, 7});

    a = parse_answer("<answer></answer>");
    CHECK(a.status == ParseStatus::Empty);
    CHECK(a.ids.empty());

    a = parse_answer("<answer> , ,, </answer>");
    CHECK(a.status == ParseStatus::Empty);

    a = parse_answer("<answer>L0, line 3</answer>");
    CHECK(a.status == ParseStatus::MalformedTokens);
    CHECK(a.ids == std::set<int>{0});

    a = parse_answer("no identifiers at all");
    CHECK(a.status == ParseStatus::NoTags);
    CHECK(a.ids.empty());
}

TEST_CASE("Jaccard scoring fixtures are exact") {
    CHECK(score({0, 1}, {0, 1}) == Rational{1, 1});
    CHECK(score({12}, {13}) == Rational{0, 1});
    CHECK(score({80, 87}, {80, 987}) == Rational{1, 3});
    CHECK(score({}, {5}) == Rational{0, 1});
    CHECK(score({1, 2, 3, 4}, {3, 4, 5, 6}) == Rational{1, 3});
    CHECK(score({2, 4, 6, 8}, {2, 4, 6, 8}).num == 1);
    CHECK_THROWS_AS(score({1}, {}), std::invalid_argument);
}

TEST_CASE("aggregation computes per-cell means and excludes transport errors") {
    auto rec = [](std::string model, HaystackMode mode, int n, int k, Rational j,
                  ParseStatus st, bool transport) {
        EvalRecord r;
        r.model = std::move(model);
        r.mode = mode;
        r.n = n;
        r.k = k;
        r.jaccard = j;
        r.parse_status = st;
        r.transport_error = transport;
        return r;
    };
    std::vector<EvalRecord> records = {
        rec("m1", HaystackMode::Standard, 8, 2, {1, 1}, ParseStatus::Ok, false),
        rec("m1", HaystackMode::Standard, 8, 2, {1, 3}, ParseStatus::Ok, false),
        rec("m1", HaystackMode::Standard, 8, 2, {0, 1}, ParseStatus::NoTags, false),
        rec("m1", HaystackMode::Standard, 8, 2, {0, 1}, ParseStatus::Ok, true),
        rec("m1", HaystackMode::Padded, 8, 2, {1, 2}, ParseStatus::Ok, false),
        rec("m2", HaystackMode::Standard, 16, 3, {1, 1}, ParseStatus::Ok, false),
    };
    std::vector<AggregateCell> cells = aggregate(records);
    REQUIRE(cells.size() == 3);

    const AggregateCell* big = nullptr;
    for (const auto& c : cells)
        if (c.model == "m1" && c.mode == "standard")
            big = &c;
    REQUIRE(big);
    CHECK(big->count == 3);
    CHECK(big->transport_errors == 1);
    CHECK(big->parse_failures == 1);
    CHECK(big->mean_jaccard == doctest::Approx((1.0 + 1.0 / 3.0 + 0.0) / 3.0));

    std::string report = render_report(cells);
    CHECK(report.substr(0, report.find('\n')) ==
          "model\tmode\tn\tk\tcount\tmean_jaccard\tparse_failure_rate\ttransport_errors");
    CHECK(report.find("m1\tpadded\t8\t2\t1\t0.500000\t0.000000\t0") != std::string::npos);
    CHECK(report.find("m2\tstandard\t16\t3\t1\t1.000000\t0.000000\t0") != std::string::npos);
}

TEST_CASE("prompt and record files round-trip") {
    auto tmp = std::filesystem::temp_directory_path() / "haystacks_eval_test";
    std::filesystem::create_directories(tmp);

    std::vector<PromptRecord> prompts = {render_prompt(standard_example()),
                                         render_prompt(embedded_example())};
    const std::string ppath = (tmp / "p.jsonl").string();
    write_prompts(ppath, prompts);
    std::vector<PromptRecord> pback = read_prompts(ppath);
    REQUIRE(pback.size() == 2);
    CHECK(pback[0].text == prompts[0].text);
    CHECK(pback[1].gold == prompts[1].gold);
    CHECK(pback[1].mode == HaystackMode::Embedded);

    EvalRecord r;
    r.example_id = "golden-standard";
    r.model = "m1";
    r.mode = HaystackMode::Standard;
    r.n = 3;
    r.k = 2;
    r.raw_output = "<answer>L0,L1</answer>";
    r.prediction = {0, 1};
    r.gold = {0, 1};
    r.jaccard = {1, 1};
    const std::string rpath = (tmp / "r.jsonl").string();
    write_records(rpath, {r});
    std::vector<EvalRecord> rback = read_records(rpath);
    REQUIRE(rback.size() == 1);
    CHECK(rback[0].prediction == r.prediction);
    CHECK(rback[0].jaccard == r.jaccard);
    CHECK(rback[0].raw_output == r.raw_output);
    CHECK(rback[0].parse_status == ParseStatus::Ok);
    CHECK(!rback[0].transport_error);
    std::filesystem::remove_all(tmp);
}
