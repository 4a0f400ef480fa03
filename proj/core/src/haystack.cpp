#include "haystacks/haystack.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "haystacks/rng.hpp"
#include "haystacks/util.hpp"

namespace haystacks {

namespace {
constexpr int kSchemaVersion = 1;
}

const char* to_string(HaystackMode m) {
    switch (m) {
        case HaystackMode::Standard: return "standard";
        case HaystackMode::Padded: return "padded";
        case HaystackMode::Embedded: return "embedded";
    }
    return "?";
}

HaystackMode mode_from_string(const std::string& s) {
    if (s == "standard")
        return HaystackMode::Standard;
    if (s == "padded")
        return HaystackMode::Padded;
    if (s == "embedded")
        return HaystackMode::Embedded;
    throw DatasetError("unknown mode: " + s);
}

nlohmann::json HaystackExample::to_json() const {
    nlohmann::json j;
    j["version"] = kSchemaVersion;
    j["id"] = id;
    j["mode"] = to_string(mode);
    j["n"] = n;
    j["k"] = k;
    auto lines_j = nlohmann::json::array();
    for (int i = 0; i < static_cast<int>(lines.size()); ++i)
        lines_j.push_back(nlohmann::json::array({line_id(i), lines[i]}));
    j["lines"] = lines_j;
    j["hypothesis"] = hypothesis;
    auto gold_j = nlohmann::json::array();
    for (int g : gold)
        gold_j.push_back(line_id(g));
    j["gold"] = gold_j;
    j["provenance"] = {{"premise_index", prov.premise_index},
                       {"hypothesis_index", prov.hypothesis_index},
                       {"stage", prov.stage},
                       {"clause_ids", prov.clause_ids}};
    j["seed"] = prov.seed;
    return j;
}

HaystackExample HaystackExample::from_json(const nlohmann::json& j) {
    int version = j.at("version").get<int>();
    if (version != kSchemaVersion)
        throw DatasetError("unsupported schema version " + std::to_string(version));
    HaystackExample e;
    e.id = j.at("id").get<std::string>();
    e.mode = mode_from_string(j.at("mode").get<std::string>());
    e.n = j.at("n").get<int>();
    e.k = j.at("k").get<int>();
    for (const auto& l : j.at("lines")) {
        if (!l.is_array() || l.size() != 2)
            throw DatasetError("bad line entry");
        e.lines.push_back(l[1].get<std::string>());
    }
    for (const auto& g : j.at("gold")) {
        std::string s = g.get<std::string>();
        if (s.size() < 2 || s[0] != 'L')
            throw DatasetError("bad gold id: " + s);
        e.gold.push_back(std::stoi(s.substr(1)));
    }
    const auto& p = j.at("provenance");
    e.prov.premise_index = p.at("premise_index").get<int>();
    e.prov.hypothesis_index = p.at("hypothesis_index").get<int>();
    e.prov.stage = p.at("stage").get<int>();
    e.prov.clause_ids = p.at("clause_ids").get<std::vector<int>>();
    e.prov.seed = j.at("seed").get<std::uint64_t>();
    e.hypothesis = j.at("hypothesis").get<std::string>();
    if (static_cast<int>(e.lines.size()) != e.n)
        throw DatasetError("line count does not match n");
    if (static_cast<int>(e.gold.size()) != e.k)
        throw DatasetError("gold size does not match k");
    return e;
}

HaystackExample subsample(const CertifiedExample& example, int n, std::uint64_t seed) {
    const int total = static_cast<int>(example.premise.size());
    const int k = static_cast<int>(example.evidence.size());
    if (n < k)
        throw DatasetError("target size below evidence count");
    if (n > total)
        throw DatasetError("target size above premise size");

    std::unordered_set<int> evidence_ids(example.evidence.begin(), example.evidence.end());
    std::vector<int> distractor_pos;
    for (int i = 0; i < total; ++i)
        if (!evidence_ids.count(example.premise[i].id))
            distractor_pos.push_back(i);

    auto rng = make_rng(seed);
    std::shuffle(distractor_pos.begin(), distractor_pos.end(), rng);
    distractor_pos.resize(n - k);

    std::vector<int> keep;
    for (int i = 0; i < total; ++i) {
        if (evidence_ids.count(example.premise[i].id) ||
            std::find(distractor_pos.begin(), distractor_pos.end(), i) != distractor_pos.end())
            keep.push_back(i);  // original relative order preserved
    }

    HaystackExample out;
    out.mode = HaystackMode::Standard;
    out.n = n;
    out.k = k;
    out.hypothesis = example.hypothesis.english;
    out.prov.premise_index = example.premise_index;
    out.prov.hypothesis_index = example.hypothesis_index;
    out.prov.stage = example.premise.empty() ? 0 : example.premise.front().stage;
    out.prov.seed = seed;
    for (std::size_t li = 0; li < keep.size(); ++li) {
        const auto& c = example.premise[keep[li]];
        out.lines.push_back(c.english);
        out.prov.clause_ids.push_back(c.id);
        if (evidence_ids.count(c.id))
            out.gold.push_back(static_cast<int>(li));
    }
    return out;
}

HaystackExample pad_with_corpus(const HaystackExample& example, const PaddingCorpus& corpus,
                                std::uint64_t seed) {
    const int needed = example.n - example.k;
    if (static_cast<int>(corpus.sentences.size()) < needed)
        throw DatasetError("padding corpus too small: need " + std::to_string(needed) +
                           " sentences, have " + std::to_string(corpus.sentences.size()));
    std::vector<int> order(corpus.sentences.size());
    std::iota(order.begin(), order.end(), 0);
    auto rng = make_rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    HaystackExample out = example;
    out.mode = HaystackMode::Padded;
    std::unordered_set<int> gold(example.gold.begin(), example.gold.end());
    int next = 0;
    for (int i = 0; i < out.n; ++i) {
        if (gold.count(i))
            continue;
        out.lines[i] = corpus.sentences[order[next++]];
    }
    return out;
}

HaystackExample embed_hypothesis(const HaystackExample& example, std::uint64_t seed) {
    if (example.mode == HaystackMode::Embedded)
        throw DatasetError("example is already in embedded mode");
    auto rng = make_rng(seed);
    const int pos =
        static_cast<int>(std::uniform_int_distribution<int>(0, example.n)(rng));

    HaystackExample out = example;
    out.mode = HaystackMode::Embedded;
    out.n = example.n + 1;
    out.lines.insert(out.lines.begin() + pos, example.hypothesis);
    out.prov.clause_ids.insert(out.prov.clause_ids.begin() + pos, -1);
    out.gold.clear();
    for (int g : example.gold)
        out.gold.push_back(g >= pos ? g + 1 : g);
    out.gold.push_back(pos);
    std::sort(out.gold.begin(), out.gold.end());
    out.k = example.k + 1;
    return out;
}

namespace {

bool is_abbreviation(const std::string& token) {
    static const std::unordered_set<std::string> kAbbrev = {
        "Mr.", "Mrs.", "Ms.", "Dr.", "Prof.", "St.", "Jr.", "Sr.",
        "vs.", "etc.", "e.g.", "i.e.", "No.", "Inc.", "Ltd.", "Co.",
    };
    return kAbbrev.count(token) > 0;
}

std::string normalize_sentence(const std::string& raw) {
    std::string out;
    bool in_space = true;
    for (char ch : raw) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!in_space && !out.empty())
                out.push_back(' ');
            in_space = true;
        } else {
            out.push_back(ch);
            in_space = false;
        }
    }
    while (!out.empty() && out.back() == ' ')
        out.pop_back();
    return out;
}

int word_count(const std::string& s) {
    int words = 0;
    bool in_word = false;
    for (char ch : s) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            in_word = false;
        } else if (!in_word) {
            ++words;
            in_word = true;
        }
    }
    return words;
}

}  // namespace

PaddingCorpus split_sentences(const std::string& text) {
    std::vector<std::string> raw;
    std::string current;
    const std::size_t len = text.size();
    for (std::size_t i = 0; i < len; ++i) {
        char ch = text[i];
        current.push_back(ch);
        if (ch != '.' && ch != '!' && ch != '?')
            continue;
        // swallow runs of terminal punctuation and closing quotes
        std::size_t j = i + 1;
        while (j < len && (text[j] == '.' || text[j] == '!' || text[j] == '?' ||
                           text[j] == '"' || text[j] == '\'')) {
            current.push_back(text[j]);
            ++j;
        }
        if (j >= len)
            break;
        if (!std::isspace(static_cast<unsigned char>(text[j])))
            { i = j - 1; continue; }
        std::size_t next = j;
        while (next < len && std::isspace(static_cast<unsigned char>(text[next])))
            ++next;
        bool capital_follows =
            next < len && (std::isupper(static_cast<unsigned char>(text[next])) ||
                           text[next] == '"' || text[next] == '\'');
        // token ending at this period
        std::size_t tok_end = current.size();
        std::size_t tok_begin = tok_end;
        while (tok_begin > 0 &&
               !std::isspace(static_cast<unsigned char>(current[tok_begin - 1])))
            --tok_begin;
        const std::string token = current.substr(tok_begin, tok_end - tok_begin);
        if (ch == '.' && is_abbreviation(token)) {
            i = j - 1;
            continue;
        }
        if (capital_follows) {
            raw.push_back(current);
            current.clear();
            i = next - 1;
        } else {
            i = j - 1;
        }
    }
    if (!current.empty())
        raw.push_back(current);

    PaddingCorpus corpus;
    for (const auto& r : raw) {
        std::string s = normalize_sentence(r);
        if (!s.empty() && word_count(s) >= 3)
            corpus.sentences.push_back(std::move(s));
    }
    if (corpus.sentences.empty())
        throw DatasetError("no usable sentences in corpus");
    return corpus;
}

void write_dataset(const std::string& path, const std::vector<HaystackExample>& examples) {
    std::ostringstream os;
    for (const auto& e : examples)
        os << e.to_json().dump() << "\n";
    atomic_write_file(path, os.str());
}

std::vector<HaystackExample> read_dataset(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<HaystackExample> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        try {
            out.push_back(HaystackExample::from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw DatasetError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace haystacks
