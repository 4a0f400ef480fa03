#include "haystacks/eval.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <nlohmann/json.hpp>

#include "haystacks/util.hpp"

namespace haystacks {

namespace {

std::string joined_lines(const HaystackExample& e) {
    std::string p;
    for (int i = 0; i < static_cast<int>(e.lines.size()); ++i) {
        if (i)
            p += "\n";
        p += line_id(i) + ": " + e.lines[i];
    }
    return p;
}

}  // namespace

PromptRecord render_prompt(const HaystackExample& example, PromptTemplate tmpl) {
    PromptRecord r;
    r.example_id = example.id;
    r.mode = example.mode;
    r.n = example.n;
    r.k = example.k;
    r.gold = example.gold;

    const std::string p = joined_lines(example);
    const std::string k = std::to_string(example.k);
    std::string t;
    if (example.mode == HaystackMode::Embedded) {
        t = "Premise:\n" + p +
            "\nFind " + k +
            " line identifiers that logically contradict each other within the premise. "
            "Answer directly with no explanation using comma-separated line identifiers "
            "between <answer> and </answer> tags. "
            "Format illustration: \"<answer>L42</answer>\".";
    } else if (tmpl == PromptTemplate::Primary) {
        t = "Premise:\n" + p + "\nHypothesis: " + example.hypothesis +
            "\nGiven the premise, find the " + k +
            " line identifiers explaining why the hypothesis is logically contradicted by "
            "the premise. Answer directly with no explanation using comma-separated line "
            "identifiers between <answer> and </answer> tags. "
            "Format illustration: \"<answer>L42</answer>\".";
    } else {
        t = "Premise:\n" + p + "\nHypothesis:\n" + example.hypothesis +
            "\n\nGiven the premise, find the " + k +
            " evidence explaining why the hypothesis is contradicted by the premise. "
            "Answer directly with no explanation and only with comma-separated line ids, "
            "e.g., \"L0,L3.\"";
    }
    r.text = std::move(t);
    return r;
}

const char* to_string(ParseStatus s) {
    switch (s) {
        case ParseStatus::Ok: return "ok";
        case ParseStatus::NoTags: return "no-tags";
        case ParseStatus::Empty: return "empty";
        case ParseStatus::MalformedTokens: return "malformed-tokens";
    }
    return "?";
}

ParseStatus parse_status_from_string(const std::string& s) {
    if (s == "ok")
        return ParseStatus::Ok;
    if (s == "no-tags")
        return ParseStatus::NoTags;
    if (s == "empty")
        return ParseStatus::Empty;
    if (s == "malformed-tokens")
        return ParseStatus::MalformedTokens;
    throw std::invalid_argument("unknown parse status: " + s);
}

namespace {

std::string trim_token(std::string t) {
    auto issp = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    std::size_t b = 0, e = t.size();
    while (b < e && issp(t[b]))
        ++b;
    while (e > b && issp(t[e - 1]))
        --e;
    t = t.substr(b, e - b);
    while (!t.empty() && t.back() == '.')
        t.pop_back();
    return t;
}

bool parse_line_token(const std::string& t, int& out) {
    if (t.size() < 2 || t[0] != 'L')
        return false;
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(t[i])))
            return false;
    out = std::stoi(t.substr(1));
    return true;
}

// every "L<digits>" substring at a non-alphanumeric boundary
std::set<int> scan_line_ids(const std::string& text) {
    std::set<int> ids;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != 'L')
            continue;
        if (i > 0 && (std::isalnum(static_cast<unsigned char>(text[i - 1])) || text[i - 1] == '_'))
            continue;
        std::size_t j = i + 1;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
            ++j;
        if (j > i + 1)
            ids.insert(std::stoi(text.substr(i + 1, j - i - 1)));
        i = j - 1;
    }
    return ids;
}

}  // namespace

ParsedAnswer parse_answer(const std::string& raw) {
    ParsedAnswer out;
    const std::string open = "<answer>", close = "</answer>";
    std::size_t b = raw.find(open);
    std::size_t e = b == std::string::npos ? std::string::npos : raw.find(close, b + open.size());
    if (b == std::string::npos || e == std::string::npos) {
        out.ids = scan_line_ids(raw);
        out.status = ParseStatus::NoTags;
        return out;
    }
    const std::string span = raw.substr(b + open.size(), e - b - open.size());
    bool any_token = false, malformed = false;
    std::stringstream ss(span);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim_token(tok);
        if (tok.empty())
            continue;
        any_token = true;
        int id;
        if (parse_line_token(tok, id))
            out.ids.insert(id);
        else
            malformed = true;
    }
    if (!any_token)
        out.status = ParseStatus::Empty;
    else if (malformed)
        out.status = ParseStatus::MalformedTokens;
    else
        out.status = ParseStatus::Ok;
    return out;
}

Rational score(const std::set<int>& pred, const std::set<int>& gold) {
    if (gold.empty())
        throw std::invalid_argument("gold set must be non-empty");
    long long inter = 0;
    for (int p : pred)
        inter += gold.count(p);
    long long uni = static_cast<long long>(pred.size()) +
                    static_cast<long long>(gold.size()) - inter;
    if (inter == 0)
        return {0, 1};
    long long g = std::gcd(inter, uni);
    return {inter / g, uni / g};
}

nlohmann::json PromptRecord::to_json() const {
    nlohmann::json j;
    j["example_id"] = example_id;
    j["mode"] = haystacks::to_string(mode);
    j["n"] = n;
    j["k"] = k;
    j["text"] = text;
    auto g = nlohmann::json::array();
    for (int x : gold)
        g.push_back(line_id(x));
    j["gold"] = g;
    return j;
}

PromptRecord PromptRecord::from_json(const nlohmann::json& j) {
    PromptRecord r;
    r.example_id = j.at("example_id").get<std::string>();
    r.mode = mode_from_string(j.at("mode").get<std::string>());
    r.n = j.at("n").get<int>();
    r.k = j.at("k").get<int>();
    r.text = j.at("text").get<std::string>();
    for (const auto& g : j.at("gold"))
        r.gold.push_back(std::stoi(g.get<std::string>().substr(1)));
    return r;
}

nlohmann::json EvalRecord::to_json() const {
    nlohmann::json j;
    j["example_id"] = example_id;
    j["model"] = model;
    j["mode"] = haystacks::to_string(mode);
    j["n"] = n;
    j["k"] = k;
    j["raw_output"] = raw_output;
    auto pr = nlohmann::json::array();
    for (int x : prediction)
        pr.push_back(line_id(x));
    j["prediction"] = pr;
    auto g = nlohmann::json::array();
    for (int x : gold)
        g.push_back(line_id(x));
    j["gold"] = g;
    j["jaccard"] = {{"num", jaccard.num}, {"den", jaccard.den}};
    j["parse_status"] = haystacks::to_string(parse_status);
    j["transport_error"] = transport_error;
    return j;
}

EvalRecord EvalRecord::from_json(const nlohmann::json& j) {
    EvalRecord r;
    r.example_id = j.at("example_id").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.mode = mode_from_string(j.at("mode").get<std::string>());
    r.n = j.at("n").get<int>();
    r.k = j.at("k").get<int>();
    r.raw_output = j.at("raw_output").get<std::string>();
    for (const auto& p : j.at("prediction"))
        r.prediction.insert(std::stoi(p.get<std::string>().substr(1)));
    for (const auto& g : j.at("gold"))
        r.gold.push_back(std::stoi(g.get<std::string>().substr(1)));
    r.jaccard.num = j.at("jaccard").at("num").get<long long>();
    r.jaccard.den = j.at("jaccard").at("den").get<long long>();
    r.parse_status = parse_status_from_string(j.at("parse_status").get<std::string>());
    r.transport_error = j.at("transport_error").get<bool>();
    return r;
}

std::vector<AggregateCell> aggregate(const std::vector<EvalRecord>& records) {
    struct Acc {
        int count = 0;
        int parse_failures = 0;
        int transport_errors = 0;
        double sum = 0.0;
    };
    std::map<std::tuple<std::string, std::string, int, int>, Acc> cells;
    for (const auto& r : records) {
        auto& a = cells[{r.model, haystacks::to_string(r.mode), r.n, r.k}];
        if (r.transport_error) {
            ++a.transport_errors;
            continue;
        }
        ++a.count;
        if (r.parse_status != ParseStatus::Ok)
            ++a.parse_failures;
        a.sum += r.jaccard.value();
    }
    std::vector<AggregateCell> out;
    for (const auto& [key, a] : cells) {
        AggregateCell c;
        std::tie(c.model, c.mode, c.n, c.k) = key;
        c.count = a.count;
        c.parse_failures = a.parse_failures;
        c.transport_errors = a.transport_errors;
        c.mean_jaccard = a.count ? a.sum / a.count : 0.0;
        if (c.count == 0 && c.transport_errors == 0)
            continue;
        out.push_back(c);
    }
    return out;
}

std::string render_report(const std::vector<AggregateCell>& cells) {
    std::ostringstream os;
    os << "model\tmode\tn\tk\tcount\tmean_jaccard\tparse_failure_rate\ttransport_errors\n";
    for (const auto& c : cells) {
        os << c.model << "\t" << c.mode << "\t" << c.n << "\t" << c.k << "\t" << c.count
           << "\t";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", c.mean_jaccard);
        os << buf << "\t";
        double pf = c.count ? static_cast<double>(c.parse_failures) / c.count : 0.0;
        std::snprintf(buf, sizeof buf, "%.6f", pf);
        os << buf << "\t" << c.transport_errors << "\n";
    }
    return os.str();
}

namespace {

template <class T>
void write_jsonl(const std::string& path, const std::vector<T>& items) {
    std::ostringstream os;
    for (const auto& it : items)
        os << it.to_json().dump() << "\n";
    atomic_write_file(path, os.str());
}

template <class T>
std::vector<T> read_jsonl(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<T> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        try {
            out.push_back(T::from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace

void write_records(const std::string& path, const std::vector<EvalRecord>& records) {
    write_jsonl(path, records);
}

std::vector<EvalRecord> read_records(const std::string& path) {
    return read_jsonl<EvalRecord>(path);
}

void write_prompts(const std::string& path, const std::vector<PromptRecord>& prompts) {
    write_jsonl(path, prompts);
}

std::vector<PromptRecord> read_prompts(const std::string& path) {
    return read_jsonl<PromptRecord>(path);
}

}  // namespace haystacks
