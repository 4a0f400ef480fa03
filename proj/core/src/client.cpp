#ifdef HAYSTACKS_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "haystacks/client.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include <nlohmann/json.hpp>

#include "haystacks/rng.hpp"
#include "haystacks/util.hpp"

namespace haystacks {

nlohmann::json EndpointConfig::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["base_url"] = base_url;
    j["path"] = path;
    j["model"] = model;
    j["auth_env"] = auth_env;
    j["response_pointer"] = response_pointer;
    j["timeout_s"] = timeout_s;
    j["max_retries"] = max_retries;
    j["backoff_initial_s"] = backoff_initial_s;
    j["backoff_factor"] = backoff_factor;
    j["cache_dir"] = cache_dir;
    return j;
}

EndpointConfig EndpointConfig::from_json(const nlohmann::json& j) {
    EndpointConfig c;
    c.name = j.at("name").get<std::string>();
    c.base_url = j.at("base_url").get<std::string>();
    if (j.contains("path"))
        c.path = j.at("path").get<std::string>();
    c.model = j.at("model").get<std::string>();
    if (j.contains("auth_env"))
        c.auth_env = j.at("auth_env").get<std::string>();
    if (j.contains("response_pointer"))
        c.response_pointer = j.at("response_pointer").get<std::string>();
    if (j.contains("timeout_s"))
        c.timeout_s = j.at("timeout_s").get<double>();
    if (j.contains("max_retries"))
        c.max_retries = j.at("max_retries").get<int>();
    if (j.contains("backoff_initial_s"))
        c.backoff_initial_s = j.at("backoff_initial_s").get<double>();
    if (j.contains("backoff_factor"))
        c.backoff_factor = j.at("backoff_factor").get<double>();
    if (j.contains("cache_dir"))
        c.cache_dir = j.at("cache_dir").get<std::string>();
    return c;
}

std::uint64_t prompt_cache_key(const std::string& model, const std::string& prompt) {
    std::uint64_t h = fnv1a64(model);
    h = fnv1a64("\x1f", h);
    return fnv1a64(prompt, h);
}

namespace {

std::string cache_path(const std::string& dir, std::uint64_t key) {
    char name[32];
    std::snprintf(name, sizeof name, "%016llx", static_cast<unsigned long long>(key));
    return dir + "/" + name + ".txt";
}

bool transient_status(int status) {
    return status == 429 || (status >= 500 && status < 600);
}

struct FetchResult {
    bool ok = false;
    std::string content;
    int retries = 0;
};

FetchResult fetch_one(const EndpointConfig& ep, const std::string& prompt) {
    FetchResult out;
    nlohmann::json body = {
        {"model", ep.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
    };
    const std::string payload = body.dump();

    httplib::Client cli(ep.base_url);
    cli.set_connection_timeout(std::chrono::milliseconds(
        static_cast<int>(ep.timeout_s * 1000)));
    cli.set_read_timeout(std::chrono::milliseconds(static_cast<int>(ep.timeout_s * 1000)));
    httplib::Headers headers;
    if (!ep.auth_env.empty()) {
        const char* token = std::getenv(ep.auth_env.c_str());
        if (token)
            headers.emplace("Authorization", std::string("Bearer ") + token);
    }

    double backoff = ep.backoff_initial_s;
    for (int attempt = 0; attempt <= ep.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
            backoff *= ep.backoff_factor;
            ++out.retries;
        }
        auto res = cli.Post(ep.path, headers, payload, "application/json");
        if (!res || transient_status(res->status))
            continue;
        if (res->status != 200)
            return out;  // non-transient error, no retry
        try {
            nlohmann::json j = nlohmann::json::parse(res->body);
            out.content = j.at(nlohmann::json::json_pointer(ep.response_pointer))
                              .get<std::string>();
            out.ok = true;
        } catch (const std::exception&) {
            // malformed body counts as a hard failure
        }
        return out;
    }
    return out;
}

}  // namespace

std::vector<EvalRecord> query_model(const EndpointConfig& endpoint,
                                    const std::vector<PromptRecord>& prompts,
                                    int concurrency, QueryStats* stats) {
    if (!endpoint.cache_dir.empty())
        std::filesystem::create_directories(endpoint.cache_dir);

    std::vector<EvalRecord> records(prompts.size());
    std::atomic<int> requests{0}, cache_hits{0}, retries{0}, failures{0};

    parallel_for(static_cast<int>(prompts.size()), concurrency, [&](int i) {
        const PromptRecord& p = prompts[i];
        EvalRecord r;
        r.example_id = p.example_id;
        r.model = endpoint.model;
        r.mode = p.mode;
        r.n = p.n;
        r.k = p.k;
        r.gold = p.gold;

        std::string content;
        bool have = false;
        std::string cpath;
        if (!endpoint.cache_dir.empty()) {
            cpath = cache_path(endpoint.cache_dir,
                               prompt_cache_key(endpoint.model, p.text));
            if (std::filesystem::exists(cpath)) {
                content = read_file(cpath);
                have = true;
                ++cache_hits;
            }
        }
        if (!have) {
            FetchResult f = fetch_one(endpoint, p.text);
            ++requests;
            retries += f.retries;
            if (f.ok) {
                content = std::move(f.content);
                have = true;
                if (!cpath.empty())
                    atomic_write_file(cpath, content);
            }
        }

        if (!have) {
            ++failures;
            r.transport_error = true;
            r.jaccard = {0, 1};
        } else {
            r.raw_output = content;
            ParsedAnswer parsed = parse_answer(content);
            r.prediction = parsed.ids;
            r.parse_status = parsed.status;
            std::set<int> gold(p.gold.begin(), p.gold.end());
            r.jaccard = score(r.prediction, gold);
        }
        records[i] = std::move(r);
    });

    if (stats) {
        stats->requests = requests;
        stats->cache_hits = cache_hits;
        stats->retries = retries;
        stats->failures = failures;
    }
    return records;
}

}  // namespace haystacks
