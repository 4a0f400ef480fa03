#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "haystacks/eval.hpp"

namespace haystacks {

struct ClientError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Chat-completion endpoint description. The auth token is read from the
// environment variable named here, never stored in config files.
struct EndpointConfig {
    std::string name;
    std::string base_url;                       // e.g. "https://api.example.com"
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string auth_env;                       // env var holding the bearer token
    std::string response_pointer = "/choices/0/message/content";
    double timeout_s = 120.0;
    int max_retries = 5;
    double backoff_initial_s = 1.0;
    double backoff_factor = 2.0;
    std::string cache_dir;  // empty disables the response cache

    nlohmann::json to_json() const;
    static EndpointConfig from_json(const nlohmann::json& j);
};

struct QueryStats {
    int requests = 0;     // actual network calls
    int cache_hits = 0;
    int retries = 0;
    int failures = 0;     // prompts that exhausted retries
};

// Cache key for one (model, prompt) pair; stable across runs.
std::uint64_t prompt_cache_key(const std::string& model, const std::string& prompt);

// One completion per prompt: cached responses are returned without a
// network call, transient failures (429/5xx/transport) retry with
// exponential backoff, exhausted retries yield a transport-error record.
// Output order matches input order regardless of dispatch interleaving.
std::vector<EvalRecord> query_model(const EndpointConfig& endpoint,
                                    const std::vector<PromptRecord>& prompts,
                                    int concurrency = 4, QueryStats* stats = nullptr);

}  // namespace haystacks
