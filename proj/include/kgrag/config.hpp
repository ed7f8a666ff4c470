#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "kgrag/embed.hpp"
#include "kgrag/llm.hpp"

namespace kgrag {

struct EmbedderSettings {
    std::string kind = "deterministic-local";  // or "remote"
    std::size_t dimension = kDefaultDimension;
    std::string endpoint;
    std::string model;
    std::string credential_env;
    std::int64_t timeout_ms = 30000;
};

struct LlmSettings {
    std::string kind = "scripted-mock";  // or "remote"
    std::string endpoint;
    std::string model;
    std::string credential_env;
    std::int64_t timeout_ms = 60000;
    std::string mock_script;  // relative paths resolve against the config file
};

struct ServiceConfig {
    std::string listen_host = "127.0.0.1";
    int listen_port = 8080;
    std::filesystem::path data_dir = "kgrag-data";
    EmbedderSettings embedder;
    LlmSettings llm;
    std::size_t k = 3;
    std::size_t row_cap = 50;
    std::size_t embed_parallelism = 4;
    std::size_t llm_concurrency = 4;
    int max_rating = 10;
    std::string judge = "deterministic";  // or "llm"
    std::size_t baseline_chunk_len = 200;
    std::uint64_t seed = 42;

    /// Throws ConfigurationError. Mock kinds need nothing else; remote kinds
    /// need an endpoint and a credential environment variable name.
    void validate() const;
};

/// Flat JSON object of dotted keys, e.g. {"listen": "127.0.0.1:8080",
/// "llm.kind": "scripted-mock", "llm.mock_script": "mock.csv"}. Unknown keys
/// and inline credentials are rejected. `base_dir` anchors relative paths.
ServiceConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ServiceConfig load_config(const std::filesystem::path& file);

std::shared_ptr<Embedder> make_embedder(const ServiceConfig& config);
/// Wrapped so at most llm_concurrency calls are in flight.
std::shared_ptr<LlmClient> make_llm(const ServiceConfig& config);

}  // namespace kgrag
