#include "kgrag/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kgrag/error.hpp"
#include "kgrag/text.hpp"

namespace kgrag {

namespace {

using nlohmann::json;

std::string need_string(const json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigurationError("config key '" + key + "' must be a string");
    return v.get<std::string>();
}

std::int64_t need_int(const json& v, const std::string& key, std::int64_t lo) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < lo)
        throw ConfigurationError("config key '" + key + "' must be an integer >= " +
                                 std::to_string(lo));
    return v.get<std::int64_t>();
}

bool looks_like_secret(std::string_view key) {
    const auto k = to_lower_ascii(key);
    for (const char* s : {"api_key", "apikey", "token", "secret", "password", "credential"})
        if (k.find(s) != std::string::npos && !k.ends_with("credential_env")) return true;
    return false;
}

std::filesystem::path anchored(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base.empty() ? base / path : path;
}

}  // namespace

void ServiceConfig::validate() const {
    if (listen_port < 0 || listen_port > 65535) throw ConfigurationError("listen port out of range");
    if (embedder.kind == "remote") {
        if (embedder.endpoint.empty() || embedder.credential_env.empty())
            throw ConfigurationError("remote embedder needs embedder.endpoint and embedder.credential_env");
    } else if (embedder.kind != "deterministic-local") {
        throw ConfigurationError("embedder.kind must be deterministic-local or remote");
    }
    if (embedder.dimension < kMinDimension)
        throw ConfigurationError("embedder.dimension must be at least " + std::to_string(kMinDimension));
    if (llm.kind == "remote") {
        if (llm.endpoint.empty() || llm.credential_env.empty())
            throw ConfigurationError("remote llm needs llm.endpoint and llm.credential_env");
    } else if (llm.kind != "scripted-mock") {
        throw ConfigurationError("llm.kind must be scripted-mock or remote");
    }
    if (judge != "deterministic" && judge != "llm")
        throw ConfigurationError("eval.judge must be deterministic or llm");
    if (k == 0) throw ConfigurationError("retrieval.k must be positive");
    if (baseline_chunk_len < 20) throw ConfigurationError("eval.baseline_chunk_len must be at least 20");
}

ServiceConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigurationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigurationError("config must be a JSON object");

    ServiceConfig c;
    for (const auto& [key, v] : doc.items()) {
        if (looks_like_secret(key))
            throw ConfigurationError("config key '" + key +
                                     "' looks like a credential; name an environment variable "
                                     "with *.credential_env instead");
        if (key == "listen") {
            const auto s = need_string(v, key);
            const auto colon = s.rfind(':');
            if (colon == std::string::npos) throw ConfigurationError("listen must be host:port");
            c.listen_host = s.substr(0, colon);
            try {
                c.listen_port = std::stoi(s.substr(colon + 1));
            } catch (const std::exception&) {
                throw ConfigurationError("listen must be host:port");
            }
        } else if (key == "data_dir") {
            c.data_dir = anchored(base_dir, need_string(v, key));
        } else if (key == "embedder.kind") {
            c.embedder.kind = need_string(v, key);
        } else if (key == "embedder.dimension") {
            c.embedder.dimension = static_cast<std::size_t>(need_int(v, key, 1));
        } else if (key == "embedder.endpoint") {
            c.embedder.endpoint = need_string(v, key);
        } else if (key == "embedder.model") {
            c.embedder.model = need_string(v, key);
        } else if (key == "embedder.credential_env") {
            c.embedder.credential_env = need_string(v, key);
        } else if (key == "embedder.timeout_ms") {
            c.embedder.timeout_ms = need_int(v, key, 1);
        } else if (key == "llm.kind") {
            c.llm.kind = need_string(v, key);
        } else if (key == "llm.endpoint") {
            c.llm.endpoint = need_string(v, key);
        } else if (key == "llm.model") {
            c.llm.model = need_string(v, key);
        } else if (key == "llm.credential_env") {
            c.llm.credential_env = need_string(v, key);
        } else if (key == "llm.timeout_ms") {
            c.llm.timeout_ms = need_int(v, key, 1);
        } else if (key == "llm.mock_script") {
            c.llm.mock_script = anchored(base_dir, need_string(v, key)).string();
        } else if (key == "retrieval.k") {
            c.k = static_cast<std::size_t>(need_int(v, key, 1));
        } else if (key == "retrieval.row_cap") {
            c.row_cap = static_cast<std::size_t>(need_int(v, key, 1));
        } else if (key == "concurrency.embed") {
            c.embed_parallelism = static_cast<std::size_t>(need_int(v, key, 1));
        } else if (key == "concurrency.llm") {
            c.llm_concurrency = static_cast<std::size_t>(need_int(v, key, 1));
        } else if (key == "fmea.max_rating") {
            c.max_rating = static_cast<int>(need_int(v, key, 1));
        } else if (key == "eval.judge") {
            c.judge = need_string(v, key);
        } else if (key == "eval.baseline_chunk_len") {
            c.baseline_chunk_len = static_cast<std::size_t>(need_int(v, key, 1));
        } else if (key == "eval.seed") {
            c.seed = static_cast<std::uint64_t>(need_int(v, key, 0));
        } else {
            throw ConfigurationError("unknown config key '" + key + "'");
        }
    }
    c.validate();
    return c;
}

ServiceConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigurationError("cannot read config file " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), file.parent_path());
}

std::shared_ptr<Embedder> make_embedder(const ServiceConfig& config) {
    if (config.embedder.kind == "remote") {
        RemoteEmbedderSettings s;
        s.endpoint = config.embedder.endpoint;
        s.model = config.embedder.model;
        s.credential_env = config.embedder.credential_env;
        s.timeout = std::chrono::milliseconds(config.embedder.timeout_ms);
        s.dimension = config.embedder.dimension;
        return std::make_shared<RemoteEmbedder>(std::move(s));
    }
    return std::make_shared<HashingEmbedder>(config.embedder.dimension);
}

std::shared_ptr<LlmClient> make_llm(const ServiceConfig& config) {
    std::shared_ptr<LlmClient> inner;
    if (config.llm.kind == "remote") {
        RemoteLlmSettings s;
        s.endpoint = config.llm.endpoint;
        s.model = config.llm.model;
        s.credential_env = config.llm.credential_env;
        s.timeout = std::chrono::milliseconds(config.llm.timeout_ms);
        inner = std::make_shared<RemoteLlm>(std::move(s));
    } else if (!config.llm.mock_script.empty()) {
        std::ifstream in(config.llm.mock_script, std::ios::binary);
        if (!in) throw ConfigurationError("cannot read mock script " + config.llm.mock_script);
        std::ostringstream ss;
        ss << in.rdbuf();
        inner = std::make_shared<ScriptedLlm>(ScriptedLlm::from_csv(ss.str()));
    } else {
        inner = std::make_shared<ScriptedLlm>();
    }
    return std::make_shared<BoundedLlm>(std::move(inner),
                                        static_cast<std::ptrdiff_t>(config.llm_concurrency));
}

}  // namespace kgrag
