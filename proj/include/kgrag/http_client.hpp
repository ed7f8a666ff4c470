#pragma once

#include <chrono>
#include <optional>
#include <string>

#include <json.hpp>

namespace kgrag::http {

struct Endpoint {
    std::string scheme_host_port;  // e.g. "https://api.example.com:443"
    std::string path;              // e.g. "/v1/embeddings"
};

/// Splits an absolute http(s) URL. Throws ConfigurationError.
Endpoint parse_url(const std::string& url);

/// Reads a credential from the named environment variable. Throws
/// ConfigurationError when the variable is unset or empty.
std::string credential_from_env(const std::string& env_var);

/// POSTs a JSON body and returns the parsed JSON (or the raw body as a JSON
/// string when it is not JSON). Transport failures and non-2xx statuses raise
/// RemoteError carrying the provider's message.
nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                         const std::optional<std::string>& bearer_token,
                         std::chrono::milliseconds timeout);

}  // namespace kgrag::http
