#include "kgrag/http_client.hpp"

#include <cstdlib>

#include <httplib.h>

#include "kgrag/error.hpp"

namespace kgrag::http {

Endpoint parse_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigurationError("endpoint '" + url + "' is not an absolute URL");
    const std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https")
        throw ConfigurationError("endpoint '" + url + "' must use http or https");
    const auto path_start = url.find('/', scheme_end + 3);
    Endpoint e;
    e.scheme_host_port = url.substr(0, path_start);
    e.path = path_start == std::string::npos ? "/" : url.substr(path_start);
    if (e.scheme_host_port.size() <= scheme_end + 3)
        throw ConfigurationError("endpoint '" + url + "' has no host");
    return e;
}

std::string credential_from_env(const std::string& env_var) {
    if (env_var.empty()) throw ConfigurationError("no credential environment variable configured");
    const char* v = std::getenv(env_var.c_str());
    if (!v || !*v) throw ConfigurationError("environment variable " + env_var + " is not set");
    return v;
}

nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                         const std::optional<std::string>& bearer_token,
                         std::chrono::milliseconds timeout) {
    const Endpoint ep = parse_url(url);
    httplib::Client client(ep.scheme_host_port);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers headers;
    if (bearer_token) headers.emplace("Authorization", "Bearer " + *bearer_token);

    auto res = client.Post(ep.path, headers, body.dump(), "application/json");
    if (!res) throw RemoteError("request to " + url + " failed: " + httplib::to_string(res.error()));

    nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (res->status < 200 || res->status >= 300) {
        std::string msg = res->body;
        if (!parsed.is_discarded() && parsed.is_object() && parsed.contains("error")) {
            const auto& err = parsed["error"];
            msg = err.is_object() && err.contains("message") ? err["message"].dump() : err.dump();
        }
        throw RemoteError(url + " returned HTTP " + std::to_string(res->status) + ": " + msg);
    }
    if (parsed.is_discarded()) return res->body;
    return parsed;
}

}  // namespace kgrag::http
