#include "kgrag/llm.hpp"

#include <algorithm>

#include "kgrag/csv.hpp"
#include "kgrag/error.hpp"
#include "kgrag/http_client.hpp"
#include "kgrag/text.hpp"

namespace kgrag {

std::string_view to_string(Purpose p) {
    switch (p) {
        case Purpose::QueryGeneration: return "query-generation";
        case Purpose::Answer: return "answer";
        case Purpose::Judge: return "judge";
    }
    return "?";
}

ScriptedLlm::ScriptedLlm(std::vector<ScriptRule> rules) : rules_(std::move(rules)) {
    compiled_.reserve(rules_.size());
    for (const auto& r : rules_) {
        try {
            compiled_.emplace_back(r.pattern, std::regex::ECMAScript | std::regex::icase);
        } catch (const std::regex_error& e) {
            throw ConfigurationError("invalid mock script pattern '" + r.pattern + "': " + e.what());
        }
    }
}

ScriptedLlm ScriptedLlm::from_csv(std::string_view csv_text) {
    const auto rows = csv::read(csv_text);
    std::vector<ScriptRule> rules;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& f = rows[i].fields;
        if (i == 0) {
            if (f.size() != 2 || trim(f[0]) != "pattern" || trim(f[1]) != "completion")
                throw CsvError(rows[i].line, "mock script header must be exactly: pattern,completion");
            continue;
        }
        if (f.size() != 2) throw CsvError(rows[i].line, "expected 2 fields");
        rules.push_back({f[0], f[1], Purpose::QueryGeneration});
    }
    return ScriptedLlm(std::move(rules));
}

std::string ScriptedLlm::do_complete(const LlmRequest& request) {
    for (std::size_t i = 0; i < rules_.size(); ++i)
        if (rules_[i].purpose == request.purpose &&
            std::regex_search(request.subject, compiled_[i]))
            return rules_[i].completion;

    switch (request.purpose) {
        case Purpose::QueryGeneration: return "NONE";
        case Purpose::Judge: return "no";
        case Purpose::Answer: {
            std::string out = "Based on the context: ";
            for (std::size_t i = 0; i < request.contexts.size(); ++i) {
                if (i) out += "; ";
                out += request.contexts[i];
            }
            return out;
        }
    }
    return {};
}

RemoteLlm::RemoteLlm(RemoteLlmSettings settings) : settings_(std::move(settings)) {
    if (settings_.endpoint.empty()) throw ConfigurationError("remote LLM needs an endpoint");
    http::parse_url(settings_.endpoint);
    token_ = http::credential_from_env(settings_.credential_env);
}

std::string RemoteLlm::do_complete(const LlmRequest& request) {
    const nlohmann::json body = {
        {"model", settings_.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})}};
    const auto res = http::post_json(settings_.endpoint, body, token_, settings_.timeout);
    if (res.is_string()) return res.get<std::string>();
    if (res.is_object()) {
        if (res.contains("choices") && res["choices"].is_array() && !res["choices"].empty()) {
            const auto& c = res["choices"][0];
            if (c.contains("message") && c["message"].contains("content") &&
                c["message"]["content"].is_string())
                return c["message"]["content"].get<std::string>();
            if (c.contains("text") && c["text"].is_string()) return c["text"].get<std::string>();
        }
        if (res.contains("completion") && res["completion"].is_string())
            return res["completion"].get<std::string>();
    }
    throw RemoteError("unrecognized chat completion response");
}

BoundedLlm::BoundedLlm(std::shared_ptr<LlmClient> inner, std::ptrdiff_t limit)
    : inner_(std::move(inner)), slots_(std::clamp<std::ptrdiff_t>(limit, 1, 1024)) {}

std::string BoundedLlm::do_complete(const LlmRequest& request) {
    slots_.acquire();
    struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
    } release{slots_};
    return inner_->complete(request);
}

}  // namespace kgrag
