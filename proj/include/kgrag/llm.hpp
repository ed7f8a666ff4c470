#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <regex>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

namespace kgrag {

enum class Purpose { QueryGeneration, Answer, Judge };

std::string_view to_string(Purpose p);

struct LlmRequest {
    Purpose purpose = Purpose::Answer;
    /// The composed prompt sent to the model.
    std::string prompt;
    /// What scripted rules match against: the inquiry for query generation
    /// and answering, the statement or item under judgement for judging.
    std::string subject;
    /// Answer requests carry the contexts so a scripted client can echo them.
    std::vector<std::string> contexts;
};

/// Chat-completion client. complete() notifies the prompt observer, if any,
/// before delegating to the implementation.
class LlmClient {
public:
    using PromptObserver = std::function<void(const LlmRequest&)>;

    virtual ~LlmClient() = default;

    std::string complete(const LlmRequest& request) {
        if (observer_) observer_(request);
        return do_complete(request);
    }

    virtual std::string_view kind() const = 0;
    void set_prompt_observer(PromptObserver observer) { observer_ = std::move(observer); }

private:
    virtual std::string do_complete(const LlmRequest& request) = 0;
    PromptObserver observer_;
};

struct ScriptRule {
    std::string pattern;
    std::string completion;
    Purpose purpose = Purpose::QueryGeneration;
};

/// Deterministic stand-in for a hosted model. The first rule of the request's
/// purpose whose regular expression matches anywhere in the subject
/// (case-insensitive) supplies the completion. Without a match: query
/// generation yields NONE, answering echoes "Based on the context: " +
/// contexts joined by "; ", judging yields "no".
class ScriptedLlm final : public LlmClient {
public:
    explicit ScriptedLlm(std::vector<ScriptRule> rules = {});

    /// Two-column CSV with header `pattern,completion`; every rule is a
    /// query-generation rule.
    static ScriptedLlm from_csv(std::string_view csv_text);

    std::string_view kind() const override { return "scripted-mock"; }
    const std::vector<ScriptRule>& rules() const { return rules_; }

private:
    std::string do_complete(const LlmRequest& request) override;
    std::vector<ScriptRule> rules_;
    std::vector<std::regex> compiled_;
};

struct RemoteLlmSettings {
    std::string endpoint;
    std::string model;
    std::string credential_env;
    std::chrono::milliseconds timeout{60000};
};

/// POSTs {"model", "messages": [{"role": "user", "content": prompt}]}.
/// Accepts an OpenAI-style choices[0].message.content, a {"completion": ...}
/// object, or a plain-text body.
class RemoteLlm final : public LlmClient {
public:
    explicit RemoteLlm(RemoteLlmSettings settings);
    std::string_view kind() const override { return "remote"; }

private:
    std::string do_complete(const LlmRequest& request) override;
    RemoteLlmSettings settings_;
    std::string token_;
};

/// Caps the number of in-flight calls to the wrapped client.
class BoundedLlm final : public LlmClient {
public:
    BoundedLlm(std::shared_ptr<LlmClient> inner, std::ptrdiff_t limit);
    std::string_view kind() const override { return inner_->kind(); }

private:
    std::string do_complete(const LlmRequest& request) override;
    std::shared_ptr<LlmClient> inner_;
    std::counting_semaphore<1024> slots_;
};

}  // namespace kgrag
