#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgrag/embed.hpp"
#include "kgrag/fmea.hpp"
#include "kgrag/graph.hpp"
#include "kgrag/llm.hpp"
#include "kgrag/retrieval.hpp"

namespace kgrag::eval {

struct ValidationItem {
    std::string question;
    std::string ground_truth;
    std::optional<std::vector<std::string>> relevance_key;
};

/// Sentences end at '.', '!' or '?' followed by whitespace or the end of the
/// text. Pieces are trimmed; empty pieces are dropped.
std::vector<std::string> split_sentences(std::string_view text);

class Judge {
public:
    virtual ~Judge() = default;
    /// Whether one ground-truth sentence is supported by the contexts.
    virtual bool attributable(std::string_view sentence, std::span<const std::string> contexts) = 0;
    /// Whether one retrieved context item is relevant to the item's question.
    virtual bool relevant(std::string_view context, const ValidationItem& item) = 0;
    virtual std::string_view kind() const = 0;
};

/// Attributable iff at least 60% of the sentence's distinct content words
/// (lowercased, punctuation stripped, stop words removed) occur in the
/// contexts. Relevant iff the context contains any relevance_key fragment,
/// ignoring case. Throws ConfigurationError when an item has no key.
class DeterministicJudge final : public Judge {
public:
    static constexpr double kAttributionThreshold = 0.6;

    bool attributable(std::string_view sentence, std::span<const std::string> contexts) override;
    bool relevant(std::string_view context, const ValidationItem& item) override;
    std::string_view kind() const override { return "deterministic"; }
};

/// Asks a model yes/no questions; a reply starting with "yes" counts as yes.
class LlmJudge final : public Judge {
public:
    explicit LlmJudge(LlmClient& llm) : llm_(llm) {}
    bool attributable(std::string_view sentence, std::span<const std::string> contexts) override;
    bool relevant(std::string_view context, const ValidationItem& item) override;
    std::string_view kind() const override { return "llm"; }

private:
    LlmClient& llm_;
};

std::vector<std::string> content_words(std::string_view text);

struct JudgeVerdict {
    std::vector<bool> attributable;  // per ground-truth sentence
    std::vector<bool> relevant;      // per context item
};

JudgeVerdict judge(const ValidationItem& item, std::span<const std::string> contexts, Judge& judge);

/// Attributable sentences / sentences. Zero when there are no contexts.
double context_recall(std::string_view ground_truth, std::span<const std::string> contexts,
                      Judge& judge);

/// Rank-weighted precision: (1 / #relevant) * sum over m of precision@m * r_m.
/// Zero when nothing is relevant or the list is empty.
double context_precision(std::span<const bool> relevance);
double context_precision(std::span<const std::string> contexts, const ValidationItem& item,
                         Judge& judge);

/// Table rows as tab-separated cells, one newline-terminated line per record.
std::string flatten_table(const fmea::FmeaTable& table);

/// Consecutive pieces of `text` whose lengths are chunk_len plus a seeded
/// uniform jitter of up to a quarter of chunk_len either way. The pieces
/// concatenate back to the text. Boundaries never split a UTF-8 sequence.
std::vector<std::string> random_chunks(std::string_view text, std::size_t chunk_len,
                                       std::uint64_t seed);

/// Baseline index: random chunks of the flattened table, each embedded.
/// Throws PreconditionError when chunk_len < 20.
std::vector<IndexEntry> build_baseline_index(const fmea::FmeaTable& table, std::size_t chunk_len,
                                             std::uint64_t seed, Embedder& embedder);

inline constexpr std::string_view kBaselinePipeline = "baseline-rag";
inline constexpr std::string_view kVectorPipeline = "kg-rag-vector";
inline constexpr std::string_view kFullPipeline = "kg-rag";

struct EvalConfig {
    std::size_t k = kDefaultTopK;
    std::size_t baseline_chunk_len = 200;
    std::uint64_t seed = 42;
    std::size_t row_cap = kDefaultRowCap;
};

struct ItemResult {
    std::string question;
    std::string pipeline;
    double context_recall = 0.0;
    double context_precision = 0.0;
    std::optional<Provenance> provenance;
    std::vector<std::string> contexts;
    std::vector<std::string> diagnostics;
};

struct PipelineSummary {
    std::string pipeline;
    double context_recall = 0.0;
    double context_precision = 0.0;
};

struct EvalReport {
    std::vector<ItemResult> items;
    std::vector<PipelineSummary> pipelines;  // baseline, vector-only, full
    EvalConfig config;
    std::string judge_kind;
    std::string embedder_kind;
    std::string llm_kind;
};

/// Runs the three pipelines over every item. A failing item scores zero for
/// that pipeline and records a diagnostic; the run continues. Configuration
/// errors abort the run.
EvalReport run_eval(const std::vector<ValidationItem>& dataset, const KnowledgeGraph& graph,
                    const fmea::FmeaTable& table, const EvalConfig& config, Judge& judge,
                    LlmClient& llm, Embedder& embedder);

/// Aligned plain-text table of the per-pipeline means.
std::string format_report(const EvalReport& report);

}  // namespace kgrag::eval
