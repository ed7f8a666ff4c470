#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgrag/embed.hpp"
#include "kgrag/graph.hpp"
#include "kgrag/llm.hpp"
#include "kgrag/query.hpp"

namespace kgrag {

inline constexpr std::size_t kDefaultTopK = 3;
inline constexpr std::size_t kDefaultRowCap = 50;

struct Inquiry {
    std::string text;
    std::size_t top_k = kDefaultTopK;
};

enum class Provenance { GraphQuery, VectorSearch };
std::string_view to_string(Provenance p);

struct ContextItem {
    std::string text;
    std::optional<double> cosine_score;
    friend bool operator==(const ContextItem&, const ContextItem&) = default;
};

enum class DiagnosticKind {
    QueryDisabled,
    QueryGenerated,
    NoQueryGenerated,
    QueryParseFailure,
    QueryExecutionError,
    EmptyQueryResult,
    QueryResultTruncated,
    FallbackToVectorSearch,
};
std::string_view to_string(DiagnosticKind k);

struct Diagnostic {
    DiagnosticKind kind;
    std::string detail;
    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct RetrievalOutcome {
    std::string answer;
    Provenance provenance = Provenance::VectorSearch;
    std::optional<std::string> generated_query;
    std::vector<ContextItem> contexts;
    std::vector<Diagnostic> diagnostics;

    bool has(DiagnosticKind k) const;
    std::vector<std::string> context_texts() const;
    friend bool operator==(const RetrievalOutcome&, const RetrievalOutcome&) = default;
};

struct RetrievalOptions {
    /// Off for the vector-only pipeline.
    bool query_generation = true;
    std::size_t row_cap = kDefaultRowCap;
};

/// Strips surrounding whitespace and a markdown code fence (with optional
/// language tag). Returns nullopt for NONE or an empty completion.
std::optional<std::string> normalize_query_completion(std::string_view completion);

/// Asks the model for one query over the schema, or NONE.
std::optional<std::string> generate_query(const Inquiry& inquiry, LlmClient& llm,
                                          std::string_view schema_text);

/// One context line per row: `column: value` pairs joined by ", ".
std::vector<std::string> render_rows(const query::QueryResult& result);

/// Graph query first; vector search over the chunk embeddings when no query
/// is produced, it fails to parse or execute, or it returns no rows. The
/// answer is left empty. Throws EmptyContexts when neither route can produce
/// context.
RetrievalOutcome retrieve(const Inquiry& inquiry, const KnowledgeGraph& graph, LlmClient& llm,
                          Embedder& embedder, const RetrievalOptions& options = {});

/// Throws PreconditionError for empty contexts.
std::string generate_answer(const Inquiry& inquiry, const std::vector<std::string>& contexts,
                            LlmClient& llm);

}  // namespace kgrag
