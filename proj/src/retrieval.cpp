#include "kgrag/retrieval.hpp"

#include <algorithm>

#include "kgrag/error.hpp"
#include "kgrag/prompts.hpp"
#include "kgrag/text.hpp"

namespace kgrag {

std::string_view to_string(Provenance p) {
    return p == Provenance::GraphQuery ? "graph-query" : "vector-search";
}

std::string_view to_string(DiagnosticKind k) {
    switch (k) {
        case DiagnosticKind::QueryDisabled: return "query-disabled";
        case DiagnosticKind::QueryGenerated: return "query-generated";
        case DiagnosticKind::NoQueryGenerated: return "no-query-generated";
        case DiagnosticKind::QueryParseFailure: return "query-parse-failure";
        case DiagnosticKind::QueryExecutionError: return "query-execution-error";
        case DiagnosticKind::EmptyQueryResult: return "empty-query-result";
        case DiagnosticKind::QueryResultTruncated: return "query-result-truncated";
        case DiagnosticKind::FallbackToVectorSearch: return "fallback-to-vector-search";
    }
    return "?";
}

bool RetrievalOutcome::has(DiagnosticKind k) const {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [k](const Diagnostic& d) { return d.kind == k; });
}

std::vector<std::string> RetrievalOutcome::context_texts() const {
    std::vector<std::string> out;
    out.reserve(contexts.size());
    for (const auto& c : contexts) out.push_back(c.text);
    return out;
}

std::optional<std::string> normalize_query_completion(std::string_view completion) {
    std::string s = trim(completion);
    if (s.starts_with("```")) {
        const auto first_nl = s.find('\n');
        s = first_nl == std::string::npos ? s.substr(3) : s.substr(first_nl + 1);
        if (s.ends_with("```")) s.resize(s.size() - 3);
        s = trim(s);
    } else if (s.size() >= 2 && s.front() == '`' && s.back() == '`') {
        s = trim(std::string_view(s).substr(1, s.size() - 2));
    }
    if (s.empty() || to_lower_ascii(s) == "none") return std::nullopt;
    return s;
}

std::optional<std::string> generate_query(const Inquiry& inquiry, LlmClient& llm,
                                          std::string_view schema_text) {
    LlmRequest req;
    req.purpose = Purpose::QueryGeneration;
    req.prompt = prompts::query_prompt(schema_text, inquiry.text).compose();
    req.subject = inquiry.text;
    return normalize_query_completion(llm.complete(req));
}

std::vector<std::string> render_rows(const query::QueryResult& result) {
    std::vector<std::string> out;
    out.reserve(result.rows.size());
    for (const auto& row : result.rows) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) line += ", ";
            line += result.columns[i] + ": " + to_display(row[i]);
        }
        out.push_back(std::move(line));
    }
    return out;
}

RetrievalOutcome retrieve(const Inquiry& inquiry, const KnowledgeGraph& graph, LlmClient& llm,
                          Embedder& embedder, const RetrievalOptions& options) {
    if (trim(inquiry.text).empty()) throw PreconditionError("inquiry text is empty");
    RetrievalOutcome out;
    auto note = [&out](DiagnosticKind k, std::string detail = {}) {
        out.diagnostics.push_back({k, std::move(detail)});
    };

    if (!options.query_generation) {
        note(DiagnosticKind::QueryDisabled);
    } else if (auto q = generate_query(inquiry, llm, query::schema_text())) {
        out.generated_query = *q;
        note(DiagnosticKind::QueryGenerated, *q);
        try {
            const auto ast = query::parse_query(*q);
            const auto result = query::execute(ast, graph);
            if (result.rows.empty()) {
                note(DiagnosticKind::EmptyQueryResult);
            } else {
                auto lines = render_rows(result);
                if (lines.size() > options.row_cap) {
                    note(DiagnosticKind::QueryResultTruncated,
                         std::to_string(lines.size()) + " rows capped at " +
                             std::to_string(options.row_cap));
                    lines.resize(options.row_cap);
                }
                out.provenance = Provenance::GraphQuery;
                for (auto& l : lines) out.contexts.push_back({std::move(l), std::nullopt});
                return out;
            }
        } catch (const QueryError& e) {
            note(DiagnosticKind::QueryParseFailure, e.what());
        } catch (const Error& e) {
            note(DiagnosticKind::QueryExecutionError, e.what());
        }
    } else {
        note(DiagnosticKind::NoQueryGenerated);
    }

    note(DiagnosticKind::FallbackToVectorSearch);
    out.provenance = Provenance::VectorSearch;
    if (graph.embeddings().empty()) throw EmptyContexts();
    const auto query_vector = embedder.embed(inquiry.text);
    for (auto& hit : top_k(query_vector, graph, std::max<std::size_t>(inquiry.top_k, 1)))
        out.contexts.push_back({std::move(hit.chunk), hit.score});
    return out;
}

std::string generate_answer(const Inquiry& inquiry, const std::vector<std::string>& contexts,
                            LlmClient& llm) {
    if (contexts.empty()) throw PreconditionError("cannot answer without context");
    LlmRequest req;
    req.purpose = Purpose::Answer;
    req.prompt = prompts::answer_prompt(contexts, inquiry.text).compose();
    req.subject = inquiry.text;
    req.contexts = contexts;
    return llm.complete(req);
}

}  // namespace kgrag
