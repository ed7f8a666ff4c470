#include "kgrag/json_io.hpp"

#include <cstdio>

#include "kgrag/error.hpp"

namespace kgrag::json_io {

using nlohmann::json;

std::string stats_text(const GraphStats& stats) {
    std::string out = "{\"total_nodes\":" + std::to_string(stats.total_nodes) +
                      ",\"total_relationships\":" + std::to_string(stats.total_relationships) +
                      ",\"unique_path_count\":" + std::to_string(stats.unique_path_count) +
                      ",\"labels\":[";
    char avg[64];
    for (std::size_t i = 0; i < stats.rows.size(); ++i) {
        const auto& r = stats.rows[i];
        std::snprintf(avg, sizeof avg, "%.2f", r.avg_relationships);
        if (i) out += ",";
        out += "{\"label\":" + json(std::string(to_string(r.label))).dump() +
               ",\"nodes\":" + std::to_string(r.node_count) +
               ",\"min_relationships\":" + std::to_string(r.min_relationships) +
               ",\"max_relationships\":" + std::to_string(r.max_relationships) +
               ",\"avg_relationships\":" + avg + "}";
    }
    out += "]}";
    return out;
}

json ask_response(const RetrievalOutcome& outcome, const StageTimings& timings) {
    json contexts = json::array();
    for (const auto& c : outcome.contexts) {
        json item = {{"text", c.text}};
        item["score"] = c.cosine_score ? json(*c.cosine_score) : json(nullptr);
        contexts.push_back(std::move(item));
    }
    json diagnostics = json::array();
    for (const auto& d : outcome.diagnostics)
        diagnostics.push_back({{"kind", std::string(to_string(d.kind))}, {"detail", d.detail}});
    json out = {
        {"answer", outcome.answer},
        {"provenance", std::string(to_string(outcome.provenance))},
        {"generated_query", outcome.generated_query ? json(*outcome.generated_query) : json(nullptr)},
        {"contexts", std::move(contexts)},
        {"diagnostics", std::move(diagnostics)},
        {"timing_ms",
         {{"retrieval", timings.retrieval_ms},
          {"answer", timings.answer_ms},
          {"total", timings.total_ms}}}};
    return out;
}

json report(const eval::EvalReport& r) {
    json pipelines = json::array();
    for (const auto& p : r.pipelines)
        pipelines.push_back({{"pipeline", p.pipeline},
                             {"context_recall", p.context_recall},
                             {"context_precision", p.context_precision}});
    json items = json::array();
    for (const auto& i : r.items) {
        items.push_back(
            {{"question", i.question},
             {"pipeline", i.pipeline},
             {"context_recall", i.context_recall},
             {"context_precision", i.context_precision},
             {"provenance", i.provenance ? json(std::string(to_string(*i.provenance))) : json(nullptr)},
             {"contexts", i.contexts},
             {"diagnostics", i.diagnostics}});
    }
    return {{"pipelines", std::move(pipelines)},
            {"items", std::move(items)},
            {"config",
             {{"k", r.config.k},
              {"baseline_chunk_len", r.config.baseline_chunk_len},
              {"seed", r.config.seed},
              {"row_cap", r.config.row_cap},
              {"judge", r.judge_kind},
              {"embedder", r.embedder_kind},
              {"llm", r.llm_kind}}}};
}

std::vector<eval::ValidationItem> parse_dataset(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DatasetError(std::string("dataset is not valid JSON: ") + e.what());
    }
    return parse_dataset_json(doc);
}

std::vector<eval::ValidationItem> parse_dataset_json(const json& doc) {
    const json* items = &doc;
    if (doc.is_object()) {
        if (!doc.contains("items")) throw DatasetError("dataset object needs an \"items\" array");
        items = &doc["items"];
    }
    if (!items->is_array()) throw DatasetError("dataset items must be an array");
    if (items->empty()) throw DatasetError("dataset has no items");

    std::vector<eval::ValidationItem> out;
    for (std::size_t i = 0; i < items->size(); ++i) {
        const auto& it = (*items)[i];
        const std::string where = "dataset item " + std::to_string(i) + ": ";
        if (!it.is_object()) throw DatasetError(where + "not an object");
        eval::ValidationItem v;
        for (const char* field : {"question", "ground_truth"}) {
            if (!it.contains(field) || !it[field].is_string() ||
                it[field].get<std::string>().empty())
                throw DatasetError(where + "missing or empty \"" + field + "\"");
        }
        v.question = it["question"].get<std::string>();
        v.ground_truth = it["ground_truth"].get<std::string>();
        if (it.contains("relevance_key") && !it["relevance_key"].is_null()) {
            const auto& k = it["relevance_key"];
            std::vector<std::string> keys;
            if (k.is_string()) {
                keys.push_back(k.get<std::string>());
            } else if (k.is_array()) {
                for (const auto& e : k) {
                    if (!e.is_string()) throw DatasetError(where + "relevance_key entries must be strings");
                    keys.push_back(e.get<std::string>());
                }
            } else {
                throw DatasetError(where + "relevance_key must be a string or an array of strings");
            }
            v.relevance_key = std::move(keys);
        }
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace kgrag::json_io
