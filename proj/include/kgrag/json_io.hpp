#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kgrag/eval.hpp"
#include "kgrag/graph.hpp"
#include "kgrag/retrieval.hpp"

namespace kgrag::json_io {

/// Stats document. Averages are written with exactly two decimals, which is
/// why this returns text rather than a json value.
std::string stats_text(const GraphStats& stats);

struct StageTimings {
    double retrieval_ms = 0.0;
    double answer_ms = 0.0;
    double total_ms = 0.0;
};

nlohmann::json ask_response(const RetrievalOutcome& outcome, const StageTimings& timings);
nlohmann::json report(const eval::EvalReport& report);

/// Accepts a JSON array of items or an object with an "items" array. Each
/// item has question, ground_truth and an optional relevance_key (string or
/// array of strings). Throws DatasetError.
std::vector<eval::ValidationItem> parse_dataset(std::string_view text);
std::vector<eval::ValidationItem> parse_dataset_json(const nlohmann::json& doc);

}  // namespace kgrag::json_io
