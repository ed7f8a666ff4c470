#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include "kgrag/config.hpp"
#include "kgrag/eval.hpp"
#include "kgrag/fmea.hpp"
#include "kgrag/graph.hpp"
#include "kgrag/json_io.hpp"
#include "kgrag/retrieval.hpp"

namespace httplib {
class Server;
}

namespace kgrag {

/// One ingested FMEA: the graph with embeddings and the expanded table.
struct Store {
    KnowledgeGraph graph;
    fmea::FmeaTable table;
};

struct IngestSummary {
    std::size_t nodes = 0;
    std::size_t triples = 0;
    std::size_t embeddings = 0;
};

struct AskResult {
    RetrievalOutcome outcome;
    json_io::StageTimings timings;
};

struct HttpResponse {
    int status = 200;
    std::string body;  // JSON text
};

/// Raised when a remote model call fails; names the pipeline stage.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

class EvalBusy : public Error {
public:
    EvalBusy() : Error("an evaluation is already running") {}
};

/// Transport-independent service. Readers take a snapshot of the current
/// store; ingest builds a complete new store and swaps it in, so a reader
/// sees the old store or the new one, never a mix. Ingests are serialized
/// and only one evaluation runs at a time.
class ServiceCore {
public:
    explicit ServiceCore(ServiceConfig config);
    ServiceCore(ServiceConfig config, std::shared_ptr<Embedder> embedder,
                std::shared_ptr<LlmClient> llm);

    /// Loads the store persisted in the data directory, if any.
    bool load_persisted();
    /// Null before the first ingest.
    std::shared_ptr<const Store> snapshot() const;

    /// Parse, expand abbreviations, transpose, embed, persist, swap.
    IngestSummary ingest(std::string_view fmea_csv,
                         std::optional<std::string_view> abbreviations_csv = std::nullopt);
    /// Throws NoStore, StageError or EmptyContexts.
    AskResult ask(const std::string& question, std::optional<std::size_t> k = std::nullopt);
    GraphStats stats() const;
    /// Throws NoStore, EvalBusy or ConfigurationError.
    eval::EvalReport evaluate(const std::vector<eval::ValidationItem>& dataset);

    HttpResponse handle_ingest(std::string_view fmea_csv,
                               std::optional<std::string_view> abbreviations_csv);
    /// Body: {"question": text, "k": optional positive integer}.
    HttpResponse handle_ask(std::string_view body);
    HttpResponse handle_stats() const;
    HttpResponse handle_health() const;
    /// Body: a dataset (array or {"items": [...]}) or {"path": file}.
    HttpResponse handle_eval(std::string_view body);

    const ServiceConfig& config() const { return config_; }
    Embedder& embedder() { return *embedder_; }
    LlmClient& llm() { return *llm_; }

    std::filesystem::path store_path() const { return config_.data_dir / "store.json"; }
    std::filesystem::path table_path() const { return config_.data_dir / "fmea.csv"; }

private:
    std::shared_ptr<const Store> require_store() const;

    ServiceConfig config_;
    std::shared_ptr<Embedder> embedder_;
    std::shared_ptr<LlmClient> llm_;

    mutable std::mutex store_mutex_;
    std::shared_ptr<const Store> store_;
    std::mutex ingest_mutex_;
    std::mutex eval_mutex_;
};

/// REST front end over a ServiceCore. Sends permissive CORS headers so a
/// browser client served from elsewhere can call it.
class HttpServer {
public:
    explicit HttpServer(ServiceCore& core);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds; port 0 picks a free port. Returns the bound port.
    int bind(const std::string& host, int port);
    /// Serves on the calling thread until stop().
    void serve();
    /// Serves on a background thread.
    void start();
    void stop();

private:
    ServiceCore& core_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
};

}  // namespace kgrag
