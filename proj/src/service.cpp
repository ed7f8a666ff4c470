#include "kgrag/service.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "kgrag/error.hpp"
#include "kgrag/persist.hpp"
#include "kgrag/text.hpp"

namespace kgrag {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

/// Remembers which purpose a failing call was made for.
class StageTracker final : public LlmClient {
public:
    explicit StageTracker(LlmClient& inner) : inner_(inner) {}
    std::string_view kind() const override { return inner_.kind(); }
    std::optional<Purpose> failed() const { return in_flight_; }

private:
    std::string do_complete(const LlmRequest& request) override {
        in_flight_ = request.purpose;
        auto out = inner_.complete(request);
        in_flight_.reset();
        return out;
    }
    LlmClient& inner_;
    std::optional<Purpose> in_flight_;
};

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw NotFoundError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomically(const std::filesystem::path& p, std::string_view text) {
    auto tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << text;
        if (!out.flush()) throw Error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, p);
}

HttpResponse reply(int status, const json& body) { return {status, body.dump()}; }

HttpResponse error_reply(int status, const std::string& message, json extra = json::object()) {
    extra["error"] = message;
    return reply(status, extra);
}

}  // namespace

ServiceCore::ServiceCore(ServiceConfig config)
    : ServiceCore(config, make_embedder(config), make_llm(config)) {}

ServiceCore::ServiceCore(ServiceConfig config, std::shared_ptr<Embedder> embedder,
                         std::shared_ptr<LlmClient> llm)
    : config_(std::move(config)), embedder_(std::move(embedder)), llm_(std::move(llm)) {
    config_.validate();
}

bool ServiceCore::load_persisted() {
    if (!std::filesystem::exists(store_path())) return false;
    auto store = std::make_shared<Store>();
    store->graph = load(store_path());
    if (std::filesystem::exists(table_path()))
        store->table = fmea::parse_fmea_table(read_file(table_path()), {config_.max_rating});
    const auto dim = store->graph.embedding_dimension();
    if (!store->graph.embeddings().empty() && dim != embedder_->dimension())
        throw ConfigurationError("stored embeddings have dimension " + std::to_string(dim) +
                                 " but the configured embedder produces " +
                                 std::to_string(embedder_->dimension()) + "; ingest again");
    std::lock_guard lock(store_mutex_);
    store_ = std::move(store);
    return true;
}

std::shared_ptr<const Store> ServiceCore::snapshot() const {
    std::lock_guard lock(store_mutex_);
    return store_;
}

std::shared_ptr<const Store> ServiceCore::require_store() const {
    auto s = snapshot();
    if (!s) throw NoStore();
    return s;
}

IngestSummary ServiceCore::ingest(std::string_view fmea_csv,
                                  std::optional<std::string_view> abbreviations_csv) {
    std::lock_guard serial(ingest_mutex_);
    auto store = std::make_shared<Store>();
    store->table = fmea::parse_fmea_table(fmea_csv, {config_.max_rating});
    if (abbreviations_csv) {
        store->table.abbreviations = fmea::parse_abbreviation_map(*abbreviations_csv);
        store->table = fmea::expand_abbreviations(store->table);
    }
    store->graph = transpose(store->table);
    IngestSummary summary;
    summary.embeddings = embed_all(store->graph, *embedder_, config_.embed_parallelism);
    summary.nodes = store->graph.content_node_count();
    summary.triples = store->graph.content_triple_count();

    std::filesystem::create_directories(config_.data_dir);
    write_file_atomically(table_path(), fmea::write_fmea_table(store->table));
    save(store->graph, store_path());

    std::lock_guard lock(store_mutex_);
    store_ = std::move(store);
    return summary;
}

AskResult ServiceCore::ask(const std::string& question, std::optional<std::size_t> k) {
    if (trim(question).empty()) throw PreconditionError("question is empty");
    const auto store = require_store();
    const auto t0 = Clock::now();
    AskResult result;
    StageTracker llm(*llm_);
    const Inquiry inquiry{question, k.value_or(config_.k)};
    RetrievalOptions options;
    options.row_cap = config_.row_cap;
    try {
        result.outcome = retrieve(inquiry, store->graph, llm, *embedder_, options);
        result.timings.retrieval_ms = ms_since(t0);
        const auto t1 = Clock::now();
        result.outcome.answer = generate_answer(inquiry, result.outcome.context_texts(), llm);
        result.timings.answer_ms = ms_since(t1);
    } catch (const RemoteError& e) {
        const auto stage = llm.failed() ? std::string(to_string(*llm.failed())) : "embedding";
        throw StageError(stage, e.what());
    }
    result.timings.total_ms = ms_since(t0);
    return result;
}

GraphStats ServiceCore::stats() const { return kgrag::stats(require_store()->graph); }

eval::EvalReport ServiceCore::evaluate(const std::vector<eval::ValidationItem>& dataset) {
    std::unique_lock busy(eval_mutex_, std::try_to_lock);
    if (!busy.owns_lock()) throw EvalBusy();
    const auto store = require_store();

    eval::EvalConfig cfg;
    cfg.k = config_.k;
    cfg.baseline_chunk_len = config_.baseline_chunk_len;
    cfg.seed = config_.seed;
    cfg.row_cap = config_.row_cap;

    std::unique_ptr<eval::Judge> judge;
    if (config_.judge == "llm") {
        judge = std::make_unique<eval::LlmJudge>(*llm_);
    } else {
        for (const auto& item : dataset)
            if (!item.relevance_key || item.relevance_key->empty())
                throw ConfigurationError("deterministic judge needs a relevance_key for question '" +
                                         item.question + "'");
        judge = std::make_unique<eval::DeterministicJudge>();
    }
    return eval::run_eval(dataset, store->graph, store->table, cfg, *judge, *llm_, *embedder_);
}

// ---------------------------------------------------------------------------

HttpResponse ServiceCore::handle_ingest(std::string_view fmea_csv,
                                        std::optional<std::string_view> abbreviations_csv) {
    try {
        const auto s = ingest(fmea_csv, abbreviations_csv);
        return reply(200, {{"nodes", s.nodes}, {"triples", s.triples}, {"embeddings", s.embeddings}});
    } catch (const RowError& e) {
        return error_reply(400, e.what(), {{"row", e.row()}});
    } catch (const ConflictError& e) {
        return error_reply(400, e.what());
    } catch (const SchemaError& e) {
        return error_reply(400, e.what());
    } catch (const EmbedAllError& e) {
        return error_reply(503, std::string("embedder unavailable: ") + e.what(),
                           {{"stage", "embedding"}});
    } catch (const RemoteError& e) {
        return error_reply(503, std::string("embedder unavailable: ") + e.what(),
                           {{"stage", "embedding"}});
    } catch (const std::exception& e) {
        return error_reply(500, e.what());
    }
}

HttpResponse ServiceCore::handle_ask(std::string_view body) {
    std::string question;
    std::optional<std::size_t> k;
    try {
        const auto doc = json::parse(body);
        if (!doc.is_object() || !doc.contains("question") || !doc["question"].is_string())
            return error_reply(400, "body must be {\"question\": text, \"k\": optional integer}");
        question = doc["question"].get<std::string>();
        if (doc.contains("k") && !doc["k"].is_null()) {
            if (!doc["k"].is_number_integer() || doc["k"].get<std::int64_t>() < 1)
                return error_reply(400, "k must be a positive integer");
            k = doc["k"].get<std::size_t>();
        }
    } catch (const json::exception& e) {
        return error_reply(400, std::string("invalid JSON body: ") + e.what());
    }
    try {
        const auto r = ask(question, k);
        return reply(200, json_io::ask_response(r.outcome, r.timings));
    } catch (const NoStore& e) {
        return error_reply(409, e.what());
    } catch (const StageError& e) {
        return error_reply(502, e.what(), {{"stage", e.stage()}});
    } catch (const PreconditionError& e) {
        return error_reply(400, e.what());
    } catch (const EmptyContexts& e) {
        return error_reply(422, e.what());
    } catch (const std::exception& e) {
        return error_reply(500, e.what());
    }
}

HttpResponse ServiceCore::handle_stats() const {
    try {
        return {200, json_io::stats_text(stats())};
    } catch (const NoStore& e) {
        return error_reply(409, e.what());
    } catch (const std::exception& e) {
        return error_reply(500, e.what());
    }
}

HttpResponse ServiceCore::handle_health() const {
    return reply(200, {{"status", "ok"},
                       {"store_loaded", snapshot() != nullptr},
                       {"embedder_kind", std::string(embedder_->kind())},
                       {"llm_kind", std::string(llm_->kind())}});
}

HttpResponse ServiceCore::handle_eval(std::string_view body) {
    std::vector<eval::ValidationItem> dataset;
    try {
        json doc;
        try {
            doc = json::parse(body);
        } catch (const json::parse_error& e) {
            throw DatasetError(std::string("dataset is not valid JSON: ") + e.what());
        }
        if (doc.is_object() && doc.contains("path")) {
            if (!doc["path"].is_string()) throw DatasetError("path must be a string");
            std::string text;
            try {
                text = read_file(doc["path"].get<std::string>());
            } catch (const NotFoundError& e) {
                throw DatasetError(e.what());
            }
            dataset = json_io::parse_dataset(text);
        } else {
            dataset = json_io::parse_dataset_json(doc);
        }
    } catch (const DatasetError& e) {
        return error_reply(400, e.what());
    }
    try {
        return reply(200, json_io::report(evaluate(dataset)));
    } catch (const NoStore& e) {
        return error_reply(409, e.what());
    } catch (const EvalBusy& e) {
        return error_reply(409, e.what());
    } catch (const ConfigurationError& e) {
        return error_reply(400, e.what());
    } catch (const std::exception& e) {
        return error_reply(500, e.what());
    }
}

// ---------------------------------------------------------------------------

HttpServer::HttpServer(ServiceCore& core) : core_(core), server_(std::make_unique<httplib::Server>()) {
    auto& s = *server_;
    s.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    s.set_payload_max_length(64u << 20);

    auto send = [](httplib::Response& res, const HttpResponse& r) {
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };

    s.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    s.Post("/ingest", [this, send](const httplib::Request& req, httplib::Response& res) {
        std::string fmea;
        std::optional<std::string> abbrev;
        if (req.is_multipart_form_data()) {
            for (const char* name : {"fmea", "fmea_csv", "file"})
                if (req.has_file(name)) {
                    fmea = req.get_file_value(name).content;
                    break;
                }
            for (const char* name : {"abbreviations", "abbreviations_csv"})
                if (req.has_file(name)) abbrev = req.get_file_value(name).content;
        } else if (req.get_header_value("Content-Type").starts_with("application/json")) {
            try {
                const auto doc = json::parse(req.body);
                if (!doc.is_object() || !doc.contains("fmea_csv") || !doc["fmea_csv"].is_string()) {
                    send(res, error_reply(400, "body must be {\"fmea_csv\": text, "
                                               "\"abbreviations_csv\": optional text}"));
                    return;
                }
                fmea = doc["fmea_csv"].get<std::string>();
                if (doc.contains("abbreviations_csv") && doc["abbreviations_csv"].is_string())
                    abbrev = doc["abbreviations_csv"].get<std::string>();
            } catch (const json::exception& e) {
                send(res, error_reply(400, std::string("invalid JSON body: ") + e.what()));
                return;
            }
        } else {
            fmea = req.body;
        }
        std::optional<std::string_view> abbrev_view;
        if (abbrev) abbrev_view = *abbrev;
        send(res, core_.handle_ingest(fmea, abbrev_view));
    });
    s.Post("/ask", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, core_.handle_ask(req.body));
    });
    s.Get("/stats", [this, send](const httplib::Request&, httplib::Response& res) {
        send(res, core_.handle_stats());
    });
    s.Get("/health", [this, send](const httplib::Request&, httplib::Response& res) {
        send(res, core_.handle_health());
    });
    s.Post("/eval", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, core_.handle_eval(req.body));
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        const int bound = server_->bind_to_any_port(host);
        if (bound < 0) throw Error("cannot bind " + host);
        return bound;
    }
    if (!server_->bind_to_port(host, port))
        throw Error("cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void HttpServer::serve() { server_->listen_after_bind(); }

void HttpServer::start() {
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

void HttpServer::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace kgrag
