// kgrag command-line interface.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "kgrag/config.hpp"
#include "kgrag/error.hpp"
#include "kgrag/json_io.hpp"
#include "kgrag/query.hpp"
#include "kgrag/service.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUserError = 1;
constexpr int kInternalError = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw kgrag::NotFoundError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool is_user_error(const kgrag::Error& e) {
    return dynamic_cast<const kgrag::RowError*>(&e) || dynamic_cast<const kgrag::QueryError*>(&e) ||
           dynamic_cast<const kgrag::NoStore*>(&e) ||
           dynamic_cast<const kgrag::ConfigurationError*>(&e) ||
           dynamic_cast<const kgrag::DatasetError*>(&e) ||
           dynamic_cast<const kgrag::PreconditionError*>(&e) ||
           dynamic_cast<const kgrag::NotFoundError*>(&e) ||
           dynamic_cast<const kgrag::UnknownSchemaName*>(&e) ||
           dynamic_cast<const kgrag::ConflictError*>(&e) ||
           dynamic_cast<const kgrag::SchemaError*>(&e) ||
           dynamic_cast<const kgrag::EmptyContexts*>(&e) ||
           dynamic_cast<const kgrag::CorruptFile*>(&e) ||
           dynamic_cast<const kgrag::VersionMismatch*>(&e);
}

std::shared_ptr<const kgrag::Store> loaded(kgrag::ServiceCore& core) {
    if (!core.load_persisted()) throw kgrag::NoStore();
    return core.snapshot();
}

void print_stats(const kgrag::GraphStats& s) {
    std::printf("%-16s %7s %5s %5s %8s\n", "label", "nodes", "min", "max", "avg");
    for (const auto& r : s.rows)
        std::printf("%-16s %7zu %5zu %5zu %8.2f\n", std::string(kgrag::to_string(r.label)).c_str(),
                    r.node_count, r.min_relationships, r.max_relationships, r.avg_relationships);
    std::printf("total nodes: %zu\ntotal relationships: %zu\nunique paths: %zu\n", s.total_nodes,
                s.total_relationships, s.unique_path_count);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Knowledge-graph retrieval over FMEA tables"};
    app.require_subcommand(1);
    std::string config_path;
    std::string data_dir;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--data-dir", data_dir, "Store directory (overrides the config)");

    auto* ingest = app.add_subcommand("ingest", "Load an FMEA CSV into the store");
    std::string csv_path, abbrev_path;
    ingest->add_option("csv", csv_path, "FMEA CSV file")->required();
    ingest->add_option("--abbrev", abbrev_path, "Abbreviation CSV (short,long)");

    auto* ask = app.add_subcommand("ask", "Answer a question");
    std::string question;
    std::size_t k = 0;
    ask->add_option("question", question)->required();
    ask->add_option("-k", k, "Number of vector contexts")->check(CLI::PositiveNumber);

    auto* query = app.add_subcommand("query", "Run a graph query directly");
    std::string query_text;
    query->add_option("text", query_text)->required();

    auto* stats = app.add_subcommand("stats", "Print graph statistics");
    bool stats_json = false;
    stats->add_flag("--json", stats_json, "Print the wire format");

    auto* evalc = app.add_subcommand("eval", "Compare the retrieval pipelines on a dataset");
    std::string dataset_path;
    bool eval_json = false;
    evalc->add_option("dataset", dataset_path, "Validation dataset JSON")->required();
    evalc->add_flag("--json", eval_json, "Print the full report as JSON");

    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    std::string listen;
    serve->add_option("--listen", listen, "host:port");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUserError;
    }

    try {
        kgrag::ServiceConfig config;
        if (!config_path.empty()) config = kgrag::load_config(config_path);
        if (!data_dir.empty()) config.data_dir = data_dir;
        if (!listen.empty()) {
            const auto colon = listen.rfind(':');
            if (colon == std::string::npos) throw kgrag::ConfigurationError("--listen must be host:port");
            config.listen_host = listen.substr(0, colon);
            try {
                config.listen_port = std::stoi(listen.substr(colon + 1));
            } catch (const std::exception&) {
                throw kgrag::ConfigurationError("--listen must be host:port");
            }
        }
        kgrag::ServiceCore core(config);

        if (*ingest) {
            const auto csv = read_file(csv_path);
            std::optional<std::string> abbrev;
            if (!abbrev_path.empty()) abbrev = read_file(abbrev_path);
            std::optional<std::string_view> abbrev_view;
            if (abbrev) abbrev_view = *abbrev;
            const auto s = core.ingest(csv, abbrev_view);
            std::printf("nodes: %zu\ntriples: %zu\nembeddings: %zu\n", s.nodes, s.triples,
                        s.embeddings);
        } else if (*ask) {
            loaded(core);
            const auto r = core.ask(question, k ? std::optional<std::size_t>(k) : std::nullopt);
            std::printf("%s\n\nprovenance: %s\n", r.outcome.answer.c_str(),
                        std::string(kgrag::to_string(r.outcome.provenance)).c_str());
            if (r.outcome.generated_query)
                std::printf("query: %s\n", r.outcome.generated_query->c_str());
            std::printf("contexts:\n");
            for (std::size_t i = 0; i < r.outcome.contexts.size(); ++i) {
                const auto& c = r.outcome.contexts[i];
                if (c.cosine_score)
                    std::printf("  [%zu] (%.3f) %s\n", i + 1, *c.cosine_score, c.text.c_str());
                else
                    std::printf("  [%zu] %s\n", i + 1, c.text.c_str());
            }
        } else if (*query) {
            const auto store = loaded(core);
            const auto ast = kgrag::query::parse_query(query_text);
            std::fputs(kgrag::query::format_table(kgrag::query::execute(ast, store->graph)).c_str(),
                       stdout);
        } else if (*stats) {
            loaded(core);
            if (stats_json)
                std::printf("%s\n", kgrag::json_io::stats_text(core.stats()).c_str());
            else
                print_stats(core.stats());
        } else if (*evalc) {
            loaded(core);
            const auto dataset = kgrag::json_io::parse_dataset(read_file(dataset_path));
            const auto report = core.evaluate(dataset);
            if (eval_json)
                std::printf("%s\n", kgrag::json_io::report(report).dump(2).c_str());
            else
                std::fputs(kgrag::eval::format_report(report).c_str(), stdout);
        } else if (*serve) {
            core.load_persisted();
            kgrag::HttpServer server(core);
            const int port = server.bind(core.config().listen_host, core.config().listen_port);
            std::fprintf(stderr, "listening on %s:%d\n", core.config().listen_host.c_str(), port);
            server.serve();
        }
        return kOk;
    } catch (const kgrag::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return is_user_error(e) ? kUserError : kInternalError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kInternalError;
    }
}
