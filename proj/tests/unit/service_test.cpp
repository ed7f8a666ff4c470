#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "kgrag/error.hpp"
#include "kgrag/json_io.hpp"
#include "kgrag/service.hpp"

using namespace kgrag;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Down final : public LlmClient {
public:
    std::string_view kind() const override { return "down"; }

private:
    std::string do_complete(const LlmRequest&) override { throw RemoteError("503 from provider"); }
};

class ServiceTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("kgrag_service_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        std::filesystem::remove_all(dir_);
        config_.data_dir = dir_;
        config_.llm.mock_script = KGRAG_TEST_DATA "/mock_script.csv";
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    std::filesystem::path dir_;
    ServiceConfig config_;
    const std::string table1_ = slurp(KGRAG_TEST_DATA "/table1.csv");
};

}  // namespace

TEST_F(ServiceTest, IngestStatsAsk) {
    ServiceCore core(config_);
    EXPECT_FALSE(core.snapshot());
    const auto s = core.ingest(table1_);
    EXPECT_EQ(s.nodes, 14u);
    EXPECT_EQ(s.triples, 12u);
    EXPECT_EQ(s.embeddings, 3u);
    EXPECT_EQ(core.stats().total_nodes, 14u);

    const auto r = core.ask("How many failure effects with an S value of over 5 exist?");
    EXPECT_EQ(r.outcome.provenance, Provenance::GraphQuery);
    ASSERT_EQ(r.outcome.contexts.size(), 1u);
    EXPECT_EQ(r.outcome.contexts[0].text, "NumberFailureEffectsWithSOver5: 3");
    EXPECT_FALSE(r.outcome.answer.empty());
    EXPECT_GE(r.timings.total_ms, r.timings.retrieval_ms);

    const auto v = core.ask("Which welding problems exist?", 2);
    EXPECT_EQ(v.outcome.provenance, Provenance::VectorSearch);
    EXPECT_EQ(v.outcome.contexts.size(), 2u);
}

TEST_F(ServiceTest, StatsJsonShape) {
    ServiceCore core(config_);
    core.ingest(table1_);
    const auto r = core.handle_stats();
    EXPECT_EQ(r.status, 200);
    EXPECT_NE(r.body.find("\"avg_relationships\":1.50"), std::string::npos);
    const auto j = json::parse(r.body);
    EXPECT_EQ(j["total_nodes"], 14);
    EXPECT_EQ(j["total_relationships"], 12);
    EXPECT_EQ(j["unique_path_count"], 3);
    EXPECT_EQ(j["labels"].size(), 5u);
    EXPECT_EQ(j["labels"][0]["label"], "FailureMode");
}

TEST_F(ServiceTest, ErrorsBeforeIngest) {
    ServiceCore core(config_);
    EXPECT_THROW(core.ask("q"), NoStore);
    EXPECT_EQ(core.handle_stats().status, 409);
    EXPECT_EQ(core.handle_ask(R"({"question":"q"})").status, 409);
    EXPECT_EQ(core.handle_eval(R"([{"question":"q","ground_truth":"g","relevance_key":"k"}])").status, 409);
    const auto h = json::parse(core.handle_health().body);
    EXPECT_EQ(h["store_loaded"], false);
    EXPECT_EQ(h["llm_kind"], "scripted-mock");
}

TEST_F(ServiceTest, AskValidation) {
    ServiceCore core(config_);
    core.ingest(table1_);
    EXPECT_EQ(core.handle_ask("nope").status, 400);
    EXPECT_EQ(core.handle_ask(R"({"q":1})").status, 400);
    EXPECT_EQ(core.handle_ask(R"({"question":"q","k":0})").status, 400);
    EXPECT_EQ(core.handle_ask(R"({"question":"  "})").status, 400);
    const auto ok = core.handle_ask(R"({"question":"welding","k":1})");
    ASSERT_EQ(ok.status, 200);
    const auto j = json::parse(ok.body);
    EXPECT_EQ(j["provenance"], "vector-search");
    EXPECT_EQ(j["contexts"].size(), 1u);
    EXPECT_TRUE(j["contexts"][0]["score"].is_number());
    EXPECT_TRUE(j["generated_query"].is_null());
    EXPECT_TRUE(j["timing_ms"]["total"].is_number());
}

TEST_F(ServiceTest, IngestErrorsKeepPreviousStore) {
    ServiceCore core(config_);
    core.ingest(table1_);
    const auto before = core.snapshot();
    const auto bad = core.handle_ingest(std::string(fmea::kHeader) + "\ns,m,e,2,c,3,x,4,25\n", std::nullopt);
    EXPECT_EQ(bad.status, 400);
    EXPECT_EQ(json::parse(bad.body)["row"], 2);
    const auto conflict = core.handle_ingest(
        std::string(fmea::kHeader) + "\ns,m,e,2,c,3,x,4,\ns,m2,e,3,c2,3,x2,4,\n", std::nullopt);
    EXPECT_EQ(conflict.status, 400);
    EXPECT_EQ(core.snapshot(), before);
}

TEST_F(ServiceTest, AbbreviationsExpandOnIngest) {
    ServiceCore core(config_);
    core.ingest(std::string(fmea::kHeader) + "\nCSK welding,m,e,2,c,3,x,4,\n",
                slurp(KGRAG_TEST_DATA "/abbreviations.csv"));
    const auto& g = core.snapshot()->graph;
    EXPECT_TRUE(g.find(Label::ProcessStep, "Cell contact system welding"));
}

TEST_F(ServiceTest, PersistsAndReloads) {
    {
        ServiceCore core(config_);
        core.ingest(table1_);
    }
    ServiceCore again(config_);
    EXPECT_TRUE(again.load_persisted());
    EXPECT_EQ(again.stats().total_nodes, 14u);
    EXPECT_EQ(again.snapshot()->table.records.size(), 3u);

    auto other = config_;
    other.embedder.dimension = 64;
    ServiceCore mismatch(other);
    EXPECT_THROW(mismatch.load_persisted(), ConfigurationError);
}

TEST_F(ServiceTest, RemoteFailureNamesStage) {
    ServiceCore core(config_, std::make_shared<HashingEmbedder>(256), std::make_shared<Down>());
    core.ingest(table1_);
    try {
        core.ask("q");
        FAIL();
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "query-generation");
    }
    const auto r = core.handle_ask(R"({"question":"q"})");
    EXPECT_EQ(r.status, 502);
    EXPECT_EQ(json::parse(r.body)["stage"], "query-generation");
}

TEST_F(ServiceTest, EvalEndpoint) {
    ServiceCore core(config_);
    core.ingest(table1_);
    const auto r = core.handle_eval(
        R"({"items":[{"question":"How many failure effects with an S value of over 5 exist?",
            "ground_truth":"There are 3 failure effects with an S value over 5.",
            "relevance_key":["NumberFailureEffectsWithSOver5"]}]})");
    ASSERT_EQ(r.status, 200) << r.body;
    const auto j = json::parse(r.body);
    EXPECT_EQ(j["pipelines"].size(), 3u);
    EXPECT_EQ(j["config"]["judge"], "deterministic");
    EXPECT_EQ(core.handle_eval(R"([{"question":"q","ground_truth":"g"}])").status, 400);
    EXPECT_EQ(core.handle_eval("{").status, 400);
    EXPECT_EQ(core.handle_eval(R"({"path":"/nonexistent/ds.json"})").status, 400);
    const auto by_path = core.handle_eval(R"({"path":")" KGRAG_TEST_DATA R"(/fixture50_dataset.json"})");
    EXPECT_EQ(by_path.status, 200);
}

TEST_F(ServiceTest, ReadersSeeWholeStoresDuringIngest) {
    ServiceCore core(config_);
    core.ingest(table1_);
    const std::string fixture = slurp(KGRAG_TEST_DATA "/fixture50.csv");
    std::atomic<bool> done{false};
    std::atomic<int> bad{0};
    std::jthread reader([&] {
        while (!done) {
            const auto s = core.snapshot();
            const auto n = s->graph.content_node_count();
            if (s->graph.embeddings().size() != s->graph.nodes_with_label(Label::FailureMode).size() ||
                (n != 14 && s->table.records.size() != 50))
                ++bad;
        }
    });
    for (int i = 0; i < 3; ++i) {
        core.ingest(fixture);
        core.ingest(table1_);
    }
    done = true;
    reader.join();
    EXPECT_EQ(bad.load(), 0);
}

TEST_F(ServiceTest, HttpRoundTrip) {
    ServiceCore core(config_);
    HttpServer server(core);
    const int port = server.bind("127.0.0.1", 0);
    ASSERT_GT(port, 0);
    server.start();
    httplib::Client cli("127.0.0.1", port);

    auto health = cli.Get("/health");
    ASSERT_TRUE(health);
    EXPECT_EQ(health->status, 200);
    EXPECT_EQ(health->get_header_value("Access-Control-Allow-Origin"), "*");

    auto pre = cli.Get("/stats");
    ASSERT_TRUE(pre);
    EXPECT_EQ(pre->status, 409);

    auto options = cli.Options("/ask");
    ASSERT_TRUE(options);
    EXPECT_EQ(options->status, 204);

    httplib::MultipartFormDataItems form = {{"fmea", table1_, "table1.csv", "text/csv"}};
    auto ing = cli.Post("/ingest", form);
    ASSERT_TRUE(ing);
    EXPECT_EQ(ing->status, 200) << ing->body;

    json body = {{"fmea_csv", table1_}};
    auto ing2 = cli.Post("/ingest", body.dump(), "application/json");
    ASSERT_TRUE(ing2);
    EXPECT_EQ(ing2->status, 200);

    auto raw = cli.Post("/ingest", table1_, "text/csv");
    ASSERT_TRUE(raw);
    EXPECT_EQ(raw->status, 200);

    auto st = cli.Get("/stats");
    ASSERT_TRUE(st);
    EXPECT_EQ(json::parse(st->body)["total_nodes"], 14);

    auto ask = cli.Post("/ask", R"({"question":"What is the highest RPN?"})", "application/json");
    ASSERT_TRUE(ask);
    ASSERT_EQ(ask->status, 200);
    const auto j = json::parse(ask->body);
    EXPECT_EQ(j["provenance"], "graph-query");
    EXPECT_EQ(j["contexts"][0]["text"], "failure_mode: Weak weld joints, rpn: 192");
    EXPECT_TRUE(j["contexts"][0]["score"].is_null());
    EXPECT_TRUE(j["generated_query"].is_string());

    server.stop();
}
