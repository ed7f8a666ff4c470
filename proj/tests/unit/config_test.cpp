#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "kgrag/config.hpp"
#include "kgrag/error.hpp"

using namespace kgrag;

TEST(Config, DefaultsAreValidMockMode) {
    const auto c = parse_config("{}");
    EXPECT_EQ(c.listen_host, "127.0.0.1");
    EXPECT_EQ(c.listen_port, 8080);
    EXPECT_EQ(c.embedder.kind, "deterministic-local");
    EXPECT_EQ(c.llm.kind, "scripted-mock");
    EXPECT_EQ(c.k, 3u);
    EXPECT_EQ(c.row_cap, 50u);
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, ParsesEveryKey) {
    const auto c = parse_config(R"({
        "listen": "0.0.0.0:9001", "data_dir": "store",
        "embedder.kind": "deterministic-local", "embedder.dimension": 128,
        "llm.kind": "scripted-mock", "llm.mock_script": "mock.csv",
        "retrieval.k": 5, "retrieval.row_cap": 20,
        "concurrency.embed": 2, "concurrency.llm": 1,
        "fmea.max_rating": 5, "eval.judge": "llm", "eval.baseline_chunk_len": 120, "eval.seed": 9})",
                                "/etc/kgrag");
    EXPECT_EQ(c.listen_host, "0.0.0.0");
    EXPECT_EQ(c.listen_port, 9001);
    EXPECT_EQ(c.data_dir, std::filesystem::path("/etc/kgrag/store"));
    EXPECT_EQ(c.llm.mock_script, "/etc/kgrag/mock.csv");
    EXPECT_EQ(c.embedder.dimension, 128u);
    EXPECT_EQ(c.k, 5u);
    EXPECT_EQ(c.row_cap, 20u);
    EXPECT_EQ(c.embed_parallelism, 2u);
    EXPECT_EQ(c.llm_concurrency, 1u);
    EXPECT_EQ(c.max_rating, 5);
    EXPECT_EQ(c.judge, "llm");
    EXPECT_EQ(c.baseline_chunk_len, 120u);
    EXPECT_EQ(c.seed, 9u);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
    EXPECT_THROW(parse_config(R"({"retrieval.kk": 3})"), ConfigurationError);
    EXPECT_THROW(parse_config(R"({"retrieval.k": 0})"), ConfigurationError);
    EXPECT_THROW(parse_config(R"({"retrieval.k": "3"})"), ConfigurationError);
    EXPECT_THROW(parse_config(R"({"listen": "nohost"})"), ConfigurationError);
    EXPECT_THROW(parse_config(R"({"llm.kind": "gpt"})"), ConfigurationError);
    EXPECT_THROW(parse_config(R"({"eval.judge": "human"})"), ConfigurationError);
    EXPECT_THROW(parse_config("[1]"), ConfigurationError);
    EXPECT_THROW(parse_config("{"), ConfigurationError);
}

TEST(Config, RejectsInlineCredentials) {
    for (const char* key : {"llm.api_key", "embedder.token", "llm.secret", "password", "llm.credential"}) {
        const std::string doc = std::string("{\"") + key + "\": \"sk-123\"}";
        EXPECT_THROW(parse_config(doc), ConfigurationError) << key;
    }
}

TEST(Config, RemoteNeedsEndpointAndCredentialEnv) {
    EXPECT_THROW(parse_config(R"({"llm.kind": "remote"})"), ConfigurationError);
    EXPECT_THROW(parse_config(R"({"llm.kind": "remote", "llm.endpoint": "http://x"})"), ConfigurationError);
    EXPECT_NO_THROW(parse_config(
        R"({"llm.kind": "remote", "llm.endpoint": "http://x/v1", "llm.credential_env": "KGRAG_TEST_KEY"})"));
}

TEST(Config, MakeClientsFromMockConfig) {
    const auto dir = std::filesystem::temp_directory_path() / "kgrag_config_test";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "mock.csv") << "pattern,completion\nweld,MATCH (m) RETURN m\n";
    std::ofstream(dir / "c.json") << R"({"llm.mock_script": "mock.csv", "embedder.dimension": 32})";
    const auto c = load_config(dir / "c.json");
    const auto e = make_embedder(c);
    EXPECT_EQ(e->dimension(), 32u);
    EXPECT_EQ(e->kind(), "deterministic-local");
    const auto llm = make_llm(c);
    EXPECT_EQ(llm->kind(), "scripted-mock");
    EXPECT_EQ(llm->complete({Purpose::QueryGeneration, "", "weld", {}}), "MATCH (m) RETURN m");
    std::filesystem::remove_all(dir);
    EXPECT_THROW(load_config(dir / "c.json"), Error);
}

TEST(Config, RemoteClientNeedsCredentialInEnvironment) {
    ::unsetenv("KGRAG_TEST_MISSING_KEY");
    const auto c = parse_config(R"({"llm.kind": "remote", "llm.endpoint": "http://127.0.0.1:9/v1",
                                    "llm.credential_env": "KGRAG_TEST_MISSING_KEY"})");
    EXPECT_THROW(make_llm(c), ConfigurationError);
}
