#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "generators.hpp"
#include "kgrag/error.hpp"
#include "kgrag/eval.hpp"
#include "kgrag/json_io.hpp"
#include "oracles.hpp"

using namespace kgrag;
using namespace kgrag::eval;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Judge with fixed answers, for checking the metric arithmetic alone.
class FixedJudge final : public Judge {
public:
    std::vector<bool> attributions, relevances;
    bool attributable(std::string_view, std::span<const std::string>) override {
        return attributions.at(a_++);
    }
    bool relevant(std::string_view, const ValidationItem&) override { return relevances.at(r_++); }
    std::string_view kind() const override { return "fixed"; }

private:
    std::size_t a_ = 0, r_ = 0;
};

}  // namespace

TEST(Sentences, Split) {
    EXPECT_EQ(split_sentences("One. Two! Three? "), (std::vector<std::string>{"One.", "Two!", "Three?"}));
    EXPECT_EQ(split_sentences("RPN is 1.5 here. Done"), (std::vector<std::string>{"RPN is 1.5 here.", "Done"}));
    EXPECT_TRUE(split_sentences("   ").empty());
}

TEST(Recall, HalfOfTwoSentences) {
    FixedJudge j;
    j.attributions = {true, false};
    const std::vector<std::string> ctx = {"c"};
    EXPECT_DOUBLE_EQ(context_recall("First. Second.", ctx, j), 0.5);
}

TEST(Recall, EdgeCases) {
    DeterministicJudge j;
    EXPECT_EQ(context_recall("One.", {}, j), 0.0);
    const std::vector<std::string> ctx = {"x"};
    EXPECT_THROW(context_recall("  ", ctx, j), PreconditionError);
}

TEST(Precision, PaperPattern) {
    const bool p[] = {true, false, true};
    EXPECT_NEAR(context_precision(std::span<const bool>(p)), 5.0 / 6.0, 1e-9);
}

TEST(Precision, Degenerate) {
    EXPECT_EQ(context_precision(std::span<const bool>{}), 0.0);
    const bool none[] = {false, false};
    EXPECT_EQ(context_precision(std::span<const bool>(none)), 0.0);
    const bool all[] = {true, true, true};
    EXPECT_EQ(context_precision(std::span<const bool>(all)), 1.0);
}

TEST(Precision, AllPatternsUpToTwelve) {
    for (unsigned len = 1; len <= 12; ++len) {
        for (unsigned mask = 0; mask < (1u << len); ++mask) {
            std::vector<bool> v(len);
            bool flags[12];
            for (unsigned i = 0; i < len; ++i) flags[i] = v[i] = (mask >> i) & 1u;
            ASSERT_EQ(context_precision(std::span<const bool>(flags, len)), oracle::context_precision(v));
        }
    }
}

TEST(Precision, FromJudge) {
    FixedJudge j;
    j.relevances = {true, false, true};
    const std::vector<std::string> ctx = {"a", "b", "c"};
    EXPECT_NEAR(context_precision(ctx, {"q", "g", std::nullopt}, j), 5.0 / 6.0, 1e-12);
}

TEST(DeterministicJudge, Attribution) {
    DeterministicJudge j;
    const std::vector<std::string> ctx = {"NumberFailureEffects: 14"};
    // Only "14" of {14, failure, effects} appears as a token.
    EXPECT_FALSE(j.attributable("There are 14 failure effects.", ctx));
    const std::vector<std::string> ctx2 = {"Failure effect: Overheating in module, S: 9"};
    EXPECT_TRUE(j.attributable("The overheating in the module is a failure effect.", ctx2));
    EXPECT_FALSE(j.attributable("Cracking of the seam.", ctx2));
    EXPECT_FALSE(j.attributable("Anything.", {}));
}

TEST(DeterministicJudge, ThresholdIsSixtyPercent) {
    DeterministicJudge j;
    const std::vector<std::string> ctx = {"alpha beta gamma"};
    EXPECT_TRUE(j.attributable("alpha beta gamma delta epsilon.", ctx));   // 3/5
    EXPECT_FALSE(j.attributable("alpha beta delta epsilon.", ctx));        // 2/4
}

TEST(DeterministicJudge, StopWordOnlySentenceUsesAllTokens) {
    DeterministicJudge j;
    EXPECT_TRUE(j.attributable("It is.", std::vector<std::string>{"it is"}));
    EXPECT_FALSE(j.attributable("It is.", std::vector<std::string>{"other"}));
}

TEST(DeterministicJudge, RelevanceByKeyFragment) {
    DeterministicJudge j;
    const ValidationItem item{"q", "g", std::vector<std::string>{"Weld Quality", "x-ray"}};
    EXPECT_TRUE(j.relevant("Failure measure: weld quality checks", item));
    EXPECT_TRUE(j.relevant("Weld X-RAY inspection", item));
    EXPECT_FALSE(j.relevant("Overheating", item));
    EXPECT_THROW(j.relevant("x", {"q", "g", std::nullopt}), ConfigurationError);
}

TEST(LlmJudge, ParsesYes) {
    ScriptedLlm llm({{"supported", " Yes, it is.", Purpose::Judge}});
    LlmJudge j(llm);
    const std::vector<std::string> ctx = {"c"};
    EXPECT_TRUE(j.attributable("supported claim", ctx));
    EXPECT_FALSE(j.attributable("other claim", ctx));
    EXPECT_FALSE(j.relevant("other", {"q", "g", std::nullopt}));
    EXPECT_EQ(j.kind(), "llm");
}

TEST(Chunks, ConcatenateBackAndRespectJitter) {
    testgen::Rng rng(4);
    for (int t = 0; t < 100; ++t) {
        std::string text;
        const auto n = rng.uniform(0, 3000);
        for (int i = 0; i < n; ++i) text += rng.chance(0.1) ? "ß" : std::string(1, static_cast<char>('a' + rng.uniform(0, 25)));
        const auto len = static_cast<std::size_t>(rng.uniform(20, 300));
        const auto chunks = random_chunks(text, len, static_cast<std::uint64_t>(t));
        std::string joined;
        for (std::size_t i = 0; i < chunks.size(); ++i) {
            joined += chunks[i];
            EXPECT_FALSE(chunks[i].empty());
            EXPECT_NE(static_cast<unsigned char>(chunks[i][0]) & 0xC0, 0x80);
            if (i + 1 < chunks.size()) {
                EXPECT_GE(chunks[i].size(), len - len / 4);
                EXPECT_LE(chunks[i].size(), len + len / 4 + 1);
            }
        }
        EXPECT_EQ(joined, text);
        EXPECT_EQ(random_chunks(text, len, static_cast<std::uint64_t>(t)), chunks);
    }
    EXPECT_THROW(random_chunks("abc", 19, 1), PreconditionError);
}

TEST(Flatten, TabSeparatedRows) {
    fmea::FmeaTable t;
    t.records.push_back({"s", "m", "e", "c", "x", fmea::Rating(2), fmea::Rating(3), fmea::Rating(4), 24});
    EXPECT_EQ(flatten_table(t), "s\tm\te\t2\tc\t3\tx\t4\t24\n");
}

TEST(RunEval, FixtureOrderingAndReportShape) {
    const auto table = fmea::parse_fmea_table(slurp(KGRAG_TEST_DATA "/fixture50.csv"));
    auto graph = transpose(table);
    HashingEmbedder embedder(256);
    embed_all(graph, embedder);
    auto llm = ScriptedLlm::from_csv(slurp(KGRAG_TEST_DATA "/fixture50_mock.csv"));
    const auto dataset = json_io::parse_dataset(slurp(KGRAG_TEST_DATA "/fixture50_dataset.json"));
    DeterministicJudge judge;
    const auto report = run_eval(dataset, graph, table, {}, judge, llm, embedder);

    ASSERT_EQ(report.pipelines.size(), 3u);
    EXPECT_EQ(report.items.size(), 3 * dataset.size());
    EXPECT_EQ(report.pipelines[0].pipeline, kBaselinePipeline);
    EXPECT_EQ(report.pipelines[2].pipeline, kFullPipeline);
    EXPECT_GT(report.pipelines[2].context_recall, report.pipelines[1].context_recall);
    EXPECT_GT(report.pipelines[1].context_recall, report.pipelines[0].context_recall);
    EXPECT_GT(report.pipelines[2].context_precision, report.pipelines[1].context_precision);
    EXPECT_GT(report.pipelines[1].context_precision, report.pipelines[0].context_precision);
    EXPECT_EQ(report.judge_kind, "deterministic");

    const auto text = format_report(report);
    EXPECT_TRUE(text.starts_with("pipeline "));
    EXPECT_NE(text.find("kg-rag-vector"), std::string::npos);

    const auto j = json_io::report(report);
    EXPECT_EQ(j["pipelines"].size(), 3u);
    EXPECT_EQ(j["config"]["k"], 3);
}

TEST(RunEval, FailingPipelineScoresZeroAndContinues) {
    const auto table = fmea::parse_fmea_table(slurp(KGRAG_TEST_DATA "/table1.csv"));
    const auto graph = transpose(table);  // no embeddings: vector search impossible
    HashingEmbedder embedder(64);
    ScriptedLlm llm;
    DeterministicJudge judge;
    const std::vector<ValidationItem> ds = {{"weld?", "Welds fail.", std::vector<std::string>{"weld"}}};
    const auto report = run_eval(ds, graph, table, {}, judge, llm, embedder);
    ASSERT_EQ(report.items.size(), 3u);
    EXPECT_GT(report.items[0].context_recall + report.items[0].context_precision, 0.0);
    for (std::size_t i = 1; i < 3; ++i) {
        EXPECT_EQ(report.items[i].context_recall, 0.0);
        ASSERT_FALSE(report.items[i].diagnostics.empty());
        EXPECT_TRUE(report.items[i].diagnostics.back().starts_with("pipeline-failure"));
    }
}

TEST(RunEval, MissingKeyAbortsUnderDeterministicJudge) {
    const auto table = fmea::parse_fmea_table(slurp(KGRAG_TEST_DATA "/table1.csv"));
    const auto graph = transpose(table);
    HashingEmbedder embedder(64);
    ScriptedLlm llm;
    DeterministicJudge judge;
    const std::vector<ValidationItem> ds = {{"weld?", "Welds fail.", std::nullopt}};
    EXPECT_THROW(run_eval(ds, graph, table, {}, judge, llm, embedder), ConfigurationError);
    EXPECT_THROW(run_eval({}, graph, table, {}, judge, llm, embedder), PreconditionError);
}

TEST(Dataset, Parse) {
    const auto a = json_io::parse_dataset(R"([{"question":"q","ground_truth":"g","relevance_key":"k"}])");
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(a[0].relevance_key, std::vector<std::string>{"k"});
    const auto b = json_io::parse_dataset(R"({"items":[{"question":"q","ground_truth":"g"}]})");
    EXPECT_FALSE(b[0].relevance_key);
    EXPECT_THROW(json_io::parse_dataset("{"), DatasetError);
    EXPECT_THROW(json_io::parse_dataset(R"([{"question":"q"}])"), DatasetError);
    EXPECT_THROW(json_io::parse_dataset(R"([{"question":"q","ground_truth":"g","relevance_key":3}])"),
                 DatasetError);
}
