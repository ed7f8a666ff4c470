#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "generators.hpp"
#include "kgrag/error.hpp"
#include "kgrag/fmea.hpp"
#include "kgrag/graph.hpp"
#include "oracles.hpp"

using namespace kgrag;

namespace {

fmea::FmeaTable table_one() {
    std::ifstream in(KGRAG_TEST_DATA "/table1.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    return fmea::parse_fmea_table(ss.str());
}

}  // namespace

TEST(Names, RoundTrip) {
    for (Label l : kContentLabels) EXPECT_EQ(parse_label(to_string(l)), l);
    EXPECT_EQ(parse_label("VectorEmbedding"), Label::VectorEmbedding);
    for (RelationType r : kRelationTypes) EXPECT_EQ(parse_relation_type(to_string(r)), r);
    EXPECT_FALSE(parse_label("failuremode"));
    EXPECT_FALSE(parse_relation_type("causes"));
}

TEST(Graph, InternDeduplicatesCanonicalSymbol) {
    KnowledgeGraph g;
    const auto a = g.intern(Label::FailureCause, "Contaminated  surfaces");
    const auto b = g.intern(Label::FailureCause, " Contaminated surfaces");
    const auto c = g.intern(Label::FailureMode, "Contaminated surfaces");
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    EXPECT_EQ(g.node(a).symbol, "Contaminated surfaces");
    EXPECT_EQ(g.find(Label::FailureCause, "Contaminated surfaces"), a);
}

TEST(Graph, AddNodeRejectsDuplicateKey) {
    KnowledgeGraph g;
    g.add_node(Label::ProcessStep, "x");
    EXPECT_THROW(g.add_node(Label::ProcessStep, "x"), SchemaError);
}

TEST(Graph, EndpointRulesEnforced) {
    KnowledgeGraph g;
    const auto m = g.intern(Label::FailureMode, "m");
    const auto c = g.intern(Label::FailureCause, "c");
    const auto e = g.intern(Label::FailureEffect, "e");
    EXPECT_NO_THROW(g.add_triple(m, RelationType::isDueToFailureCause, c));
    EXPECT_THROW(g.add_triple(c, RelationType::isDueToFailureCause, m), SchemaError);
    EXPECT_THROW(g.add_triple(m, RelationType::isDueToFailureCause, e), SchemaError);
    EXPECT_THROW(g.add_triple(m, RelationType::isDueToFailureCause, c), SchemaError);
    EXPECT_THROW(g.add_triple(m, RelationType::isDueToFailureCause, NodeId{999}), NotFoundError);
    EXPECT_TRUE(g.has_triple(m, RelationType::isDueToFailureCause, c));
    EXPECT_EQ(g.outgoing(m).size(), 1u);
    EXPECT_EQ(g.incoming(c).size(), 1u);
}

TEST(Graph, CheckedLiteralConflicts) {
    KnowledgeGraph g;
    const auto e = g.intern(Label::FailureEffect, "e");
    g.set_literal_checked(e, "S", std::int64_t{7});
    EXPECT_NO_THROW(g.set_literal_checked(e, "S", std::int64_t{7}));
    EXPECT_THROW(g.set_literal_checked(e, "S", std::int64_t{8}), ConflictError);
    EXPECT_EQ(g.node(e).literal("S"), Value{std::int64_t{7}});
    EXPECT_TRUE(is_null(g.node(e).literal("D")));
}

TEST(Graph, EmbeddingAttachment) {
    KnowledgeGraph g;
    const auto m = g.intern(Label::FailureMode, "m");
    const auto s = g.intern(Label::ProcessStep, "s");
    const auto emb = g.attach_embedding(m, "chunk", {1.0, 0.0, 0.0});
    EXPECT_EQ(g.embedding_dimension(), 3u);
    EXPECT_EQ(g.embedding_of(m), emb);
    EXPECT_THROW(g.attach_embedding(m, "chunk", {1.0, 0.0}), DimensionMismatch);
    EXPECT_THROW(g.attach_embedding(s, "chunk", {1.0, 0.0, 0.0}), SchemaError);
    // Replacing keeps one embedding node per mode.
    const auto emb2 = g.attach_embedding(m, "chunk2", {0.0, 1.0, 0.0});
    EXPECT_EQ(g.embedding_of(m), emb2);
    EXPECT_FALSE(g.contains(emb));
    EXPECT_EQ(g.embeddings().size(), 1u);
    EXPECT_EQ(g.content_node_count(), 2u);
    EXPECT_EQ(g.content_triple_count(), 0u);
}

TEST(Transpose, TableOneCounts) {
    const auto g = transpose(table_one());
    EXPECT_EQ(g.content_node_count(), 14u);
    EXPECT_EQ(g.content_triple_count(), 12u);
    EXPECT_EQ(g.nodes_with_label(Label::ProcessStep).size(), 2u);
    EXPECT_EQ(g.nodes_with_label(Label::FailureCause).size(), 3u);

    const auto cause = g.find(Label::FailureCause, "Improper welding parameters, contaminated surfaces");
    ASSERT_TRUE(cause);
    EXPECT_EQ(g.node(*cause).literal("O"), Value{std::int64_t{6}});
    EXPECT_EQ(g.node(*cause).literal("RPN"), Value{std::int64_t{192}});
    const auto effect = g.find(Label::FailureEffect, "Misalignment of cooling system");
    EXPECT_EQ(g.node(*effect).literal("S"), Value{std::int64_t{7}});
    const auto measure = g.find(Label::FailureMeasure, "Weld quality checks, resistance testing");
    EXPECT_EQ(g.node(*measure).literal("D"), Value{std::int64_t{4}});
}

TEST(Transpose, TableOneStats) {
    const auto st = stats(transpose(table_one()));
    EXPECT_EQ(st.total_nodes, 14u);
    EXPECT_EQ(st.total_relationships, 12u);
    EXPECT_EQ(st.unique_path_count, 3u);
    ASSERT_EQ(st.rows.size(), 5u);
    EXPECT_EQ(st.rows[0].label, Label::FailureMode);
    EXPECT_EQ(st.rows[0].node_count, 3u);
    EXPECT_EQ(st.rows[0].min_relationships, 3u);
    EXPECT_EQ(st.rows[4].label, Label::ProcessStep);
    EXPECT_EQ(st.rows[4].min_relationships, 1u);
    EXPECT_EQ(st.rows[4].max_relationships, 2u);
    EXPECT_DOUBLE_EQ(st.rows[4].avg_relationships, 1.5);
}

TEST(Transpose, RepeatedRowsCollapse) {
    auto t = table_one();
    t.records.push_back(t.records[0]);
    const auto g = transpose(t);
    EXPECT_EQ(g.content_node_count(), 14u);
    EXPECT_EQ(g.content_triple_count(), 12u);
}

TEST(Transpose, ConflictingSharedNodeThrows) {
    auto t = table_one();
    auto r = t.records[0];
    r.failure_mode = "Another mode";
    r.severity = fmea::Rating(2);
    r.rpn = 2 * 5 * 3;
    t.records.push_back(r);
    EXPECT_THROW(transpose(t), ConflictError);
}

TEST(Transpose, EmptyTable) {
    const auto g = transpose({});
    EXPECT_EQ(g.content_node_count(), 0u);
    const auto st = stats(g);
    EXPECT_EQ(st.unique_path_count, 0u);
    for (const auto& row : st.rows) EXPECT_EQ(row.avg_relationships, 0.0);
}

TEST(Transpose, MatchesOracleOnRandomTables) {
    testgen::Rng rng(101);
    for (int t = 0; t < 30; ++t) {
        const auto table = testgen::random_table(rng, 60);
        const auto g = transpose(table);
        EXPECT_EQ(oracle::from_stats(stats(g)), oracle::transposition(table));
        EXPECT_EQ(oracle::recount(g), oracle::transposition(table));
    }
}

TEST(Subgraph, PreorderByRelationThenSymbol) {
    const auto g = transpose(table_one());
    const auto mode = g.find(Label::FailureMode, "Weak weld joints");
    const auto order = subgraph_of(g, *mode);
    ASSERT_EQ(order.size(), 5u);
    EXPECT_EQ(order[0], *mode);
    EXPECT_EQ(g.node(order[1]).label, Label::ProcessStep);
    EXPECT_EQ(g.node(order[2]).label, Label::FailureEffect);
    EXPECT_EQ(g.node(order[3]).label, Label::FailureCause);
    EXPECT_EQ(g.node(order[4]).label, Label::FailureMeasure);
    EXPECT_EQ(reachable_triples(g, *mode).size(), 4u);
    EXPECT_THROW(subgraph_of(g, order[1]), SchemaError);
}

TEST(Subgraph, SharedCauseReachesOneMeasure) {
    KnowledgeGraph g;
    const auto m = g.intern(Label::FailureMode, "m");
    const auto c1 = g.intern(Label::FailureCause, "b cause");
    const auto c2 = g.intern(Label::FailureCause, "a cause");
    const auto x = g.intern(Label::FailureMeasure, "x");
    g.add_triple(m, RelationType::isDueToFailureCause, c1);
    g.add_triple(m, RelationType::isDueToFailureCause, c2);
    g.add_triple(c1, RelationType::isImprovedByFailureMeasure, x);
    g.add_triple(c2, RelationType::isImprovedByFailureMeasure, x);
    const auto order = subgraph_of(g, m);
    ASSERT_EQ(order.size(), 4u);
    EXPECT_EQ(order[1], c2);  // "a cause" before "b cause"
    EXPECT_EQ(order[2], x);
    EXPECT_EQ(order[3], c1);
}
