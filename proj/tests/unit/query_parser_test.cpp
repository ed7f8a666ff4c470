#include <gtest/gtest.h>

#include "generators.hpp"
#include "kgrag/error.hpp"
#include "kgrag/query.hpp"

using namespace kgrag;
using namespace kgrag::query;

TEST(Parse, PaperStyleCountQuery) {
    const auto q = parse_query(
        "MATCH (e:FailureEffect) WHERE e.S > 5 RETURN count(DISTINCT e) AS NumberOfEffects");
    ASSERT_EQ(q.pattern.nodes.size(), 1u);
    EXPECT_EQ(q.pattern.nodes[0].var, "e");
    EXPECT_EQ(q.pattern.nodes[0].label, "FailureEffect");
    ASSERT_EQ(q.where.size(), 1u);
    EXPECT_EQ(q.where[0].op, Comparator::Gt);
    EXPECT_EQ(std::get<PropertyRef>(q.where[0].lhs), (PropertyRef{"e", "S"}));
    EXPECT_EQ(std::get<Value>(q.where[0].rhs), Value{std::int64_t{5}});
    ASSERT_EQ(q.returns.size(), 1u);
    EXPECT_EQ(q.returns[0].expr.aggregate, Aggregate::Count);
    EXPECT_TRUE(q.returns[0].expr.distinct);
    EXPECT_EQ(q.returns[0].column_name(), "NumberOfEffects");
    EXPECT_TRUE(q.is_aggregate());
}

TEST(Parse, ChainWithBothDirections) {
    const auto q = parse_query(
        "match (s:ProcessStep {name: 'Cell stacking'})<-[:occursAtProcessStep]-(m:FailureMode)"
        "-[:isDueToFailureCause]->(c) return m.name, c.RPN order by c.RPN desc limit 2;");
    ASSERT_EQ(q.pattern.edges.size(), 2u);
    EXPECT_EQ(q.pattern.edges[0].direction, Direction::In);
    EXPECT_EQ(q.pattern.edges[1].direction, Direction::Out);
    EXPECT_EQ(q.pattern.nodes[0].name, "Cell stacking");
    EXPECT_FALSE(q.pattern.nodes[2].label);
    ASSERT_TRUE(q.order);
    EXPECT_TRUE(q.order->descending);
    EXPECT_FALSE(q.order->by_alias);
    EXPECT_EQ(q.limit, 2);
    EXPECT_EQ(q.returns[1].column_name(), "c.RPN");
}

TEST(Parse, OrderByAlias) {
    const auto q = parse_query("MATCH (c:FailureCause) RETURN c.RPN AS rpn ORDER BY rpn");
    ASSERT_TRUE(q.order);
    EXPECT_TRUE(q.order->by_alias);
    EXPECT_EQ(q.order->expr.ref.var, "rpn");
}

TEST(Parse, LiteralsAndOperators) {
    const auto q = parse_query(
        "MATCH (a) WHERE a.S >= -2 AND a.x <> 1.5 AND a.y != 'q\\'s' AND a.z <= 1e3 AND a.w < 2 "
        "AND a.v = \"t\" RETURN a");
    ASSERT_EQ(q.where.size(), 6u);
    EXPECT_EQ(std::get<Value>(q.where[0].rhs), Value{std::int64_t{-2}});
    EXPECT_EQ(q.where[1].op, Comparator::Ne);
    EXPECT_EQ(std::get<Value>(q.where[1].rhs), Value{1.5});
    EXPECT_EQ(q.where[2].op, Comparator::Ne);
    EXPECT_EQ(std::get<Value>(q.where[2].rhs), Value{std::string("q's")});
    EXPECT_EQ(std::get<Value>(q.where[3].rhs), Value{1000.0});
    EXPECT_EQ(q.where[4].op, Comparator::Lt);
    EXPECT_EQ(q.where[5].op, Comparator::Eq);
}

TEST(Parse, DefaultColumnNames) {
    const auto q = parse_query("MATCH (m)-[:isDueToFailureCause]->(c) RETURN count(m), avg(c.RPN), "
                               "max(DISTINCT c.O)");
    EXPECT_EQ(q.returns[0].column_name(), "count(m)");
    EXPECT_EQ(q.returns[1].column_name(), "avg(c.RPN)");
    EXPECT_EQ(q.returns[2].column_name(), "max(DISTINCT c.O)");
}

namespace {

template <class E>
void expect_error_at(const std::string& text, std::size_t line, std::size_t column) {
    try {
        parse_query(text);
        ADD_FAILURE() << "no error for: " << text;
    } catch (const E& e) {
        EXPECT_EQ(e.line(), line) << text << " -> " << e.what();
        EXPECT_EQ(e.column(), column) << text << " -> " << e.what();
    } catch (const std::exception& e) {
        ADD_FAILURE() << "wrong error for: " << text << " -> " << e.what();
    }
}

}  // namespace

TEST(ParseErrors, SyntaxPositions) {
    expect_error_at<SyntaxError>("MATCH (a RETURN a", 1, 10);
    expect_error_at<SyntaxError>("MATCH (a)\nRETURN", 2, 7);
    expect_error_at<SyntaxError>("MATCH (a) RETURN a LIMIT x", 1, 26);
    expect_error_at<SyntaxError>("MATCH (a) WHERE a.S ~ 1 RETURN a", 1, 21);
    expect_error_at<SyntaxError>("MATCH (a) WHERE a.s = 'open RETURN a", 1, 23);
    expect_error_at<SyntaxError>("RETURN 1", 1, 1);
    expect_error_at<SyntaxError>("MATCH (a)-[isDueToFailureCause]->(b) RETURN a", 1, 12);
    expect_error_at<SyntaxError>("MATCH (a) RETURN a extra", 1, 20);
    expect_error_at<SyntaxError>("", 1, 1);
}

TEST(ParseErrors, UnboundVariable) {
    expect_error_at<UnboundVariable>("MATCH (a) RETURN b.S", 1, 18);
    expect_error_at<UnboundVariable>("MATCH (a) WHERE x.S > 1 RETURN a", 1, 17);
}

TEST(ParseErrors, MixedAggregate) {
    expect_error_at<MixedAggregate>("MATCH (a) RETURN a, count(a)", 1, 18);
    expect_error_at<MixedAggregate>("MATCH (a) RETURN a ORDER BY count(a)", 1, 29);
}

TEST(ParseErrors, AllDeriveFromQueryError) {
    EXPECT_THROW(parse_query("MATCH"), QueryError);
    EXPECT_THROW(parse_query("MATCH (a) RETURN a LIMIT 99999999999999999999"), QueryError);
}

TEST(Print, ExactText) {
    const auto q = parse_query(
        "match (s:ProcessStep {name:\"A \\\"b\\\"\"})<-[:occursAtProcessStep]-(m) where m.S>=2 "
        "return m.name as n order by n desc limit 1");
    EXPECT_EQ(print_query(q),
              "MATCH (s:ProcessStep {name: \"A \\\"b\\\"\"})<-[:occursAtProcessStep]-(m) WHERE "
              "m.S >= 2 RETURN m.name AS n ORDER BY n DESC LIMIT 1");
}

TEST(Print, RoundTripsRandomQueries) {
    testgen::Rng rng(2024);
    for (int i = 0; i < 2000; ++i) {
        const auto g = testgen::random_graph(rng, 10);
        const auto q = testgen::random_query(rng, g);
        const auto text = print_query(q);
        QueryAst back;
        ASSERT_NO_THROW(back = parse_query(text)) << text;
        ASSERT_EQ(back, q) << text;
        EXPECT_EQ(print_query(back), text);
    }
}

TEST(Schema, TextIsStableAndComplete) {
    const auto s = schema_text();
    EXPECT_EQ(s, schema_text());
    for (auto l : kContentLabels) EXPECT_NE(s.find(std::string(to_string(l))), std::string::npos);
    for (auto r : kRelationTypes) {
        if (r == RelationType::hasVectorEmbedding) continue;
        EXPECT_NE(s.find(std::string(to_string(r))), std::string::npos);
    }
    EXPECT_NE(s.find("RPN"), std::string::npos);
}
