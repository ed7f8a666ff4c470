#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kgrag/graph.hpp"
#include "kgrag/value.hpp"

/// A small property-graph query language over KnowledgeGraph.
///
///   query   := MATCH pattern [WHERE cond {AND cond}] RETURN item {, item}
///              [ORDER BY key [ASC|DESC]] [LIMIT int] [;]
///   pattern := node {edge node}
///   node    := ( var [: Label] [{ name: string }] )
///   edge    := -[: RelType ]->  |  <-[: RelType ]-
///   cond    := operand (= | <> | != | < | <= | > | >=) operand
///   operand := var | var.prop | string | number
///   item    := (var | var.prop | agg( [DISTINCT] var | var.prop )) [AS alias]
///   agg     := count | sum | avg | min | max
///   key     := item expression or a RETURN alias
///
/// Keywords are case-insensitive, identifiers case-sensitive. `x.name` reads
/// the node symbol; a bare `x` evaluates to the symbol too.
namespace kgrag::query {

enum class Direction { Out, In };

struct NodePattern {
    std::string var;
    std::optional<std::string> label;
    std::optional<std::string> name;
    friend bool operator==(const NodePattern&, const NodePattern&) = default;
};

struct EdgeStep {
    std::string type;
    Direction direction = Direction::Out;
    friend bool operator==(const EdgeStep&, const EdgeStep&) = default;
};

/// nodes.size() == edges.size() + 1; edges[i] joins nodes[i] and nodes[i+1].
struct Pattern {
    std::vector<NodePattern> nodes;
    std::vector<EdgeStep> edges;
    friend bool operator==(const Pattern&, const Pattern&) = default;
};

struct PropertyRef {
    std::string var;
    std::optional<std::string> property;
    friend bool operator==(const PropertyRef&, const PropertyRef&) = default;
};

using Operand = std::variant<PropertyRef, Value>;

enum class Comparator { Eq, Ne, Lt, Le, Gt, Ge };

struct Condition {
    Operand lhs;
    Comparator op = Comparator::Eq;
    Operand rhs;
    friend bool operator==(const Condition&, const Condition&) = default;
};

enum class Aggregate { Count, Sum, Avg, Min, Max };

struct Expression {
    std::optional<Aggregate> aggregate;
    bool distinct = false;
    PropertyRef ref;
    friend bool operator==(const Expression&, const Expression&) = default;
};

struct ReturnItem {
    Expression expr;
    std::optional<std::string> alias;
    /// The alias, or the expression as written, e.g. `count(e)` or `c.RPN`.
    std::string column_name() const;
    friend bool operator==(const ReturnItem&, const ReturnItem&) = default;
};

struct OrderKey {
    Expression expr;
    /// expr.ref.var names a RETURN alias rather than a variable.
    bool by_alias = false;
    bool descending = false;
    friend bool operator==(const OrderKey&, const OrderKey&) = default;
};

struct QueryAst {
    Pattern pattern;
    std::vector<Condition> where;
    std::vector<ReturnItem> returns;
    std::optional<OrderKey> order;
    std::optional<std::int64_t> limit;

    bool is_aggregate() const;
    friend bool operator==(const QueryAst&, const QueryAst&) = default;
};

struct QueryResult {
    std::vector<std::string> columns;
    std::vector<std::vector<Value>> rows;
    friend bool operator==(const QueryResult&, const QueryResult&) = default;
};

/// Throws SyntaxError, UnboundVariable or MixedAggregate with line/column.
QueryAst parse_query(std::string_view text);

/// Canonical text; parse_query(print_query(q)) == q.
std::string print_query(const QueryAst& ast);

std::string_view to_string(Aggregate agg);
std::string_view to_string(Comparator op);
std::string to_string(const Expression& expr);

/// Evaluates against a graph snapshot. Without ORDER BY, rows follow the
/// bindings' node-id tuples in ascending order; ORDER BY sorts by key, ties
/// by the row tuple; LIMIT applies last. Throws UnknownSchemaName.
QueryResult execute(const QueryAst& ast, const KnowledgeGraph& graph);

/// Variable bindings of a pattern, one node id per pattern position.
using Binding = std::vector<NodeId>;

/// Pattern bindings via label and adjacency indexes, sorted ascending.
std::vector<Binding> match(const QueryAst& ast, const KnowledgeGraph& graph);

/// Labels, relation endpoint rules, literal names and the grammar, for
/// inclusion in a query-generation prompt. Byte-stable.
std::string schema_text();

/// Aligned plain-text rendering with a header row.
std::string format_table(const QueryResult& result);

}  // namespace kgrag::query
