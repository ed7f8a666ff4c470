#include <algorithm>
#include <map>
#include <set>

#include "kgrag/error.hpp"
#include "kgrag/query.hpp"

namespace kgrag::query {

namespace {

/// Position in the pattern where each variable is first bound.
std::map<std::string, std::size_t> first_positions(const Pattern& p) {
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < p.nodes.size(); ++i) pos.try_emplace(p.nodes[i].var, i);
    return pos;
}

struct Context {
    const QueryAst& ast;
    const KnowledgeGraph& graph;
    std::map<std::string, std::size_t> positions;

    NodeId bound(const Binding& b, const std::string& var) const {
        return b[positions.at(var)];
    }

    Value evaluate(const PropertyRef& ref, const Binding& b) const {
        const Node& n = graph.node(bound(b, ref.var));
        if (!ref.property || *ref.property == "name") return n.symbol;
        return n.literal(*ref.property);
    }

    Value operand(const Operand& o, const Binding& b) const {
        if (const auto* r = std::get_if<PropertyRef>(&o)) return evaluate(*r, b);
        return std::get<Value>(o);
    }

    bool holds(const Condition& c, const Binding& b) const {
        const Value l = operand(c.lhs, b);
        const Value r = operand(c.rhs, b);
        if (!comparable(l, r)) return false;
        int cmp;
        if (is_numeric(l)) {
            const auto* li = std::get_if<std::int64_t>(&l);
            const auto* ri = std::get_if<std::int64_t>(&r);
            if (li && ri) {
                cmp = *li < *ri ? -1 : (*li > *ri ? 1 : 0);
            } else {
                const double x = as_double(l), y = as_double(r);
                if (x != x || y != y) return false;
                cmp = x < y ? -1 : (x > y ? 1 : 0);
            }
        } else {
            const int c2 = std::get<std::string>(l).compare(std::get<std::string>(r));
            cmp = c2 < 0 ? -1 : (c2 > 0 ? 1 : 0);
        }
        switch (c.op) {
            case Comparator::Eq: return cmp == 0;
            case Comparator::Ne: return cmp != 0;
            case Comparator::Lt: return cmp < 0;
            case Comparator::Le: return cmp <= 0;
            case Comparator::Gt: return cmp > 0;
            case Comparator::Ge: return cmp >= 0;
        }
        return false;
    }

    Value aggregate(const Expression& e, const std::vector<Binding>& bindings) const {
        std::vector<Value> values;
        if (e.distinct && !e.ref.property) {
            // DISTINCT over a bare variable means distinct nodes, not names.
            std::set<NodeId> seen;
            for (const auto& b : bindings)
                if (seen.insert(bound(b, e.ref.var)).second) values.push_back(evaluate(e.ref, b));
        } else {
            for (const auto& b : bindings) {
                Value v = evaluate(e.ref, b);
                if (is_null(v)) continue;
                if (e.distinct &&
                    std::any_of(values.begin(), values.end(),
                                [&](const Value& x) { return total_order(x, v) == 0; }))
                    continue;
                values.push_back(std::move(v));
            }
        }
        std::erase_if(values, is_null);

        switch (*e.aggregate) {
            case Aggregate::Count: return static_cast<std::int64_t>(values.size());
            case Aggregate::Sum: {
                bool real = false;
                std::int64_t isum = 0;
                double dsum = 0.0;
                for (const auto& v : values) {
                    if (const auto* i = std::get_if<std::int64_t>(&v)) {
                        isum += *i;
                        dsum += static_cast<double>(*i);
                    } else if (const auto* d = std::get_if<double>(&v)) {
                        real = true;
                        dsum += *d;
                    }
                }
                return real ? Value{dsum} : Value{isum};
            }
            case Aggregate::Avg: {
                double sum = 0.0;
                std::size_t n = 0;
                for (const auto& v : values)
                    if (is_numeric(v)) {
                        sum += as_double(v);
                        ++n;
                    }
                return n == 0 ? Value{Null{}} : Value{sum / static_cast<double>(n)};
            }
            case Aggregate::Min:
            case Aggregate::Max: {
                if (values.empty()) return Null{};
                const bool want_min = *e.aggregate == Aggregate::Min;
                const Value* best = &values.front();
                for (const auto& v : values) {
                    const auto c = total_order(v, *best);
                    if (want_min ? c < 0 : c > 0) best = &v;
                }
                return *best;
            }
        }
        return Null{};
    }
};

bool node_matches(const NodePattern& p, const Node& n) {
    if (p.label && parse_label(*p.label) != n.label) return false;
    if (p.name && n.symbol != *p.name) return false;
    return true;
}

void validate_schema(const QueryAst& ast) {
    for (const auto& n : ast.pattern.nodes)
        if (n.label && !parse_label(*n.label))
            throw UnknownSchemaName("unknown node label '" + *n.label + "'");
    for (const auto& e : ast.pattern.edges)
        if (!parse_relation_type(e.type))
            throw UnknownSchemaName("unknown relation type '" + e.type + "'");
}

bool row_less(const std::vector<Value>& a, const std::vector<Value>& b) {
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        const auto c = total_order(a[i], b[i]);
        if (c != 0) return c < 0;
    }
    return a.size() < b.size();
}

}  // namespace

std::vector<Binding> match(const QueryAst& ast, const KnowledgeGraph& graph) {
    validate_schema(ast);
    const Pattern& p = ast.pattern;
    const auto positions = first_positions(p);
    std::vector<std::size_t> first(p.nodes.size());
    for (std::size_t i = 0; i < p.nodes.size(); ++i) first[i] = positions.at(p.nodes[i].var);

    std::vector<NodeId> starts;
    if (p.nodes.front().label) {
        starts = graph.nodes_with_label(*parse_label(*p.nodes.front().label));
    } else {
        for (const auto& [id, n] : graph.nodes()) starts.push_back(id);
    }

    std::vector<Binding> out;
    Binding b;
    auto extend = [&](auto& self, std::size_t i) -> void {
        if (i == p.edges.size()) {
            out.push_back(b);
            return;
        }
        const EdgeStep& e = p.edges[i];
        const RelationType type = *parse_relation_type(e.type);
        const auto& adjacent =
            e.direction == Direction::Out ? graph.outgoing(b[i]) : graph.incoming(b[i]);
        for (std::size_t idx : adjacent) {
            const Triple& t = graph.triples()[idx];
            if (t.relation.type != type) continue;
            const NodeId next = e.direction == Direction::Out ? t.tail : t.head;
            if (!node_matches(p.nodes[i + 1], graph.node(next))) continue;
            if (first[i + 1] != i + 1 && b[first[i + 1]] != next) continue;
            b.push_back(next);
            self(self, i + 1);
            b.pop_back();
        }
    };
    for (NodeId s : starts) {
        if (!node_matches(p.nodes.front(), graph.node(s))) continue;
        b.assign(1, s);
        extend(extend, 0);
    }
    std::sort(out.begin(), out.end());
    return out;
}

QueryResult execute(const QueryAst& ast, const KnowledgeGraph& graph) {
    std::vector<Binding> bindings = match(ast, graph);
    Context ctx{ast, graph, first_positions(ast.pattern)};
    std::erase_if(bindings, [&](const Binding& b) {
        return !std::all_of(ast.where.begin(), ast.where.end(),
                            [&](const Condition& c) { return ctx.holds(c, b); });
    });

    QueryResult result;
    for (const auto& item : ast.returns) result.columns.push_back(item.column_name());

    // Column index the ORDER BY key refers to, when it names one.
    std::optional<std::size_t> order_column;
    if (ast.order) {
        for (std::size_t i = 0; i < ast.returns.size(); ++i) {
            const auto& r = ast.returns[i];
            if (ast.order->by_alias ? r.alias == ast.order->expr.ref.var
                                    : r.expr == ast.order->expr) {
                order_column = i;
                break;
            }
        }
    }

    std::vector<std::pair<Value, std::vector<Value>>> keyed;
    if (ast.is_aggregate()) {
        std::vector<Value> row;
        for (const auto& item : ast.returns) row.push_back(ctx.aggregate(item.expr, bindings));
        keyed.emplace_back(Null{}, std::move(row));
    } else {
        keyed.reserve(bindings.size());
        for (const auto& b : bindings) {
            std::vector<Value> row;
            for (const auto& item : ast.returns) row.push_back(ctx.evaluate(item.expr.ref, b));
            Value key = Null{};
            if (ast.order && !order_column) key = ctx.evaluate(ast.order->expr.ref, b);
            keyed.emplace_back(std::move(key), std::move(row));
        }
    }

    if (ast.order) {
        const bool desc = ast.order->descending;
        if (order_column)
            for (auto& [key, row] : keyed) key = row[*order_column];
        std::stable_sort(keyed.begin(), keyed.end(), [desc](const auto& a, const auto& b) {
            const auto c = total_order(a.first, b.first);
            if (c != 0) return desc ? c > 0 : c < 0;
            return row_less(a.second, b.second);
        });
    }
    std::size_t n = keyed.size();
    if (ast.limit) n = std::min<std::size_t>(n, static_cast<std::size_t>(*ast.limit));
    result.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) result.rows.push_back(std::move(keyed[i].second));
    return result;
}

std::string schema_text() {
    return R"(Graph schema: a directed property graph of FMEA data.

Node labels and their properties:
  (:ProcessStep)    name: text
  (:FailureMode)    name: text
  (:FailureEffect)  name: text; S: integer severity rating
  (:FailureCause)   name: text; O: integer occurrence rating; RPN: integer risk priority number (S * O * D of its row)
  (:FailureMeasure) name: text; D: integer detection rating

Relations (direction as written):
  (:FailureMode)-[:occursAtProcessStep]->(:ProcessStep)
  (:FailureMode)-[:resultsInFailureEffect]->(:FailureEffect)
  (:FailureMode)-[:isDueToFailureCause]->(:FailureCause)
  (:FailureCause)-[:isImprovedByFailureMeasure]->(:FailureMeasure)

Query language:
  MATCH pattern [WHERE cond AND cond ...] RETURN item, ... [ORDER BY key [ASC|DESC]] [LIMIT n]
  pattern: (var:Label {name: "text"}) followed by -[:relation]->(var) or <-[:relation]-(var) steps
  cond:    var.property op value, with op one of = <> < <= > >=
  item:    var | var.property | count|sum|avg|min|max([DISTINCT] var | var.property), optionally AS alias
  One linear pattern per query; conditions are conjunctive; aggregates and plain items are not mixed.
)";
}

std::string format_table(const QueryResult& result) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back(result.columns);
    for (const auto& row : result.rows) {
        std::vector<std::string> r;
        for (const auto& v : row) r.push_back(to_display(v));
        cells.push_back(std::move(r));
    }
    std::vector<std::size_t> width(result.columns.size(), 0);
    for (const auto& r : cells)
        for (std::size_t i = 0; i < r.size() && i < width.size(); ++i)
            width[i] = std::max(width[i], r[i].size());

    std::string out;
    auto emit = [&](const std::vector<std::string>& r) {
        std::string line;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) line += "  ";
            line += r[i];
            if (i + 1 < r.size()) line.append(width[i] - r[i].size(), ' ');
        }
        out += line + "\n";
    };
    emit(cells.front());
    std::string rule;
    for (std::size_t i = 0; i < width.size(); ++i) {
        if (i) rule += "  ";
        rule.append(width[i], '-');
    }
    out += rule + "\n";
    for (std::size_t i = 1; i < cells.size(); ++i) emit(cells[i]);
    return out;
}

}  // namespace kgrag::query
