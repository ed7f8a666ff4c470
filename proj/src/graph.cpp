#include "kgrag/graph.hpp"

#include <algorithm>

#include "kgrag/error.hpp"
#include "kgrag/text.hpp"

namespace kgrag {

std::string_view to_string(Label label) {
    switch (label) {
        case Label::FailureMode: return "FailureMode";
        case Label::FailureEffect: return "FailureEffect";
        case Label::FailureCause: return "FailureCause";
        case Label::FailureMeasure: return "FailureMeasure";
        case Label::ProcessStep: return "ProcessStep";
        case Label::VectorEmbedding: return "VectorEmbedding";
    }
    return "?";
}

std::string_view to_string(RelationType type) {
    switch (type) {
        case RelationType::isDueToFailureCause: return "isDueToFailureCause";
        case RelationType::isImprovedByFailureMeasure: return "isImprovedByFailureMeasure";
        case RelationType::resultsInFailureEffect: return "resultsInFailureEffect";
        case RelationType::occursAtProcessStep: return "occursAtProcessStep";
        case RelationType::hasVectorEmbedding: return "hasVectorEmbedding";
    }
    return "?";
}

std::optional<Label> parse_label(std::string_view s) {
    for (Label l : {Label::FailureMode, Label::FailureEffect, Label::FailureCause,
                    Label::FailureMeasure, Label::ProcessStep, Label::VectorEmbedding})
        if (to_string(l) == s) return l;
    return std::nullopt;
}

std::optional<RelationType> parse_relation_type(std::string_view s) {
    for (RelationType t : kRelationTypes)
        if (to_string(t) == s) return t;
    return std::nullopt;
}

EndpointRule endpoint_rule(RelationType type) {
    switch (type) {
        case RelationType::isDueToFailureCause: return {Label::FailureMode, Label::FailureCause};
        case RelationType::isImprovedByFailureMeasure:
            return {Label::FailureCause, Label::FailureMeasure};
        case RelationType::resultsInFailureEffect:
            return {Label::FailureMode, Label::FailureEffect};
        case RelationType::occursAtProcessStep: return {Label::FailureMode, Label::ProcessStep};
        case RelationType::hasVectorEmbedding:
            return {Label::FailureMode, Label::VectorEmbedding};
    }
    return {Label::FailureMode, Label::FailureMode};
}

Value Node::literal(std::string_view name) const {
    auto it = literals.find(std::string(name));
    return it == literals.end() ? Value{Null{}} : it->second;
}

// ---------------------------------------------------------------------------
// KnowledgeGraph

NodeId KnowledgeGraph::intern(Label label, std::string_view symbol) {
    if (label != Label::VectorEmbedding) {
        if (auto id = find(label, symbol)) return *id;
    }
    return add_node(label, symbol);
}

NodeId KnowledgeGraph::add_node(Label label, std::string_view symbol, Literals literals) {
    Node node{NodeId{next_id_}, label, std::string(symbol), std::move(literals)};
    if (label != Label::VectorEmbedding) node.symbol = canonical_text(symbol);
    restore_node(std::move(node));
    return NodeId{next_id_ - 1};
}

void KnowledgeGraph::restore_node(Node node) {
    if (node.id.value == 0) throw SchemaError("node id 0 is reserved");
    if (nodes_.count(node.id))
        throw SchemaError("duplicate node id " + std::to_string(node.id.value));
    if (node.label != Label::VectorEmbedding &&
        by_key_.count({node.label, canonical_text(node.symbol)}))
        throw SchemaError("duplicate " + std::string(to_string(node.label)) + " node '" +
                          node.symbol + "'");
    next_id_ = std::max(next_id_, node.id.value + 1);
    index_node(node);
    const NodeId id = node.id;
    nodes_.emplace(id, std::move(node));
}

void KnowledgeGraph::index_node(const Node& node) {
    by_label_[node.label].insert(node.id);
    if (node.label != Label::VectorEmbedding)
        by_key_.emplace(std::make_pair(node.label, canonical_text(node.symbol)), node.id);
}

Node& KnowledgeGraph::mutable_node(NodeId id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw NotFoundError("node " + std::to_string(id.value) + " not found");
    return it->second;
}

const Node& KnowledgeGraph::node(NodeId id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw NotFoundError("node " + std::to_string(id.value) + " not found");
    return it->second;
}

std::optional<NodeId> KnowledgeGraph::find(Label label, std::string_view symbol) const {
    auto it = by_key_.find({label, canonical_text(symbol)});
    if (it == by_key_.end()) return std::nullopt;
    return it->second;
}

void KnowledgeGraph::set_literal_checked(NodeId id, std::string_view name, Value value) {
    Node& n = mutable_node(id);
    auto [it, inserted] = n.literals.try_emplace(std::string(name), value);
    if (!inserted && !(it->second == value))
        throw ConflictError(std::string(to_string(n.label)) + " '" + n.symbol + "' literal " +
                            std::string(name) + ": " + to_display(it->second) + " vs " +
                            to_display(value));
}

void KnowledgeGraph::set_literal(NodeId id, std::string_view name, Value value) {
    mutable_node(id).literals[std::string(name)] = std::move(value);
}

void KnowledgeGraph::add_triple(NodeId head, RelationType type, NodeId tail, Literals literals) {
    const Node& h = node(head);
    const Node& t = node(tail);
    const EndpointRule rule = endpoint_rule(type);
    if (h.label != rule.head || t.label != rule.tail)
        throw SchemaError(std::string(to_string(type)) + " must connect " +
                          std::string(to_string(rule.head)) + " to " +
                          std::string(to_string(rule.tail)) + ", got " +
                          std::string(to_string(h.label)) + " to " +
                          std::string(to_string(t.label)));
    if (!triple_keys_.emplace(head, type, tail).second)
        throw SchemaError("duplicate triple (" + h.symbol + ", " + std::string(to_string(type)) +
                          ", " + t.symbol + ")");
    const std::size_t idx = triples_.size();
    triples_.push_back(Triple{head, Relation{type, std::move(literals)}, tail});
    out_[head].push_back(idx);
    in_[tail].push_back(idx);
    if (type == RelationType::hasVectorEmbedding) embedding_of_[head] = tail;
}

bool KnowledgeGraph::has_triple(NodeId head, RelationType type, NodeId tail) const {
    return triple_keys_.count({head, type, tail}) != 0;
}

NodeId KnowledgeGraph::attach_embedding(NodeId mode, std::string chunk,
                                        std::vector<double> vector) {
    const Node& m = node(mode);
    if (m.label != Label::FailureMode)
        throw SchemaError("embeddings attach to FailureMode nodes, not " +
                          std::string(to_string(m.label)));
    if (embedding_dimension_ == 0) embedding_dimension_ = vector.size();
    if (vector.size() != embedding_dimension_)
        throw DimensionMismatch(embedding_dimension_, vector.size());

    Literals lits;
    lits.emplace(std::string(lit::kChunk), chunk);
    lits.emplace(std::string(lit::kEmbedding), std::move(vector));
    const NodeId fresh = add_node(Label::VectorEmbedding, m.symbol, std::move(lits));

    auto prior = embedding_of_.find(mode);
    if (prior == embedding_of_.end()) {
        add_triple(mode, RelationType::hasVectorEmbedding, fresh);
        return fresh;
    }

    // Repoint the existing hasVectorEmbedding triple and drop the old node.
    const NodeId old = prior->second;
    const std::size_t idx = in_.at(old).front();
    triples_[idx].tail = fresh;
    triple_keys_.erase({mode, RelationType::hasVectorEmbedding, old});
    triple_keys_.emplace(mode, RelationType::hasVectorEmbedding, fresh);
    in_.erase(old);
    in_[fresh].push_back(idx);
    by_label_[Label::VectorEmbedding].erase(old);
    nodes_.erase(old);
    prior->second = fresh;
    return fresh;
}

std::optional<NodeId> KnowledgeGraph::embedding_of(NodeId mode) const {
    auto it = embedding_of_.find(mode);
    if (it == embedding_of_.end()) return std::nullopt;
    return it->second;
}

std::vector<NodeId> KnowledgeGraph::nodes_with_label(Label label) const {
    auto it = by_label_.find(label);
    if (it == by_label_.end()) return {};
    return {it->second.begin(), it->second.end()};
}

const std::vector<std::size_t>& KnowledgeGraph::outgoing(NodeId id) const {
    static const std::vector<std::size_t> empty;
    auto it = out_.find(id);
    return it == out_.end() ? empty : it->second;
}

const std::vector<std::size_t>& KnowledgeGraph::incoming(NodeId id) const {
    static const std::vector<std::size_t> empty;
    auto it = in_.find(id);
    return it == in_.end() ? empty : it->second;
}

std::size_t KnowledgeGraph::content_node_count() const {
    auto it = by_label_.find(Label::VectorEmbedding);
    return nodes_.size() - (it == by_label_.end() ? 0 : it->second.size());
}

std::size_t KnowledgeGraph::content_triple_count() const {
    return triples_.size() - embedding_of_.size();
}

// ---------------------------------------------------------------------------
// Operations

KnowledgeGraph transpose(const fmea::FmeaTable& table) {
    KnowledgeGraph g;
    auto link = [&g](NodeId h, RelationType t, NodeId tail) {
        if (!g.has_triple(h, t, tail)) g.add_triple(h, t, tail);
    };
    for (const auto& r : table.records) {
        const NodeId step = g.intern(Label::ProcessStep, r.process_step);
        const NodeId mode = g.intern(Label::FailureMode, r.failure_mode);
        const NodeId effect = g.intern(Label::FailureEffect, r.failure_effect);
        const NodeId cause = g.intern(Label::FailureCause, r.failure_cause);
        const NodeId measure = g.intern(Label::FailureMeasure, r.failure_measure);

        g.set_literal_checked(effect, lit::kSeverity, std::int64_t{r.severity.value()});
        g.set_literal_checked(cause, lit::kOccurrence, std::int64_t{r.occurrence.value()});
        g.set_literal_checked(cause, lit::kRpn, r.rpn);
        g.set_literal_checked(measure, lit::kDetection, std::int64_t{r.detection.value()});

        link(mode, RelationType::occursAtProcessStep, step);
        link(mode, RelationType::resultsInFailureEffect, effect);
        link(mode, RelationType::isDueToFailureCause, cause);
        link(cause, RelationType::isImprovedByFailureMeasure, measure);
    }
    return g;
}

namespace {

/// Tails of `from` along `type`, ascending by symbol then id.
std::vector<NodeId> children(const KnowledgeGraph& g, NodeId from, RelationType type) {
    std::vector<NodeId> out;
    for (std::size_t idx : g.outgoing(from)) {
        const Triple& t = g.triples()[idx];
        if (t.relation.type == type) out.push_back(t.tail);
    }
    std::sort(out.begin(), out.end(), [&g](NodeId a, NodeId b) {
        const auto& sa = g.node(a).symbol;
        const auto& sb = g.node(b).symbol;
        return sa != sb ? sa < sb : a < b;
    });
    return out;
}

const Node& require_mode(const KnowledgeGraph& g, NodeId mode) {
    const Node& n = g.node(mode);
    if (n.label != Label::FailureMode)
        throw SchemaError("node " + std::to_string(mode.value) + " is a " +
                          std::string(to_string(n.label)) + ", not a FailureMode");
    return n;
}

constexpr std::array<RelationType, 3> kModeOrder = {RelationType::occursAtProcessStep,
                                                    RelationType::resultsInFailureEffect,
                                                    RelationType::isDueToFailureCause};

}  // namespace

std::vector<NodeId> subgraph_of(const KnowledgeGraph& graph, NodeId mode) {
    require_mode(graph, mode);
    std::vector<NodeId> order{mode};
    std::set<NodeId> seen{mode};
    auto visit = [&](NodeId n) {
        if (!seen.insert(n).second) return false;
        order.push_back(n);
        return true;
    };
    for (RelationType type : kModeOrder) {
        for (NodeId child : children(graph, mode, type)) {
            if (!visit(child)) continue;
            if (type == RelationType::isDueToFailureCause)
                for (NodeId m : children(graph, child, RelationType::isImprovedByFailureMeasure))
                    visit(m);
        }
    }
    return order;
}

std::vector<Triple> reachable_triples(const KnowledgeGraph& graph, NodeId mode) {
    require_mode(graph, mode);
    std::vector<Triple> out;
    for (std::size_t idx : graph.outgoing(mode)) {
        const Triple& t = graph.triples()[idx];
        if (t.relation.type == RelationType::hasVectorEmbedding) continue;
        out.push_back(t);
        if (t.relation.type == RelationType::isDueToFailureCause)
            for (std::size_t j : graph.outgoing(t.tail)) out.push_back(graph.triples()[j]);
    }
    return out;
}

std::vector<TripleSet> unique_paths(const KnowledgeGraph& graph) {
    std::vector<TripleSet> out;
    std::set<TripleSet> seen;
    for (NodeId mode : graph.nodes_with_label(Label::FailureMode)) {
        TripleSet s;
        for (const Triple& t : reachable_triples(graph, mode)) s.insert(t.key());
        if (seen.insert(s).second) out.push_back(std::move(s));
    }
    return out;
}

GraphStats stats(const KnowledgeGraph& graph) {
    GraphStats st;
    std::map<NodeId, std::size_t> degree;
    for (const Triple& t : graph.triples()) {
        if (t.relation.type == RelationType::hasVectorEmbedding) continue;
        ++degree[t.head];
        ++degree[t.tail];
    }
    for (Label label : kContentLabels) {
        LabelStats row;
        row.label = label;
        const auto ids = graph.nodes_with_label(label);
        row.node_count = ids.size();
        std::size_t sum = 0;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const auto it = degree.find(ids[i]);
            const std::size_t d = it == degree.end() ? 0 : it->second;
            sum += d;
            row.min_relationships = i == 0 ? d : std::min(row.min_relationships, d);
            row.max_relationships = std::max(row.max_relationships, d);
        }
        if (!ids.empty()) row.avg_relationships = static_cast<double>(sum) / ids.size();
        st.rows.push_back(row);
    }
    st.total_nodes = graph.content_node_count();
    st.total_relationships = graph.content_triple_count();
    st.unique_path_count = unique_paths(graph).size();
    return st;
}

}  // namespace kgrag
