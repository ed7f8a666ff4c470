#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "kgrag/fmea.hpp"
#include "kgrag/value.hpp"

namespace kgrag {

enum class Label {
    FailureMode,
    FailureEffect,
    FailureCause,
    FailureMeasure,
    ProcessStep,
    VectorEmbedding,
};

enum class RelationType {
    isDueToFailureCause,
    isImprovedByFailureMeasure,
    resultsInFailureEffect,
    occursAtProcessStep,
    hasVectorEmbedding,
};

/// The five FMEA content labels, in the order reports list them.
inline constexpr std::array<Label, 5> kContentLabels = {
    Label::FailureMode, Label::FailureEffect, Label::FailureCause, Label::FailureMeasure,
    Label::ProcessStep};

inline constexpr std::array<RelationType, 5> kRelationTypes = {
    RelationType::isDueToFailureCause, RelationType::isImprovedByFailureMeasure,
    RelationType::resultsInFailureEffect, RelationType::occursAtProcessStep,
    RelationType::hasVectorEmbedding};

std::string_view to_string(Label label);
std::string_view to_string(RelationType type);
std::optional<Label> parse_label(std::string_view s);
std::optional<RelationType> parse_relation_type(std::string_view s);

struct EndpointRule {
    Label head;
    Label tail;
};
/// Allowed (head label, tail label) of each relation type.
EndpointRule endpoint_rule(RelationType type);

/// Literal names carried by the schema.
namespace lit {
inline constexpr std::string_view kSeverity = "S";
inline constexpr std::string_view kOccurrence = "O";
inline constexpr std::string_view kDetection = "D";
inline constexpr std::string_view kRpn = "RPN";
inline constexpr std::string_view kEmbedding = "embedding";
inline constexpr std::string_view kChunk = "chunk";
}  // namespace lit

struct NodeId {
    std::uint64_t value = 0;
    friend auto operator<=>(NodeId, NodeId) = default;
};

struct Node {
    NodeId id;
    Label label = Label::FailureMode;
    std::string symbol;
    Literals literals;

    /// Literal by name; Null when absent.
    Value literal(std::string_view name) const;
    friend bool operator==(const Node&, const Node&) = default;
};

struct Relation {
    RelationType type = RelationType::isDueToFailureCause;
    Literals literals;
    friend bool operator==(const Relation&, const Relation&) = default;
};

struct Triple {
    NodeId head;
    Relation relation;
    NodeId tail;

    /// (head, type, tail), the identity used for duplicate rejection.
    auto key() const { return std::make_tuple(head, relation.type, tail); }
    friend bool operator==(const Triple&, const Triple&) = default;
};

struct LabelStats {
    Label label = Label::FailureMode;
    std::size_t node_count = 0;
    std::size_t min_relationships = 0;
    std::size_t max_relationships = 0;
    double avg_relationships = 0.0;
};

struct GraphStats {
    std::vector<LabelStats> rows;  // one per content label, kContentLabels order
    std::size_t total_nodes = 0;
    std::size_t total_relationships = 0;
    std::size_t unique_path_count = 0;
};

/// Directed labeled multigraph with literals over the closed FMEA schema.
///
/// Content nodes are deduplicated on (label, canonical symbol). Every inserted
/// triple is checked against the endpoint rules; duplicate (head, type, tail)
/// triples are rejected. Const member functions never mutate, so a graph may be
/// read from many threads at once as long as no thread writes.
class KnowledgeGraph {
public:
    /// A dimension of 0 means the first attached embedding fixes it.
    explicit KnowledgeGraph(std::size_t embedding_dimension = 0)
        : embedding_dimension_(embedding_dimension) {}

    /// Returns the existing content node with this label and canonical
    /// symbol, or creates it.
    NodeId intern(Label label, std::string_view symbol);

    /// Creates a node. Throws SchemaError for a duplicate content node key.
    NodeId add_node(Label label, std::string_view symbol, Literals literals = {});

    /// Inserts a node with a caller-chosen id (used by load).
    void restore_node(Node node);

    /// Sets a literal. Throws ConflictError if a different value already exists
    /// under this name; setting the same value again is a no-op.
    void set_literal_checked(NodeId id, std::string_view name, Value value);
    void set_literal(NodeId id, std::string_view name, Value value);

    void add_triple(NodeId head, RelationType type, NodeId tail, Literals literals = {});
    bool has_triple(NodeId head, RelationType type, NodeId tail) const;

    /// Creates a VectorEmbedding node for `mode` holding the chunk and vector,
    /// replacing any previous one. Throws DimensionMismatch, NotFoundError, or
    /// SchemaError when `mode` is not a FailureMode.
    NodeId attach_embedding(NodeId mode, std::string chunk, std::vector<double> vector);
    std::optional<NodeId> embedding_of(NodeId mode) const;
    /// FailureMode -> VectorEmbedding node, ascending by mode.
    const std::map<NodeId, NodeId>& embeddings() const { return embedding_of_; }

    bool contains(NodeId id) const { return nodes_.count(id) != 0; }
    /// Throws NotFoundError.
    const Node& node(NodeId id) const;
    std::optional<NodeId> find(Label label, std::string_view symbol) const;

    const std::map<NodeId, Node>& nodes() const { return nodes_; }
    const std::vector<Triple>& triples() const { return triples_; }
    /// Ids of nodes with this label, ascending.
    std::vector<NodeId> nodes_with_label(Label label) const;

    /// Indices into triples() of triples leaving / entering a node.
    const std::vector<std::size_t>& outgoing(NodeId id) const;
    const std::vector<std::size_t>& incoming(NodeId id) const;

    std::size_t embedding_dimension() const { return embedding_dimension_; }

    /// Nodes and triples excluding VectorEmbedding nodes and hasVectorEmbedding
    /// triples.
    std::size_t content_node_count() const;
    std::size_t content_triple_count() const;

    friend bool operator==(const KnowledgeGraph& a, const KnowledgeGraph& b) {
        return a.embedding_dimension_ == b.embedding_dimension_ && a.nodes_ == b.nodes_ &&
               a.triples_ == b.triples_;
    }

private:
    Node& mutable_node(NodeId id);
    void index_node(const Node& node);

    std::size_t embedding_dimension_;
    std::uint64_t next_id_ = 1;
    std::map<NodeId, Node> nodes_;
    std::vector<Triple> triples_;
    std::set<std::tuple<NodeId, RelationType, NodeId>> triple_keys_;
    std::map<NodeId, std::vector<std::size_t>> out_;
    std::map<NodeId, std::vector<std::size_t>> in_;
    std::map<Label, std::set<NodeId>> by_label_;
    std::map<std::pair<Label, std::string>, NodeId> by_key_;
    std::map<NodeId, NodeId> embedding_of_;
};

/// Builds the graph for a table: one node per distinct (label, text), the four
/// content relations per row, S on effects, O and RPN on causes, D on
/// measures. Repeated rows collapse. Throws ConflictError when a shared node
/// would receive two values for one literal.
KnowledgeGraph transpose(const fmea::FmeaTable& table);

/// Depth-first preorder of a FailureMode's subgraph. Children are visited by
/// relation type (occursAtProcessStep, resultsInFailureEffect,
/// isDueToFailureCause), then by ascending symbol; causes continue into their
/// measures. Each node appears once.
std::vector<NodeId> subgraph_of(const KnowledgeGraph& graph, NodeId mode);

/// Content triples reachable from `mode` along the subgraph traversal.
std::vector<Triple> reachable_triples(const KnowledgeGraph& graph, NodeId mode);

using TripleKey = std::tuple<NodeId, RelationType, NodeId>;
using TripleSet = std::set<TripleKey>;

/// One reachable triple-set per FailureMode, duplicates removed, in order of
/// first appearance by ascending mode id.
std::vector<TripleSet> unique_paths(const KnowledgeGraph& graph);

/// Degree statistics per content label over content triples (in + out).
GraphStats stats(const KnowledgeGraph& graph);

}  // namespace kgrag
