#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgrag/error.hpp"
#include "kgrag/graph.hpp"

namespace kgrag {

using EmbeddingVector = std::vector<double>;

inline constexpr std::size_t kDefaultDimension = 256;
inline constexpr std::size_t kMinDimension = 8;

struct Chunk {
    NodeId mode;
    std::string text;
};

/// Serializes a FailureMode subgraph as `Role: symbol` segments joined by
/// ", ", ratings inline after their node (`S:` after the effect, `O:` and
/// `RPN:` after the cause, `D:` after the measure). The process steps lead,
/// then the mode, then the rest in subgraph order.
Chunk build_chunk(const KnowledgeGraph& graph, NodeId mode);

std::string_view role_label(Label label);

/// Text-to-vector encoder. Implementations must be safe to call from several
/// threads at once.
class Embedder {
public:
    virtual ~Embedder() = default;

    EmbeddingVector embed(std::string_view text) {
        if (text.empty()) throw PreconditionError("cannot embed empty text");
        calls_.fetch_add(1, std::memory_order_relaxed);
        return do_embed(text);
    }

    virtual std::size_t dimension() const = 0;
    virtual std::string_view kind() const = 0;
    /// Number of embed() calls so far.
    std::uint64_t calls() const { return calls_.load(std::memory_order_relaxed); }

private:
    virtual EmbeddingVector do_embed(std::string_view text) = 0;
    std::atomic<std::uint64_t> calls_{0};
};

/// Seeded feature hashing: lowercase word tokens, each token hashed into one
/// of `dimension` buckets and counted, then L2-normalized. Text without word
/// tokens hashes as a single token.
class HashingEmbedder final : public Embedder {
public:
    static constexpr std::uint64_t kDefaultSeed = 0x6b67726167ULL;

    explicit HashingEmbedder(std::size_t dimension = kDefaultDimension,
                             std::uint64_t seed = kDefaultSeed);
    std::size_t dimension() const override { return dimension_; }
    std::string_view kind() const override { return "deterministic-local"; }

private:
    EmbeddingVector do_embed(std::string_view text) override;
    std::size_t dimension_;
    std::uint64_t seed_;
};

struct RemoteEmbedderSettings {
    std::string endpoint;
    std::string model;
    std::string credential_env;
    std::chrono::milliseconds timeout{30000};
    std::size_t dimension = 1536;
};

/// POSTs {"model", "input"} and accepts either a bare numeric array or an
/// OpenAI-style {"data": [{"embedding": [...]}]} body.
class RemoteEmbedder final : public Embedder {
public:
    explicit RemoteEmbedder(RemoteEmbedderSettings settings);
    std::size_t dimension() const override { return settings_.dimension; }
    std::string_view kind() const override { return "remote"; }

private:
    EmbeddingVector do_embed(std::string_view text) override;
    RemoteEmbedderSettings settings_;
    std::string token_;
};

/// (a.b) / (|a| |b|), clamped to [-1, 1]. Throws DimensionMismatch or
/// UndefinedSimilarity for a zero vector.
double cosine(std::span<const double> a, std::span<const double> b);

struct IndexEntry {
    std::uint64_t id = 0;
    std::string text;
    EmbeddingVector vector;
};

struct ScoredEntry {
    std::uint64_t id = 0;
    std::string text;
    double score = 0.0;
    friend bool operator==(const ScoredEntry&, const ScoredEntry&) = default;
};

/// Exact exhaustive search: the k highest-cosine entries, descending score,
/// ties by ascending id. Returns everything when fewer than k entries exist.
std::vector<ScoredEntry> top_k(std::span<const double> query, std::span<const IndexEntry> entries,
                               std::size_t k);

struct SearchHit {
    NodeId mode;
    std::string chunk;
    double score = 0.0;
    friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

/// top_k over the graph's VectorEmbedding nodes. Throws NoEmbeddings.
std::vector<SearchHit> top_k(std::span<const double> query, const KnowledgeGraph& graph,
                             std::size_t k);

/// Raised by embed_all when the embedder fails part-way.
class EmbedAllError : public Error {
public:
    EmbedAllError(const std::string& what, std::vector<NodeId> completed, bool remote)
        : Error(what), completed_(std::move(completed)), remote_(remote) {}
    /// Modes whose embeddings were attached before the failure.
    const std::vector<NodeId>& completed() const { return completed_; }
    bool remote_failure() const { return remote_; }

private:
    std::vector<NodeId> completed_;
    bool remote_;
};

/// Builds, embeds and attaches a chunk for every FailureMode, ascending by id.
/// Up to `parallelism` embed calls run at once. Re-running replaces the
/// previous embeddings. Returns the number of modes processed.
std::size_t embed_all(KnowledgeGraph& graph, Embedder& embedder, std::size_t parallelism = 4);

}  // namespace kgrag
