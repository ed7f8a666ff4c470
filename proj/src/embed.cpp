#include "kgrag/embed.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <thread>

#include "kgrag/http_client.hpp"
#include "kgrag/text.hpp"

namespace kgrag {

std::string_view role_label(Label label) {
    switch (label) {
        case Label::ProcessStep: return "Process step";
        case Label::FailureMode: return "Failure mode";
        case Label::FailureEffect: return "Failure effect";
        case Label::FailureCause: return "Failure cause";
        case Label::FailureMeasure: return "Failure measure";
        case Label::VectorEmbedding: return "Vector embedding";
    }
    return "?";
}

namespace {

void append_rating(std::string& out, const Node& n, std::string_view name) {
    const Value v = n.literal(name);
    if (is_null(v)) return;
    out += ", ";
    out += name;
    out += ": ";
    out += to_display(v);
}

std::string segment(const Node& n) {
    std::string s(role_label(n.label));
    s += ": ";
    s += n.symbol;
    switch (n.label) {
        case Label::FailureEffect: append_rating(s, n, lit::kSeverity); break;
        case Label::FailureCause:
            append_rating(s, n, lit::kOccurrence);
            append_rating(s, n, lit::kRpn);
            break;
        case Label::FailureMeasure: append_rating(s, n, lit::kDetection); break;
        default: break;
    }
    return s;
}

}  // namespace

Chunk build_chunk(const KnowledgeGraph& graph, NodeId mode) {
    const auto order = subgraph_of(graph, mode);
    std::vector<NodeId> arranged;
    for (NodeId id : order)
        if (graph.node(id).label == Label::ProcessStep) arranged.push_back(id);
    for (NodeId id : order)
        if (graph.node(id).label != Label::ProcessStep) arranged.push_back(id);

    Chunk c{mode, {}};
    for (std::size_t i = 0; i < arranged.size(); ++i) {
        if (i) c.text += ", ";
        c.text += segment(graph.node(arranged[i]));
    }
    return c;
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t token_hash(std::string_view token, std::uint64_t seed) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ splitmix64(seed);
    for (unsigned char c : token) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(h);
}

}  // namespace

HashingEmbedder::HashingEmbedder(std::size_t dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
    if (dimension < kMinDimension)
        throw ConfigurationError("embedding dimension must be at least " +
                                 std::to_string(kMinDimension));
}

EmbeddingVector HashingEmbedder::do_embed(std::string_view text) {
    auto tokens = word_tokens(text);
    if (tokens.empty()) tokens.emplace_back(text);
    EmbeddingVector v(dimension_, 0.0);
    for (const auto& t : tokens) v[token_hash(t, seed_) % dimension_] += 1.0;
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
}

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderSettings settings)
    : settings_(std::move(settings)) {
    if (settings_.endpoint.empty())
        throw ConfigurationError("remote embedder needs an endpoint");
    http::parse_url(settings_.endpoint);
    token_ = http::credential_from_env(settings_.credential_env);
}

EmbeddingVector RemoteEmbedder::do_embed(std::string_view text) {
    const nlohmann::json body = {{"model", settings_.model}, {"input", std::string(text)}};
    const auto res = http::post_json(settings_.endpoint, body, token_, settings_.timeout);
    const nlohmann::json* arr = &res;
    if (res.is_object() && res.contains("data") && res["data"].is_array() && !res["data"].empty() &&
        res["data"][0].contains("embedding"))
        arr = &res["data"][0]["embedding"];
    else if (res.is_object() && res.contains("embedding"))
        arr = &res["embedding"];
    if (!arr->is_array()) throw RemoteError("embedding response is not a numeric array");
    EmbeddingVector v;
    v.reserve(arr->size());
    for (const auto& x : *arr) {
        if (!x.is_number()) throw RemoteError("embedding response holds a non-number");
        v.push_back(x.get<double>());
    }
    if (v.size() != settings_.dimension) throw DimensionMismatch(settings_.dimension, v.size());
    return v;
}

// ---------------------------------------------------------------------------

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
    double dot = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (aa == 0.0 || bb == 0.0) throw UndefinedSimilarity("cosine of a zero vector is undefined");
    return std::clamp(dot / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

std::vector<ScoredEntry> top_k(std::span<const double> query, std::span<const IndexEntry> entries,
                               std::size_t k) {
    if (k == 0) throw PreconditionError("k must be at least 1");
    std::vector<ScoredEntry> scored;
    scored.reserve(entries.size());
    for (const auto& e : entries) scored.push_back({e.id, e.text, cosine(query, e.vector)});
    auto better = [](const ScoredEntry& x, const ScoredEntry& y) {
        return x.score != y.score ? x.score > y.score : x.id < y.id;
    };
    const std::size_t n = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                      better);
    scored.resize(n);
    return scored;
}

std::vector<SearchHit> top_k(std::span<const double> query, const KnowledgeGraph& graph,
                             std::size_t k) {
    if (graph.embeddings().empty()) throw NoEmbeddings();
    if (k == 0) throw PreconditionError("k must be at least 1");

    struct Scored {
        NodeId mode;
        NodeId emb;
        double score;
    };
    std::vector<Scored> scored;
    scored.reserve(graph.embeddings().size());
    for (const auto& [mode, emb] : graph.embeddings()) {
        const Node& n = graph.node(emb);
        const auto& vec = std::get<std::vector<double>>(n.literals.at(std::string(lit::kEmbedding)));
        scored.push_back({mode, emb, cosine(query, vec)});
    }
    const std::size_t n = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                      [](const Scored& x, const Scored& y) {
                          return x.score != y.score ? x.score > y.score : x.mode < y.mode;
                      });
    std::vector<SearchHit> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Node& e = graph.node(scored[i].emb);
        out.push_back({scored[i].mode, std::get<std::string>(e.literals.at(std::string(lit::kChunk))),
                       scored[i].score});
    }
    return out;
}

// ---------------------------------------------------------------------------

std::size_t embed_all(KnowledgeGraph& graph, Embedder& embedder, std::size_t parallelism) {
    const auto modes = graph.nodes_with_label(Label::FailureMode);
    if (modes.empty()) return 0;

    std::vector<Chunk> chunks;
    chunks.reserve(modes.size());
    for (NodeId m : modes) chunks.push_back(build_chunk(graph, m));

    std::vector<std::optional<EmbeddingVector>> vectors(modes.size());
    std::vector<std::exception_ptr> errors(modes.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    auto worker = [&] {
        for (;;) {
            if (stop.load()) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= chunks.size()) return;
            try {
                vectors[i] = embedder.embed(chunks[i].text);
            } catch (...) {
                errors[i] = std::current_exception();
                stop.store(true);
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(parallelism, 1, modes.size());
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    std::vector<NodeId> completed;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (!vectors[i]) {
            std::string msg = "embedding stopped at failure mode '" +
                              graph.node(modes[i]).symbol + "'";
            bool remote = false;
            for (std::size_t j = i; j < errors.size(); ++j) {
                if (!errors[j]) continue;
                try {
                    std::rethrow_exception(errors[j]);
                } catch (const RemoteError& e) {
                    remote = true;
                    msg += ": " + std::string(e.what());
                } catch (const std::exception& e) {
                    msg += ": " + std::string(e.what());
                }
                break;
            }
            throw EmbedAllError(msg, std::move(completed), remote);
        }
        graph.attach_embedding(modes[i], std::move(chunks[i].text), std::move(*vectors[i]));
        completed.push_back(modes[i]);
    }
    return modes.size();
}

}  // namespace kgrag
