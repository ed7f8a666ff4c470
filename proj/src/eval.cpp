#include "kgrag/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <memory>
#include <random>
#include <set>

#include "kgrag/error.hpp"
#include "kgrag/prompts.hpp"
#include "kgrag/text.hpp"

namespace kgrag::eval {

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c != '.' && c != '!' && c != '?') continue;
        const bool at_end = i + 1 == text.size();
        if (!at_end && !std::isspace(static_cast<unsigned char>(text[i + 1]))) continue;
        std::string s = trim(text.substr(start, i + 1 - start));
        if (!s.empty()) out.push_back(std::move(s));
        start = i + 1;
    }
    if (start < text.size()) {
        std::string s = trim(text.substr(start));
        if (!s.empty()) out.push_back(std::move(s));
    }
    return out;
}

namespace {

const std::set<std::string>& stop_words() {
    static const std::set<std::string> words = {
        "a",    "an",   "the",   "is",    "are",  "was",   "were", "be",   "been", "being",
        "of",   "in",   "on",    "at",    "to",   "for",   "by",   "with", "and",  "or",
        "that", "this", "these", "those", "there", "it",   "its",  "as",   "from", "has",
        "have", "had",  "which", "what",  "how",  "can",   "do",   "does", "did",  "into",
        "than", "then", "so",    "such",  "their", "they", "we",   "our",  "you",  "your"};
    return words;
}

bool yes(std::string_view reply) { return to_lower_ascii(trim(reply)).starts_with("yes"); }

}  // namespace

std::vector<std::string> content_words(std::string_view text) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (auto& t : word_tokens(text))
        if (!stop_words().count(t) && seen.insert(t).second) out.push_back(std::move(t));
    return out;
}

bool DeterministicJudge::attributable(std::string_view sentence,
                                      std::span<const std::string> contexts) {
    if (contexts.empty()) return false;
    auto words = content_words(sentence);
    if (words.empty()) {
        std::set<std::string> all;
        for (auto& t : word_tokens(sentence)) all.insert(std::move(t));
        words.assign(all.begin(), all.end());
    }
    if (words.empty()) return false;

    std::set<std::string> available;
    for (const auto& c : contexts)
        for (auto& t : word_tokens(c)) available.insert(std::move(t));
    const auto found = std::count_if(words.begin(), words.end(),
                                     [&](const std::string& w) { return available.count(w) != 0; });
    return static_cast<double>(found) >= kAttributionThreshold * static_cast<double>(words.size());
}

bool DeterministicJudge::relevant(std::string_view context, const ValidationItem& item) {
    if (!item.relevance_key || item.relevance_key->empty())
        throw ConfigurationError("deterministic judge needs a relevance_key for question '" +
                                 item.question + "'");
    return std::any_of(item.relevance_key->begin(), item.relevance_key->end(),
                       [&](const std::string& k) { return contains_case_insensitive(context, k); });
}

bool LlmJudge::attributable(std::string_view sentence, std::span<const std::string> contexts) {
    if (contexts.empty()) return false;
    LlmRequest req;
    req.purpose = Purpose::Judge;
    req.prompt = prompts::attribution_prompt(sentence, contexts).compose();
    req.subject = std::string(sentence);
    req.contexts.assign(contexts.begin(), contexts.end());
    return yes(llm_.complete(req));
}

bool LlmJudge::relevant(std::string_view context, const ValidationItem& item) {
    LlmRequest req;
    req.purpose = Purpose::Judge;
    req.prompt = prompts::relevance_prompt(context, item.question, item.ground_truth).compose();
    req.subject = std::string(context);
    return yes(llm_.complete(req));
}

JudgeVerdict judge(const ValidationItem& item, std::span<const std::string> contexts, Judge& j) {
    JudgeVerdict v;
    for (const auto& s : split_sentences(item.ground_truth))
        v.attributable.push_back(j.attributable(s, contexts));
    for (const auto& c : contexts) v.relevant.push_back(j.relevant(c, item));
    return v;
}

double context_recall(std::string_view ground_truth, std::span<const std::string> contexts,
                      Judge& judge) {
    const auto sentences = split_sentences(ground_truth);
    if (sentences.empty())
        throw PreconditionError("ground truth has no sentences");
    if (contexts.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& s : sentences)
        if (judge.attributable(s, contexts)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(sentences.size());
}

double context_precision(std::span<const bool> relevance) {
    std::size_t relevant_so_far = 0;
    double sum = 0.0;
    for (std::size_t m = 0; m < relevance.size(); ++m) {
        if (!relevance[m]) continue;
        ++relevant_so_far;
        sum += static_cast<double>(relevant_so_far) / static_cast<double>(m + 1);
    }
    return relevant_so_far == 0 ? 0.0 : sum / static_cast<double>(relevant_so_far);
}

double context_precision(std::span<const std::string> contexts, const ValidationItem& item,
                         Judge& judge) {
    auto flags = std::make_unique<bool[]>(contexts.size());
    for (std::size_t i = 0; i < contexts.size(); ++i) flags[i] = judge.relevant(contexts[i], item);
    return context_precision(std::span<const bool>(flags.get(), contexts.size()));
}

// ---------------------------------------------------------------------------

std::string flatten_table(const fmea::FmeaTable& table) {
    std::string out;
    for (const auto& r : table.records) {
        const std::string cells[] = {r.process_step,
                                     r.failure_mode,
                                     r.failure_effect,
                                     std::to_string(r.severity.value()),
                                     r.failure_cause,
                                     std::to_string(r.occurrence.value()),
                                     r.failure_measure,
                                     std::to_string(r.detection.value()),
                                     std::to_string(r.rpn)};
        for (std::size_t i = 0; i < std::size(cells); ++i) {
            if (i) out.push_back('\t');
            out += cells[i];
        }
        out.push_back('\n');
    }
    return out;
}

std::vector<std::string> random_chunks(std::string_view text, std::size_t chunk_len,
                                       std::uint64_t seed) {
    if (chunk_len < 20) throw PreconditionError("chunk_len must be at least 20 characters");
    const auto jitter = static_cast<std::int64_t>(chunk_len / 4);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> dist(-jitter, jitter);

    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto len = static_cast<std::size_t>(static_cast<std::int64_t>(chunk_len) + dist(rng));
        std::size_t end = std::min(text.size(), pos + len);
        while (end < text.size() && (static_cast<unsigned char>(text[end]) & 0xC0) == 0x80) ++end;
        out.emplace_back(text.substr(pos, end - pos));
        pos = end;
    }
    return out;
}

std::vector<IndexEntry> build_baseline_index(const fmea::FmeaTable& table, std::size_t chunk_len,
                                             std::uint64_t seed, Embedder& embedder) {
    const auto pieces = random_chunks(flatten_table(table), chunk_len, seed);
    std::vector<IndexEntry> out;
    out.reserve(pieces.size());
    for (std::size_t i = 0; i < pieces.size(); ++i)
        out.push_back({i, pieces[i], embedder.embed(pieces[i])});
    return out;
}

// ---------------------------------------------------------------------------

EvalReport run_eval(const std::vector<ValidationItem>& dataset, const KnowledgeGraph& graph,
                    const fmea::FmeaTable& table, const EvalConfig& config, Judge& judge,
                    LlmClient& llm, Embedder& embedder) {
    if (dataset.empty()) throw PreconditionError("validation dataset is empty");

    EvalReport report;
    report.config = config;
    report.judge_kind = std::string(judge.kind());
    report.embedder_kind = std::string(embedder.kind());
    report.llm_kind = std::string(llm.kind());

    std::vector<IndexEntry> baseline;
    std::optional<std::string> baseline_error;
    try {
        baseline = build_baseline_index(table, config.baseline_chunk_len, config.seed, embedder);
    } catch (const Error& e) {
        baseline_error = e.what();
    }

    const std::string_view names[] = {kBaselinePipeline, kVectorPipeline, kFullPipeline};
    std::vector<PipelineSummary> sums;
    for (auto n : names) sums.push_back({std::string(n), 0.0, 0.0});

    for (const auto& item : dataset) {
        for (std::size_t p = 0; p < std::size(names); ++p) {
            ItemResult r;
            r.question = item.question;
            r.pipeline = std::string(names[p]);
            try {
                const Inquiry inquiry{item.question, config.k};
                if (p == 0) {
                    if (baseline_error) throw Error("baseline index unavailable: " + *baseline_error);
                    if (baseline.empty()) throw Error("baseline index is empty");
                    const auto qv = embedder.embed(item.question);
                    for (auto& hit : top_k(qv, baseline, config.k)) r.contexts.push_back(hit.text);
                    r.provenance = Provenance::VectorSearch;
                } else {
                    RetrievalOptions opts;
                    opts.query_generation = p == 2;
                    opts.row_cap = config.row_cap;
                    const auto outcome = retrieve(inquiry, graph, llm, embedder, opts);
                    r.contexts = outcome.context_texts();
                    r.provenance = outcome.provenance;
                    for (const auto& d : outcome.diagnostics)
                        r.diagnostics.push_back(std::string(to_string(d.kind)) +
                                                (d.detail.empty() ? "" : ": " + d.detail));
                }
                r.context_recall = context_recall(item.ground_truth, r.contexts, judge);
                r.context_precision = context_precision(r.contexts, item, judge);
            } catch (const ConfigurationError&) {
                throw;
            } catch (const std::exception& e) {
                r.context_recall = 0.0;
                r.context_precision = 0.0;
                r.diagnostics.push_back(std::string("pipeline-failure: ") + e.what());
            }
            sums[p].context_recall += r.context_recall;
            sums[p].context_precision += r.context_precision;
            report.items.push_back(std::move(r));
        }
    }
    const auto n = static_cast<double>(dataset.size());
    for (auto& s : sums) {
        s.context_recall /= n;
        s.context_precision /= n;
    }
    report.pipelines = std::move(sums);
    return report;
}

std::string format_report(const EvalReport& report) {
    std::size_t w = std::string_view("pipeline").size();
    for (const auto& p : report.pipelines) w = std::max(w, p.pipeline.size());
    auto pad = [w](std::string s) {
        s.resize(w, ' ');
        return s;
    };
    std::string out = pad("pipeline") + "  CR      CP\n";
    out += std::string(w, '-') + "  ------  ------\n";
    char buf[64];
    for (const auto& p : report.pipelines) {
        std::snprintf(buf, sizeof buf, "  %.4f  %.4f\n", p.context_recall, p.context_precision);
        out += pad(p.pipeline) + buf;
    }
    return out;
}

}  // namespace kgrag::eval
