#include "kgrag/fmea.hpp"

#include <algorithm>
#include <charconv>

#include "kgrag/csv.hpp"
#include "kgrag/error.hpp"
#include "kgrag/text.hpp"

namespace kgrag::fmea {

Rating::Rating(int value, int max_rating) : value_(value) {
    if (value < 1 || value > max_rating)
        throw ValidationError(0, "rating " + std::to_string(value) + " outside [1, " +
                                     std::to_string(max_rating) + "]");
}

std::int64_t compute_rpn(Rating s, Rating o, Rating d) {
    return static_cast<std::int64_t>(s.value()) * o.value() * d.value();
}

namespace {

constexpr std::size_t kColumns = 9;

const std::vector<std::string>& header_columns() {
    static const std::vector<std::string> cols = {
        "process_step", "failure_mode",    "failure_effect", "severity", "failure_cause",
        "occurrence",   "failure_measure", "detection",      "rpn"};
    return cols;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string required_text(const std::string& cell, std::size_t row, const char* name) {
    std::string t = canonical_text(cell);
    if (t.empty()) throw ValidationError(row, std::string(name) + " is empty");
    return t;
}

Rating required_rating(const std::string& cell, std::size_t row, const char* name, int max) {
    const std::string t = trim(cell);
    const auto v = parse_int(t);
    if (!v) throw ValidationError(row, std::string(name) + " '" + t + "' is not an integer");
    if (*v < 1 || *v > max)
        throw ValidationError(row, std::string(name) + " " + t + " outside [1, " +
                                       std::to_string(max) + "]");
    return Rating(static_cast<int>(*v), max);
}

}  // namespace

FmeaTable parse_fmea_table(std::string_view csv_text, const ParseOptions& options) {
    const auto rows = csv::read(csv_text);
    if (rows.empty()) throw CsvError(1, "missing header row");

    std::vector<std::string> header;
    for (const auto& h : rows.front().fields) header.push_back(trim(h));
    if (header != header_columns())
        throw CsvError(rows.front().line, "header must be exactly: " + std::string(kHeader));

    FmeaTable table;
    table.records.reserve(rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& f = rows[i].fields;
        const std::size_t row = rows[i].line;
        if (f.size() != kColumns)
            throw CsvError(row, "expected 9 fields, found " + std::to_string(f.size()));

        FailureRecord r;
        r.process_step = required_text(f[0], row, "process_step");
        r.failure_mode = required_text(f[1], row, "failure_mode");
        r.failure_effect = required_text(f[2], row, "failure_effect");
        r.severity = required_rating(f[3], row, "severity", options.max_rating);
        r.failure_cause = required_text(f[4], row, "failure_cause");
        r.occurrence = required_rating(f[5], row, "occurrence", options.max_rating);
        r.failure_measure = required_text(f[6], row, "failure_measure");
        r.detection = required_rating(f[7], row, "detection", options.max_rating);

        const std::int64_t expected = compute_rpn(r.severity, r.occurrence, r.detection);
        const std::string rpn_cell = trim(f[8]);
        if (rpn_cell.empty()) {
            r.rpn = expected;
        } else {
            const auto given = parse_int(rpn_cell);
            if (!given) throw ValidationError(row, "rpn '" + rpn_cell + "' is not an integer");
            if (*given != expected) throw ConsistencyError(row, expected, *given);
            r.rpn = *given;
        }
        table.records.push_back(std::move(r));
    }
    return table;
}

std::string write_fmea_table(const FmeaTable& table) {
    std::string out = std::string(kHeader) + "\n";
    for (const auto& r : table.records) {
        out += csv::write_row({r.process_step, r.failure_mode, r.failure_effect,
                               std::to_string(r.severity.value()), r.failure_cause,
                               std::to_string(r.occurrence.value()), r.failure_measure,
                               std::to_string(r.detection.value()), std::to_string(r.rpn)});
    }
    return out;
}

AbbreviationMap parse_abbreviation_map(std::string_view csv_text) {
    const auto rows = csv::read(csv_text);
    if (rows.empty()) return {};
    if (rows.front().fields.size() != 2 || trim(rows.front().fields[0]) != "short" ||
        trim(rows.front().fields[1]) != "long")
        throw CsvError(rows.front().line, "abbreviation header must be exactly: short,long");

    AbbreviationMap map;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& f = rows[i].fields;
        if (f.size() != 2) throw CsvError(rows[i].line, "expected 2 fields");
        std::string key = canonical_text(f[0]);
        std::string value = canonical_text(f[1]);
        if (key.empty()) throw ValidationError(rows[i].line, "empty short form");
        map[std::move(key)] = std::move(value);
    }
    return map;
}

std::string expand_abbreviations(std::string_view text, const AbbreviationMap& map) {
    if (map.empty()) return std::string(text);

    std::vector<const std::pair<const std::string, std::string>*> keys;
    for (const auto& kv : map) keys.push_back(&kv);
    std::stable_sort(keys.begin(), keys.end(),
                     [](auto* a, auto* b) { return a->first.size() > b->first.size(); });

    auto boundary_before = [&](std::size_t pos) {
        return pos == 0 || !is_word_byte(static_cast<unsigned char>(text[pos - 1]));
    };
    auto boundary_after = [&](std::size_t pos) {
        return pos >= text.size() || !is_word_byte(static_cast<unsigned char>(text[pos]));
    };

    std::string out;
    std::size_t i = 0;
    while (i < text.size()) {
        bool replaced = false;
        if (boundary_before(i)) {
            for (const auto* kv : keys) {
                const std::string& key = kv->first;
                if (text.compare(i, key.size(), key) == 0 && boundary_after(i + key.size())) {
                    out += kv->second;
                    i += key.size();
                    replaced = true;
                    break;
                }
            }
        }
        if (!replaced) out.push_back(text[i++]);
    }
    return out;
}

FmeaTable expand_abbreviations(const FmeaTable& table) {
    if (!table.abbreviations || table.abbreviations->empty()) return table;
    const auto& map = *table.abbreviations;
    FmeaTable out = table;
    for (auto& r : out.records) {
        for (std::string* field : {&r.process_step, &r.failure_mode, &r.failure_effect,
                                   &r.failure_cause, &r.failure_measure})
            *field = canonical_text(expand_abbreviations(*field, map));
    }
    return out;
}

}  // namespace kgrag::fmea
