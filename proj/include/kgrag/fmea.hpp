#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kgrag::fmea {

inline constexpr int kDefaultMaxRating = 10;

/// Criticality score of one FMEA dimension; higher is more critical.
class Rating {
public:
    /// Throws ValidationError (row 0) when outside [1, max_rating].
    explicit Rating(int value, int max_rating = kDefaultMaxRating);
    int value() const noexcept { return value_; }
    friend bool operator==(Rating, Rating) = default;

private:
    int value_;
};

struct FailureRecord {
    std::string process_step;
    std::string failure_mode;
    std::string failure_effect;
    std::string failure_cause;
    std::string failure_measure;
    Rating severity{1};
    Rating occurrence{1};
    Rating detection{1};
    std::int64_t rpn = 1;

    friend bool operator==(const FailureRecord&, const FailureRecord&) = default;
};

using AbbreviationMap = std::map<std::string, std::string>;

struct FmeaTable {
    std::vector<FailureRecord> records;
    std::optional<AbbreviationMap> abbreviations;

    friend bool operator==(const FmeaTable&, const FmeaTable&) = default;
};

struct ParseOptions {
    int max_rating = kDefaultMaxRating;
};

/// The exact header row the ingest format requires.
inline constexpr std::string_view kHeader =
    "process_step,failure_mode,failure_effect,severity,failure_cause,occurrence,"
    "failure_measure,detection,rpn";

std::int64_t compute_rpn(Rating s, Rating o, Rating d);

/// Parses FMEA CSV. Text cells are canonicalized (trimmed, whitespace runs
/// collapsed). An empty rpn cell is computed; a present one must equal S*O*D.
/// Throws CsvError, ValidationError or ConsistencyError naming the row.
FmeaTable parse_fmea_table(std::string_view csv_text, const ParseOptions& options = {});

/// Inverse of parse_fmea_table for the nine columns; rpn is always written.
std::string write_fmea_table(const FmeaTable& table);

/// Two-column `short,long` CSV with that header.
AbbreviationMap parse_abbreviation_map(std::string_view csv_text);

/// Whole-word, case-sensitive replacement, longest short form first.
std::string expand_abbreviations(std::string_view text, const AbbreviationMap& map);
FmeaTable expand_abbreviations(const FmeaTable& table);

}  // namespace kgrag::fmea
