#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace kgrag {

struct Null {
    friend bool operator==(Null, Null) { return true; }
};

/// Literal property value. Null never appears as a stored literal; it is the
/// result of reading a literal that does not exist.
using Value = std::variant<Null, std::int64_t, double, std::string, std::vector<double>>;

using Literals = std::map<std::string, Value>;

inline bool is_null(const Value& v) { return std::holds_alternative<Null>(v); }
inline bool is_numeric(const Value& v) {
    return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v);
}
double as_double(const Value& v);

/// Total order used by ORDER BY and min/max: null < numbers < text < vectors.
/// Integers and reals compare by numeric value; an integer sorts before an
/// equal real.
std::strong_ordering total_order(const Value& a, const Value& b);

/// WHERE only compares numbers with numbers and text with text; anything else,
/// null included, makes every comparator false.
bool comparable(const Value& a, const Value& b);

/// Shortest text that round-trips; integers print as integers, text verbatim.
std::string to_display(const Value& v);

std::string format_double(double d);

}  // namespace kgrag
