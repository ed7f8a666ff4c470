#include "kgrag/value.hpp"

#include <charconv>
#include <cmath>

namespace kgrag {

double as_double(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&v)) return *d;
    return std::nan("");
}

namespace {

int rank(const Value& v) {
    switch (v.index()) {
        case 0: return 0;
        case 1:
        case 2: return 1;
        case 3: return 2;
        default: return 3;
    }
}

std::strong_ordering compare_doubles(double a, double b) {
    // NaN sorts after every other number so the order stays total.
    const bool na = std::isnan(a), nb = std::isnan(b);
    if (na || nb) return na == nb ? std::strong_ordering::equal
                                  : (na ? std::strong_ordering::greater : std::strong_ordering::less);
    if (a < b) return std::strong_ordering::less;
    if (a > b) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::strong_ordering compare_numbers(const Value& a, const Value& b) {
    const auto* ia = std::get_if<std::int64_t>(&a);
    const auto* ib = std::get_if<std::int64_t>(&b);
    if (ia && ib) return *ia <=> *ib;
    if (auto c = compare_doubles(as_double(a), as_double(b)); c != 0) return c;
    // equal value, int before real
    return (ia ? 0 : 1) <=> (ib ? 0 : 1);
}

}  // namespace

std::strong_ordering total_order(const Value& a, const Value& b) {
    const int ra = rank(a), rb = rank(b);
    if (ra != rb) return ra <=> rb;
    switch (ra) {
        case 0: return std::strong_ordering::equal;
        case 1: return compare_numbers(a, b);
        case 2: {
            const int c = std::get<std::string>(a).compare(std::get<std::string>(b));
            return c <=> 0;
        }
        default: {
            const auto& va = std::get<std::vector<double>>(a);
            const auto& vb = std::get<std::vector<double>>(b);
            const std::size_t n = std::min(va.size(), vb.size());
            for (std::size_t i = 0; i < n; ++i)
                if (auto c = compare_doubles(va[i], vb[i]); c != 0) return c;
            return va.size() <=> vb.size();
        }
    }
}

bool comparable(const Value& a, const Value& b) {
    if (is_numeric(a) && is_numeric(b)) return true;
    return std::holds_alternative<std::string>(a) && std::holds_alternative<std::string>(b);
}

std::string format_double(double d) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
    std::string out(buf, end);
    if (std::isfinite(d) && out.find_first_of(".eE") == std::string::npos) out += ".0";
    return out;
}

std::string to_display(const Value& v) {
    switch (v.index()) {
        case 0: return "null";
        case 1: return std::to_string(std::get<std::int64_t>(v));
        case 2: return format_double(std::get<double>(v));
        case 3: return std::get<std::string>(v);
        default: {
            std::string out = "[";
            const auto& vec = std::get<std::vector<double>>(v);
            for (std::size_t i = 0; i < vec.size(); ++i) {
                if (i) out += ", ";
                out += format_double(vec[i]);
            }
            return out + "]";
        }
    }
}

}  // namespace kgrag
