#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kgrag::csv {

/// One parsed record. `line` is the 1-based physical line it started on.
struct Record {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

/// RFC 4180 reader: comma delimiter, double-quote quoting with "" escapes,
/// quoted fields may span lines, CRLF or LF terminators. A UTF-8 BOM is
/// skipped. Blank lines are dropped. Throws CsvError on an unterminated quote
/// or text after a closing quote.
std::vector<Record> read(std::string_view text);

/// Quotes a field when it contains a comma, quote, CR or LF, or has
/// surrounding whitespace.
std::string quote(std::string_view field);

std::string write_row(const std::vector<std::string>& fields);

}  // namespace kgrag::csv
