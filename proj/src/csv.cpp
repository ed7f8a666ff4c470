#include "kgrag/csv.hpp"

#include "kgrag/error.hpp"

namespace kgrag::csv {

std::vector<Record> read(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

    std::vector<Record> out;
    Record rec;
    std::string field;
    std::size_t line = 1;
    std::size_t i = 0;
    bool in_quotes = false;
    bool after_quote = false;  // closing quote seen, only delimiter/terminator may follow
    bool field_started = false;
    rec.line = 1;

    auto end_field = [&] {
        rec.fields.push_back(std::move(field));
        field.clear();
        after_quote = false;
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        const bool blank = rec.fields.size() == 1 && rec.fields[0].empty();
        if (!blank) out.push_back(std::move(rec));
        rec = Record{};
        rec.line = line;
    };

    while (i < text.size()) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    i += 2;
                    continue;
                }
                in_quotes = false;
                after_quote = true;
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            ++i;
            continue;
        }
        if (c == ',') {
            end_field();
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            ++line;
            end_record();
        } else if (after_quote) {
            throw CsvError(rec.line, "unexpected character after closing quote");
        } else if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else {
            field.push_back(c);
            field_started = true;
        }
        ++i;
    }
    if (in_quotes) throw CsvError(rec.line, "unterminated quoted field");
    if (!field.empty() || !rec.fields.empty() || after_quote) end_record();
    return out;
}

std::string quote(std::string_view field) {
    const bool needs = field.find_first_of(",\"\r\n") != std::string_view::npos ||
                       (!field.empty() && (field.front() == ' ' || field.back() == ' ' ||
                                           field.front() == '\t' || field.back() == '\t'));
    if (!needs) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    return out + "\"";
}

std::string write_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += quote(fields[i]);
    }
    out.push_back('\n');
    return out;
}

}  // namespace kgrag::csv
