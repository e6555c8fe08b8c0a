#pragma once

// Minimal RFC 4180 reader/writer: comma separated, double-quoted fields with
// "" escapes, embedded newlines inside quotes, CRLF or LF line ends.

#include <istream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "srgm/error.hpp"

namespace srgm::csv {

struct Row {
    long line = 0;  // 1-based line the row starts on
    std::vector<std::string> fields;
};

inline std::vector<Row> read(std::istream& in, const std::string& source = {}) {
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (text.starts_with("\xEF\xBB\xBF")) text.erase(0, 3);

    std::vector<Row> rows;
    Row row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    long line = 1;
    row.line = line;

    auto end_field = [&] {
        row.fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        const bool blank = row.fields.size() == 1 && row.fields[0].empty();
        if (!blank) rows.push_back(std::move(row));
        row = Row{};
        row.line = line;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field_started && !field.empty())
                    throw DataError("stray quote inside unquoted field",
                                    source + ":" + std::to_string(line));
                quoted = true;
                field_started = true;
                break;
            case ',': end_field(); break;
            case '\r': break;
            case '\n':
                ++line;
                end_row();
                break;
            default:
                field.push_back(c);
                field_started = true;
        }
    }
    if (quoted) throw DataError("unterminated quoted field", source + ":" + std::to_string(row.line));
    if (field_started || !field.empty() || !row.fields.empty()) end_row();
    return rows;
}

/// Quotes a field when it contains a comma, quote, or line break.
inline std::string escape(std::string_view v) {
    if (v.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(v);
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline std::string join(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += escape(fields[i]);
    }
    return out;
}

}  // namespace srgm::csv
