#include "mwv/csv.hpp"

#include "mwv/error.hpp"

namespace mwv {

DelimitedReader::DelimitedReader(std::istream& in, char delimiter, bool quoting)
    : in_(in), delim_(delimiter), quoting_(quoting) {}

std::optional<std::vector<std::string>> DelimitedReader::next() {
    for (;;) {
        std::vector<std::string> fields;
        std::string field;
        bool in_quotes = false;
        bool any = false;
        bool quoted_field = false;
        record_line_ = line_;
        int ch = 0;
        while ((ch = in_.get()) != std::char_traits<char>::eof()) {
            any = true;
            const char c = static_cast<char>(ch);
            if (in_quotes) {
                if (c == '"') {
                    if (in_.peek() == '"') {
                        in_.get();
                        field += '"';
                    } else {
                        in_quotes = false;
                    }
                } else {
                    if (c == '\n') ++line_;
                    field += c;
                }
                continue;
            }
            if (quoting_ && c == '"' && field.empty() && !quoted_field) {
                in_quotes = true;
                quoted_field = true;
            } else if (c == delim_) {
                fields.push_back(std::move(field));
                field.clear();
                quoted_field = false;
            } else if (c == '\n') {
                ++line_;
                break;
            } else if (c == '\r') {
                if (in_.peek() == '\n') continue;
                ++line_;
                break;
            } else {
                field += c;
            }
        }
        if (!any) return std::nullopt;
        if (in_quotes) throw Error(ErrorCode::ParseError, "unterminated quote in record at line " + std::to_string(record_line_));
        fields.push_back(std::move(field));
        if (first_) {
            first_ = false;
            if (fields[0].rfind("\xEF\xBB\xBF", 0) == 0) fields[0].erase(0, 3);
        }
        if (fields.size() == 1 && fields[0].empty()) {
            if (ch == std::char_traits<char>::eof()) return std::nullopt;
            continue;
        }
        return fields;
    }
}

std::string escape_field(std::string_view field, char delimiter) {
    if (field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string join_record(const std::vector<std::string>& fields, char delimiter) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += delimiter;
        out += escape_field(fields[i], delimiter);
    }
    return out;
}

}  // namespace mwv
