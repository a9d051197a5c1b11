#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mwv {

// Delimited-text reader: RFC 4180 quoting (quoted fields may hold the delimiter, doubled quotes
// and newlines), CRLF tolerant, UTF-8 BOM stripped from the first record.
class DelimitedReader {
public:
    // With quoting off (plain TSV) a '"' is ordinary data.
    DelimitedReader(std::istream& in, char delimiter, bool quoting = true);

    // Next record, or nullopt at end of input. Blank lines are skipped.
    std::optional<std::vector<std::string>> next();
    // 1-based line number where the last returned record started.
    std::size_t line() const noexcept { return record_line_; }

private:
    std::istream& in_;
    char delim_;
    bool quoting_;
    std::size_t line_ = 1;
    std::size_t record_line_ = 0;
    bool first_ = true;
};

// Quotes the field when it contains the delimiter, a quote or a line break.
std::string escape_field(std::string_view field, char delimiter);
std::string join_record(const std::vector<std::string>& fields, char delimiter);

}  // namespace mwv
