#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_set>

#include "mwv/text/token.hpp"

namespace mwv::text {

class StopwordList {
public:
    StopwordList() = default;
    explicit StopwordList(std::initializer_list<std::string_view> words);

    // One lowercase word per line; blank lines and lines starting with '#' are ignored.
    static StopwordList load(std::istream& in);
    static StopwordList load_file(const std::filesystem::path& path);

    void add(std::string_view word);
    bool contains(std::string_view word) const { return words_.count(std::string(word)) > 0; }
    bool contains(const Token& t) const { return words_.count(t.str()) > 0; }
    std::size_t size() const noexcept { return words_.size(); }

private:
    std::unordered_set<std::string> words_;
};

TokenList remove_stopwords(const TokenList& tokens, const StopwordList& sw);

}  // namespace mwv::text
