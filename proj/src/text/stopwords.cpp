#include "mwv/text/stopwords.hpp"

#include <fstream>

#include "mwv/error.hpp"
#include "mwv/text/normalize.hpp"

namespace mwv::text {

StopwordList::StopwordList(std::initializer_list<std::string_view> words) {
    for (auto w : words) add(w);
}

void StopwordList::add(std::string_view word) {
    // Stored in normalized form so lookups against normalized tokens agree.
    const std::string norm = normalize_text(word);
    if (norm.empty() || norm.find(' ') != std::string::npos) {
        throw Error(ErrorCode::ParseError, "invalid stopword '" + std::string(word) + "'");
    }
    words_.insert(norm);
}

StopwordList StopwordList::load(std::istream& in) {
    StopwordList list;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto last = line.find_last_not_of(" \t");
        list.add(std::string_view(line).substr(first, last - first + 1));
    }
    return list;
}

StopwordList StopwordList::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open stopword file " + path.string());
    return load(in);
}

TokenList remove_stopwords(const TokenList& tokens, const StopwordList& sw) {
    TokenList out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        if (!sw.contains(t)) out.push_back(t);
    }
    return out;
}

}  // namespace mwv::text
