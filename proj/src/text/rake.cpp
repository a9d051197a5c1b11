#include "mwv/text/rake.hpp"

#include <algorithm>
#include <unordered_map>

#include "mwv/text/normalize.hpp"

namespace mwv::text {

namespace {

bool is_word(const Token& t) {
    return std::any_of(t.view().begin(), t.view().end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || (static_cast<unsigned char>(c) >= 0x80);
    });
}

}  // namespace

std::vector<RankedPhrase> extract_ranked_phrases(std::string_view text, const StopwordList& sw) {
    const TokenList tokens = tokenize(normalize_text(text));

    std::vector<TokenList> candidates;
    TokenList current;
    for (const auto& t : tokens) {
        if (sw.contains(t) || !is_word(t)) {
            if (!current.empty()) candidates.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(t);
        }
    }
    if (!current.empty()) candidates.push_back(std::move(current));

    std::unordered_map<std::string, double> freq;
    std::unordered_map<std::string, double> degree;
    for (const auto& phrase : candidates) {
        for (const auto& w : phrase) {
            freq[w.str()] += 1.0;
            degree[w.str()] += static_cast<double>(phrase.size());
        }
    }

    std::vector<RankedPhrase> ranked;
    std::unordered_map<std::string, bool> seen;
    for (const auto& phrase : candidates) {
        std::string joined = join(phrase);
        if (seen[joined]) continue;
        seen[joined] = true;
        double score = 0.0;
        for (const auto& w : phrase) score += degree[w.str()] / freq[w.str()];
        ranked.push_back({std::move(joined), score});
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const RankedPhrase& a, const RankedPhrase& b) { return a.score > b.score; });
    return ranked;
}

}  // namespace mwv::text
