#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mwv/text/pos.hpp"
#include "mwv/text/stopwords.hpp"

namespace mwv {

enum class Label { Real = 0, Misleading = 1 };

std::string_view to_string(Label l) noexcept;       // "real" / "fake"
std::string_view short_name(Label l) noexcept;      // "R" / "M"
std::optional<Label> parse_label(std::string_view s) noexcept;  // real|fake|r|m|misleading, any case

struct Claim {
    std::string id;
    std::string text;
    std::optional<Label> gold;
};

struct BuildStrategy {
    enum class Kind { StopwordRemoval = 1, Ngrams = 2, ProperNouns = 3 };

    Kind kind = Kind::StopwordRemoval;
    std::size_t n = 1;  // Ngrams only

    static BuildStrategy stopword_removal() { return {Kind::StopwordRemoval, 1}; }
    static BuildStrategy ngrams(std::size_t n);
    static BuildStrategy proper_nouns() { return {Kind::ProperNouns, 1}; }

    // "1", "2:<n>", "3"
    static BuildStrategy parse(std::string_view spec);
    std::string to_string() const;

    friend bool operator==(const BuildStrategy&, const BuildStrategy&) = default;
};

inline constexpr std::string_view kQuerySuffix = "fake news";

struct BuiltQuery {
    std::string claim_id;
    BuildStrategy strategy;
    std::string text;     // "<content> fake news"
    std::string content;  // text without the suffix
    // Case 3 only: no proper noun was found and the Case 1 query was emitted instead.
    bool fallback = false;
};

/// Turns a raw claim into search queries. Case 1 emits the stopword-free claim, Case 2(n) one
/// query per n-gram of the stopword-free tokens, Case 3 one query per run of adjacent proper
/// nouns. Every query ends with " fake news". EmptyQuery when nothing survives preprocessing.
std::vector<BuiltQuery> build_queries(const Claim& claim, const BuildStrategy& strategy,
                                      const text::StopwordList& sw, const text::PosTagger& tagger);

}  // namespace mwv
