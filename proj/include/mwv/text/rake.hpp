#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mwv/text/stopwords.hpp"

namespace mwv::text {

struct RankedPhrase {
    std::string text;
    double score = 0.0;
};

/// Rapid Automatic Keyword Extraction.
///
/// The normalized text is cut into candidate phrases at stopwords and at tokens without a letter
/// or digit (so '?' is a delimiter). Each word scores degree(w) / freq(w), where degree sums the
/// lengths of every candidate occurrence containing w. A phrase scores the sum of its word scores.
/// Phrases are unique, sorted by descending score, ties kept in order of first occurrence.
std::vector<RankedPhrase> extract_ranked_phrases(std::string_view text, const StopwordList& sw);

}  // namespace mwv::text
