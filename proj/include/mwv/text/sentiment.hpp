#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "mwv/text/token.hpp"

namespace mwv::text {

enum class Polarity { Negative = -1, Neutral = 0, Positive = 1 };

std::string_view to_string(Polarity p) noexcept;
inline int encode(Polarity p) noexcept { return static_cast<int>(p); }

class SentimentLexicon {
public:
    SentimentLexicon();

    // "word<TAB>score" per line with score in [-1, 1]; '#' comments allowed.
    static SentimentLexicon load(std::istream& in);
    static SentimentLexicon load_file(const std::filesystem::path& path);

    void set_score(std::string_view word, double score);
    std::optional<double> score(std::string_view word) const;

    void set_negators(std::unordered_set<std::string> negators) { negators_ = std::move(negators); }
    bool is_negator(std::string_view word) const { return negators_.count(std::string(word)) > 0; }

    std::size_t size() const noexcept { return scores_.size(); }

    // Copy with every score sign-flipped.
    SentimentLexicon inverted() const;

private:
    std::unordered_map<std::string, double> scores_;
    std::unordered_set<std::string> negators_;
};

struct PolarityThresholds {
    double positive = 0.05;
    double negative = -0.05;
};

/// Mean lexicon score over matched tokens. A negator flips the sign of the next matched token
/// after it; negators never score themselves and a '?' cancels a pending negation.
double sentiment_score(const TokenList& tokens, const SentimentLexicon& lex);

Polarity sentence_polarity(const TokenList& tokens, const SentimentLexicon& lex,
                           PolarityThresholds thresholds = {});

}  // namespace mwv::text
