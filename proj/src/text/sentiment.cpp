#include "mwv/text/sentiment.hpp"

#include <cmath>
#include <fstream>

#include "mwv/error.hpp"
#include "mwv/util.hpp"

namespace mwv::text {

std::string_view to_string(Polarity p) noexcept {
    switch (p) {
        case Polarity::Negative: return "negative";
        case Polarity::Neutral: return "neutral";
        case Polarity::Positive: return "positive";
    }
    return "neutral";
}

SentimentLexicon::SentimentLexicon() : negators_{"not", "no", "never", "n't", "cannot"} {}

void SentimentLexicon::set_score(std::string_view word, double score) {
    if (!std::isfinite(score) || score < -1.0 || score > 1.0) {
        throw Error(ErrorCode::ParseError, "sentiment score out of [-1, 1] for '" + std::string(word) + "'");
    }
    scores_[std::string(word)] = score;
}

std::optional<double> SentimentLexicon::score(std::string_view word) const {
    auto it = scores_.find(std::string(word));
    if (it == scores_.end()) return std::nullopt;
    return it->second;
}

SentimentLexicon SentimentLexicon::inverted() const {
    SentimentLexicon out = *this;
    for (auto& [w, s] : out.scores_) s = -s;
    return out;
}

SentimentLexicon SentimentLexicon::load(std::istream& in) {
    SentimentLexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw Error(ErrorCode::ParseError, "sentiment lexicon line " + std::to_string(lineno) + ": missing tab");
        }
        const auto value = parse_double(std::string_view(line).substr(tab + 1));
        if (!value) {
            throw Error(ErrorCode::ParseError, "sentiment lexicon line " + std::to_string(lineno) + ": bad score");
        }
        lex.set_score(line.substr(0, tab), *value);
    }
    return lex;
}

SentimentLexicon SentimentLexicon::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open sentiment lexicon " + path.string());
    return load(in);
}

double sentiment_score(const TokenList& tokens, const SentimentLexicon& lex) {
    double sum = 0.0;
    std::size_t hits = 0;
    bool negate = false;
    for (const auto& t : tokens) {
        if (t.str() == "?") {
            negate = false;
            continue;
        }
        if (lex.is_negator(t.view())) {
            negate = true;
            continue;
        }
        if (auto s = lex.score(t.view())) {
            sum += negate ? -*s : *s;
            negate = false;
            ++hits;
        }
    }
    return hits == 0 ? 0.0 : sum / static_cast<double>(hits);
}

Polarity sentence_polarity(const TokenList& tokens, const SentimentLexicon& lex, PolarityThresholds thresholds) {
    const double s = sentiment_score(tokens, lex);
    if (s > thresholds.positive) return Polarity::Positive;
    if (s < thresholds.negative) return Polarity::Negative;
    return Polarity::Neutral;
}

}  // namespace mwv::text
