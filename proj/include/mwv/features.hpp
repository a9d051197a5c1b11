#pragma once

#include <array>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mwv/evidence/types.hpp"
#include "mwv/querybuild.hpp"
#include "mwv/text/lexdb.hpp"
#include "mwv/text/pos.hpp"
#include "mwv/text/sentiment.hpp"
#include "mwv/text/stopwords.hpp"

namespace mwv::features {

enum class MatchMode {
    Substring,     // any corpus phrase occurring anywhere, so "did" also hits "candidate"
    WordBoundary,  // single-word phrases must match whole words; multi-word phrases stay substring
};

/// Debunk-indicative phrases. The bundled default is the published keyword list, lowercased,
/// first occurrence kept when lowercasing makes two entries equal.
class FakePhraseCorpus {
public:
    explicit FakePhraseCorpus(std::vector<std::string> phrases);

    static FakePhraseCorpus bundled();
    // One phrase per line; blank lines skipped.
    static FakePhraseCorpus load(std::istream& in);
    static FakePhraseCorpus load_file(const std::filesystem::path& path);

    const std::vector<std::string>& phrases() const noexcept { return phrases_; }
    bool matches(std::string_view text, MatchMode mode = MatchMode::Substring) const;
    FakePhraseCorpus without(std::string_view phrase) const;

private:
    std::vector<std::string> phrases_;
};

/// Binary bag-of-words cosine over stopword-free token sets:
/// |X ∩ Y| / sqrt(|X| |Y|), 0 when either set is empty.
double cosine_similarity(const text::TokenList& a, const text::TokenList& b, const text::StopwordList& sw);

/// Symmetrized best-match path similarity. For each content word of one sentence that has a
/// synset, take the best path similarity to any same-category synset of the other sentence's words
/// (0 when none), average over those words, then average both directions.
double semantic_similarity(std::span<const text::TaggedToken> a, std::span<const text::TaggedToken> b,
                           const text::LexicalDatabase& db);

// Read-only resources shared by feature extraction.
struct FeatureContext {
    const text::StopwordList& stopwords;
    const text::SentimentLexicon& lexicon;
    const text::PosTagger& tagger;
    const text::LexicalDatabase& lexdb;
    const FakePhraseCorpus& corpus;
    MatchMode match_mode = MatchMode::Substring;
    text::PolarityThresholds thresholds{};
    bool stem = false;  // Porter-stem tokens before the cosine comparison
};

struct TitleFeatures {
    int fake_flag = 0;
    int qm_flag = 0;
    double cosine = 0.0;
    double semantic = 0.0;
    text::Polarity polarity = text::Polarity::Neutral;
};

/// Per-title signals against the query content (the built query without its "fake news" suffix).
/// fake_flag scans the title's ranked keyword phrases, joined by spaces, followed by any '?'
/// the title carries.
TitleFeatures title_features(const BuiltQuery& query, const evidence::EvidenceTitle& title, const FeatureContext& ctx);

enum class Scope { Google, YouTube, Hybrid };

std::string_view to_string(Scope s) noexcept;
std::optional<Scope> parse_scope(std::string_view s) noexcept;
Scope scope_of(evidence::Platform p) noexcept;

struct ClaimFeatures {
    static constexpr std::size_t kDim = 10;
    static constexpr std::array<std::string_view, kDim> kNames{
        "fake_count", "qm_count", "cos_mean", "sem_mean", "query_polarity",
        "senti_match_count", "n_pos", "n_neg", "n_neu", "n_retained"};

    std::string claim_id;
    Scope scope = Scope::Google;
    int fake_count = 0;
    int qm_count = 0;
    double cos_mean = 0.0;
    double sem_mean = 0.0;
    int query_polarity = 0;
    int senti_match_count = 0;
    int n_pos = 0;
    int n_neg = 0;
    int n_neu = 0;
    int n_retained = 0;
    // Not emitted; kept for inspection.
    double cos_max = 0.0;
    double sem_max = 0.0;

    std::vector<double> to_vector() const;
    static ClaimFeatures from_vector(std::string claim_id, Scope scope, std::span<const double> v);

    friend bool operator==(const ClaimFeatures&, const ClaimFeatures&) = default;
};

struct Aggregate {
    ClaimFeatures features;
    std::vector<std::size_t> retained;  // indices of titles with cosine >= tau
};

/// Keeps titles whose cosine is at least tau and sums/averages their signals.
Aggregate aggregate(std::string claim_id, Scope scope, text::Polarity query_polarity,
                    std::span<const TitleFeatures> titles, double tau);

/// Query polarity is taken over the full normalized claim so negations survive.
text::Polarity query_polarity(std::string_view claim_text, const FeatureContext& ctx);

struct PlatformExtraction {
    Aggregate aggregate;
    std::vector<TitleFeatures> titles;  // parallel to the merged evidence
};

/// Features for one platform: each merged title is scored against the query that retrieved it.
PlatformExtraction extract_platform(const Claim& claim, std::span<const BuiltQuery> queries,
                                    const evidence::MergedEvidence& evidence, const FeatureContext& ctx, double tau);

enum class MissingPolicy { ZeroFill, Error };

struct HybridFeatures {
    std::string claim_id;
    ClaimFeatures google;
    ClaimFeatures youtube;
    bool google_missing = false;
    bool youtube_missing = false;

    std::vector<double> to_vector() const;  // Google block, then YouTube block
};

/// MismatchedClaim when both blocks exist with different ids; a missing block is zero-filled and
/// flagged, or raises MissingFeatures under MissingPolicy::Error.
HybridFeatures hybrid_concat(const ClaimFeatures* google, const ClaimFeatures* youtube,
                             MissingPolicy policy = MissingPolicy::ZeroFill);

// ---------------------------------------------------------------------------
// Feature matrix CSV

// One row of a feature matrix: a platform vector (10 values) or a hybrid vector (20 values).
struct FeatureRow {
    std::string claim_id;
    Scope scope = Scope::Google;
    std::vector<double> values;
};

std::vector<std::string> platform_header();
std::vector<std::string> hybrid_header();  // g_* then y_*

void write_platform_csv(std::ostream& out, std::span<const ClaimFeatures> rows);
void write_hybrid_csv(std::ostream& out, std::span<const HybridFeatures> rows);

// Reads either layout (detected from the header). BadHeader on anything else.
std::vector<FeatureRow> read_feature_csv(std::istream& in);
std::vector<FeatureRow> read_feature_csv_file(const std::filesystem::path& path);

/// Rows of the requested scope. Hybrid rows are taken as-is when present, otherwise built by
/// pairing Google and YouTube rows per claim (zero-filling a missing side).
std::vector<FeatureRow> select_scope(const std::vector<FeatureRow>& rows, Scope scope);

}  // namespace mwv::features
