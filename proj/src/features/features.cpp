#include "mwv/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <unordered_set>

#include "mwv/csv.hpp"
#include "mwv/error.hpp"
#include "mwv/text/normalize.hpp"
#include "mwv/text/rake.hpp"
#include "mwv/text/stemmer.hpp"
#include "mwv/util.hpp"

namespace mwv::features {

namespace {

// As published, including its case variants and the repeated entry.
const char* const kPublishedPhrases[] = {
    "false", "misleading", "inaccurate", "rumor", "rumour", "not correct", "fake news", "incorrect",
    "wrong", "confounding", "deceiving", "deluding", "wont", "did", "Did", "funny", "memes", "catchy",
    "bogus", "counterfeit", "fabricated", "fictitious", "forged", "fraudulent", "mock", "phony",
    "affected", "artificial", "erroneous", "fake", "fanciful", "faulty", "improper", "invalid",
    "mistaken", "unfounded", "unreal", "untrue", "untruthful", "casuistic", "fishy", "illusive",
    "imaginary", "inexact", "lying", "misrepresentative", "falsity", "misreport", "misstatement",
    "deception", "falsification", "artificial", "fabrication", "falsehood", "hoax", "?", "Not Died",
    "misinformation", "not committed", "not dead", "death rumour", "is it true", "not known", "no proof",
    "no known", "no scientific evidence", "no evidence", "not verified", "clickbait", "not proven",
    "denied", "deny", "unverified", "falsely", "myth", "ridiculous", "not true"};

std::string clean_phrase(std::string_view p) {
    std::string out;
    for (const auto& w : split(to_lower_ascii(trim(p)), ' ')) {
        if (w.empty()) continue;
        if (!out.empty()) out += ' ';
        out += w;
    }
    return out;
}

bool is_word_char(char c) { return c != ' '; }

bool contains_word(std::string_view text, std::string_view word) {
    std::size_t pos = 0;
    while ((pos = text.find(word, pos)) != std::string_view::npos) {
        const bool left = pos == 0 || !is_word_char(text[pos - 1]);
        const std::size_t end = pos + word.size();
        const bool right = end == text.size() || !is_word_char(text[end]);
        if (left && right) return true;
        ++pos;
    }
    return false;
}

// Sum in sorted order so the result does not depend on title order.
double sorted_sum(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// FakePhraseCorpus

FakePhraseCorpus::FakePhraseCorpus(std::vector<std::string> phrases) {
    std::unordered_set<std::string> seen;
    for (const auto& p : phrases) {
        std::string c = clean_phrase(p);
        if (c.empty()) continue;
        if (seen.insert(c).second) phrases_.push_back(std::move(c));
    }
    if (phrases_.empty()) throw Error(ErrorCode::BadConfig, "fake-phrase corpus is empty");
}

FakePhraseCorpus FakePhraseCorpus::bundled() {
    return FakePhraseCorpus(std::vector<std::string>(std::begin(kPublishedPhrases), std::end(kPublishedPhrases)));
}

FakePhraseCorpus FakePhraseCorpus::load(std::istream& in) {
    std::vector<std::string> phrases;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        phrases.push_back(line);
    }
    return FakePhraseCorpus(std::move(phrases));
}

FakePhraseCorpus FakePhraseCorpus::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return load(in);
}

bool FakePhraseCorpus::matches(std::string_view text, MatchMode mode) const {
    for (const auto& p : phrases_) {
        const bool single = p.find(' ') == std::string::npos;
        if (mode == MatchMode::WordBoundary && single) {
            if (contains_word(text, p)) return true;
        } else if (text.find(p) != std::string_view::npos) {
            return true;
        }
    }
    return false;
}

FakePhraseCorpus FakePhraseCorpus::without(std::string_view phrase) const {
    const std::string c = clean_phrase(phrase);
    std::vector<std::string> kept;
    for (const auto& p : phrases_) {
        if (p != c) kept.push_back(p);
    }
    return FakePhraseCorpus(std::move(kept));
}

// ---------------------------------------------------------------------------
// Similarities

double cosine_similarity(const text::TokenList& a, const text::TokenList& b, const text::StopwordList& sw) {
    std::set<std::string_view> x;
    std::set<std::string_view> y;
    for (const auto& t : a) {
        if (!sw.contains(t)) x.insert(t.view());
    }
    for (const auto& t : b) {
        if (!sw.contains(t)) y.insert(t.view());
    }
    if (x.empty() || y.empty()) return 0.0;
    std::size_t common = 0;
    for (const auto& w : x) common += y.count(w);
    if (common == x.size() && x.size() == y.size()) return 1.0;
    return static_cast<double>(common) / std::sqrt(static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

namespace {

// Naive inflection stripping so "barks" finds "bark".
const std::vector<std::string>& lookup_synsets(const text::LexicalDatabase& db, std::string_view word, char cat) {
    const auto& direct = db.synsets_for(word, cat);
    if (!direct.empty()) return direct;
    const std::string w(word);
    auto ends = [&](std::string_view suf) { return w.size() > suf.size() + 1 && w.ends_with(suf); };
    std::vector<std::string> cands;
    if (cat == 'n' || cat == 'v') {
        if (ends("ies")) cands.push_back(w.substr(0, w.size() - 3) + "y");
        if (ends("es")) cands.push_back(w.substr(0, w.size() - 2));
        if (ends("s") && !ends("ss")) cands.push_back(w.substr(0, w.size() - 1));
    }
    if (cat == 'v') {
        if (ends("ed")) {
            cands.push_back(w.substr(0, w.size() - 2));
            cands.push_back(w.substr(0, w.size() - 1));
        }
        if (ends("ing")) {
            cands.push_back(w.substr(0, w.size() - 3));
            cands.push_back(w.substr(0, w.size() - 3) + "e");
        }
    }
    for (const auto& c : cands) {
        const auto& s = db.synsets_for(c, cat);
        if (!s.empty()) return s;
    }
    return direct;
}

struct SenseWord {
    char category;
    const std::vector<std::string>* synsets;
};

std::vector<SenseWord> sense_words(std::span<const text::TaggedToken> tokens, const text::LexicalDatabase& db) {
    std::vector<SenseWord> out;
    for (const auto& t : tokens) {
        const auto letter = text::category_letter(t.category);
        if (!letter) continue;
        const auto& syn = lookup_synsets(db, t.token.view(), *letter);
        if (syn.empty()) continue;
        out.push_back({*letter, &syn});
    }
    return out;
}

double directional(const std::vector<SenseWord>& from, const std::vector<SenseWord>& to,
                   const text::LexicalDatabase& db) {
    if (from.empty()) return 0.0;
    double total = 0.0;
    for (const auto& w : from) {
        double best = 0.0;
        for (const auto& v : to) {
            if (v.category != w.category) continue;
            for (const auto& s1 : *w.synsets) {
                for (const auto& s2 : *v.synsets) {
                    const auto sim = db.path_similarity(s1, s2);
                    if (sim && *sim > best) best = *sim;
                }
            }
        }
        total += best;
    }
    return total / static_cast<double>(from.size());
}

}  // namespace

double semantic_similarity(std::span<const text::TaggedToken> a, std::span<const text::TaggedToken> b,
                           const text::LexicalDatabase& db) {
    const auto wa = sense_words(a, db);
    const auto wb = sense_words(b, db);
    const double s = 0.5 * (directional(wa, wb, db) + directional(wb, wa, db));
    return std::clamp(s, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Per-title features

namespace {

std::vector<text::TaggedToken> content_tags(const text::TokenList& tokens, const FeatureContext& ctx) {
    text::TokenList kept;
    for (const auto& t : tokens) {
        if (!ctx.stopwords.contains(t)) kept.push_back(t);
    }
    return ctx.tagger.tag(kept);
}

text::TokenList stem_all(const text::TokenList& tokens) {
    text::TokenList out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(text::stem(t));
    return out;
}

}  // namespace

TitleFeatures title_features(const BuiltQuery& query, const evidence::EvidenceTitle& title, const FeatureContext& ctx) {
    TitleFeatures f;
    const text::TokenList q = text::tokenize(text::normalize_text(query.content));
    const text::TokenList t = text::tokenize(text::normalize_text(title.title));

    std::string scan;
    for (const auto& p : text::extract_ranked_phrases(title.title, ctx.stopwords)) {
        if (!scan.empty()) scan += ' ';
        scan += p.text;
    }
    std::size_t questions = 0;
    for (const auto& tok : t) {
        if (tok.view() == "?") ++questions;
    }
    for (std::size_t i = 0; i < questions; ++i) {
        if (!scan.empty()) scan += ' ';
        scan += '?';
    }

    f.fake_flag = ctx.corpus.matches(scan, ctx.match_mode) ? 1 : 0;
    f.qm_flag = questions > 0 ? 1 : 0;
    f.cosine = ctx.stem ? cosine_similarity(stem_all(q), stem_all(t), ctx.stopwords)
                        : cosine_similarity(q, t, ctx.stopwords);
    const auto qt = content_tags(q, ctx);
    const auto tt = content_tags(t, ctx);
    f.semantic = semantic_similarity(qt, tt, ctx.lexdb);
    f.polarity = text::sentence_polarity(t, ctx.lexicon, ctx.thresholds);
    return f;
}

// ---------------------------------------------------------------------------
// Aggregation

std::string_view to_string(Scope s) noexcept {
    switch (s) {
        case Scope::Google: return "google";
        case Scope::YouTube: return "youtube";
        case Scope::Hybrid: return "hybrid";
    }
    return "google";
}

std::optional<Scope> parse_scope(std::string_view s) noexcept {
    const std::string v = to_lower_ascii(trim(s));
    if (v == "google") return Scope::Google;
    if (v == "youtube") return Scope::YouTube;
    if (v == "hybrid") return Scope::Hybrid;
    return std::nullopt;
}

Scope scope_of(evidence::Platform p) noexcept {
    return p == evidence::Platform::Google ? Scope::Google : Scope::YouTube;
}

std::vector<double> ClaimFeatures::to_vector() const {
    return {static_cast<double>(fake_count), static_cast<double>(qm_count), cos_mean, sem_mean,
            static_cast<double>(query_polarity), static_cast<double>(senti_match_count),
            static_cast<double>(n_pos), static_cast<double>(n_neg), static_cast<double>(n_neu),
            static_cast<double>(n_retained)};
}

ClaimFeatures ClaimFeatures::from_vector(std::string claim_id, Scope scope, std::span<const double> v) {
    if (v.size() != kDim) {
        throw Error(ErrorCode::DimensionMismatch, "claim feature vector needs " + std::to_string(kDim) + " values");
    }
    auto as_int = [](double x) { return static_cast<int>(std::lround(x)); };
    ClaimFeatures f;
    f.claim_id = std::move(claim_id);
    f.scope = scope;
    f.fake_count = as_int(v[0]);
    f.qm_count = as_int(v[1]);
    f.cos_mean = v[2];
    f.sem_mean = v[3];
    f.query_polarity = as_int(v[4]);
    f.senti_match_count = as_int(v[5]);
    f.n_pos = as_int(v[6]);
    f.n_neg = as_int(v[7]);
    f.n_neu = as_int(v[8]);
    f.n_retained = as_int(v[9]);
    return f;
}

Aggregate aggregate(std::string claim_id, Scope scope, text::Polarity query_polarity,
                    std::span<const TitleFeatures> titles, double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw Error(ErrorCode::BadConfig, "threshold must lie in [0, 1]");
    Aggregate out;
    ClaimFeatures& f = out.features;
    f.claim_id = std::move(claim_id);
    f.scope = scope;
    f.query_polarity = text::encode(query_polarity);
    std::vector<double> cos;
    std::vector<double> sem;
    for (std::size_t i = 0; i < titles.size(); ++i) {
        const auto& t = titles[i];
        if (t.cosine < tau) continue;
        out.retained.push_back(i);
        f.fake_count += t.fake_flag;
        f.qm_count += t.qm_flag;
        cos.push_back(t.cosine);
        sem.push_back(t.semantic);
        if (t.polarity == query_polarity) ++f.senti_match_count;
        switch (t.polarity) {
            case text::Polarity::Positive: ++f.n_pos; break;
            case text::Polarity::Negative: ++f.n_neg; break;
            case text::Polarity::Neutral: ++f.n_neu; break;
        }
    }
    f.n_retained = static_cast<int>(out.retained.size());
    if (!cos.empty()) {
        const double n = static_cast<double>(cos.size());
        f.cos_max = *std::max_element(cos.begin(), cos.end());
        f.sem_max = *std::max_element(sem.begin(), sem.end());
        f.cos_mean = sorted_sum(std::move(cos)) / n;
        f.sem_mean = sorted_sum(std::move(sem)) / n;
    }
    return out;
}

text::Polarity query_polarity(std::string_view claim_text, const FeatureContext& ctx) {
    return text::sentence_polarity(text::tokenize(text::normalize_text(claim_text)), ctx.lexicon, ctx.thresholds);
}

PlatformExtraction extract_platform(const Claim& claim, std::span<const BuiltQuery> queries,
                                    const evidence::MergedEvidence& evidence, const FeatureContext& ctx, double tau) {
    PlatformExtraction out;
    out.titles.reserve(evidence.titles.size());
    for (const auto& st : evidence.titles) {
        if (st.query_index >= queries.size()) {
            throw Error(ErrorCode::BadConfig, "evidence refers to query " + std::to_string(st.query_index) +
                                                  " of claim " + claim.id);
        }
        out.titles.push_back(title_features(queries[st.query_index], st.title, ctx));
    }
    out.aggregate = aggregate(claim.id, scope_of(evidence.platform), query_polarity(claim.text, ctx), out.titles, tau);
    return out;
}

// ---------------------------------------------------------------------------
// Hybrid

std::vector<double> HybridFeatures::to_vector() const {
    auto v = google.to_vector();
    const auto y = youtube.to_vector();
    v.insert(v.end(), y.begin(), y.end());
    return v;
}

HybridFeatures hybrid_concat(const ClaimFeatures* google, const ClaimFeatures* youtube, MissingPolicy policy) {
    if (!google && !youtube) throw Error(ErrorCode::MissingFeatures, "no platform block to combine");
    if (google && youtube && google->claim_id != youtube->claim_id) {
        throw Error(ErrorCode::MismatchedClaim, "'" + google->claim_id + "' vs '" + youtube->claim_id + "'");
    }
    if (google && google->scope != Scope::Google) throw Error(ErrorCode::BadConfig, "first block must be Google");
    if (youtube && youtube->scope != Scope::YouTube) throw Error(ErrorCode::BadConfig, "second block must be YouTube");
    HybridFeatures h;
    h.claim_id = google ? google->claim_id : youtube->claim_id;
    if (!google || !youtube) {
        if (policy == MissingPolicy::Error) {
            throw Error(ErrorCode::MissingFeatures, std::string(google ? "youtube" : "google") +
                                                         " block missing for claim " + h.claim_id);
        }
    }
    if (google) {
        h.google = *google;
    } else {
        h.google.claim_id = h.claim_id;
        h.google.scope = Scope::Google;
        h.google_missing = true;
    }
    if (youtube) {
        h.youtube = *youtube;
    } else {
        h.youtube.claim_id = h.claim_id;
        h.youtube.scope = Scope::YouTube;
        h.youtube_missing = true;
    }
    return h;
}

// ---------------------------------------------------------------------------
// CSV

std::vector<std::string> platform_header() {
    std::vector<std::string> h{"claim_id", "scope"};
    for (auto n : ClaimFeatures::kNames) h.emplace_back(n);
    return h;
}

std::vector<std::string> hybrid_header() {
    std::vector<std::string> h{"claim_id", "scope"};
    for (auto n : ClaimFeatures::kNames) h.push_back("g_" + std::string(n));
    for (auto n : ClaimFeatures::kNames) h.push_back("y_" + std::string(n));
    return h;
}

namespace {

void write_row(std::ostream& out, const std::string& id, Scope scope, const std::vector<double>& values) {
    std::vector<std::string> fields{id, std::string(to_string(scope))};
    for (double v : values) fields.push_back(format_double(v));
    out << join_record(fields, ',') << '\n';
}

}  // namespace

void write_platform_csv(std::ostream& out, std::span<const ClaimFeatures> rows) {
    out << join_record(platform_header(), ',') << '\n';
    for (const auto& r : rows) {
        if (r.scope == Scope::Hybrid) throw Error(ErrorCode::BadConfig, "hybrid rows belong in the hybrid layout");
        write_row(out, r.claim_id, r.scope, r.to_vector());
    }
}

void write_hybrid_csv(std::ostream& out, std::span<const HybridFeatures> rows) {
    out << join_record(hybrid_header(), ',') << '\n';
    for (const auto& r : rows) write_row(out, r.claim_id, Scope::Hybrid, r.to_vector());
}

std::vector<FeatureRow> read_feature_csv(std::istream& in) {
    DelimitedReader reader(in, ',');
    const auto header = reader.next();
    if (!header) throw Error(ErrorCode::BadHeader, "feature file is empty");
    std::vector<std::string> h;
    for (const auto& f : *header) h.push_back(trim(f));
    const bool hybrid = h == hybrid_header();
    if (!hybrid && h != platform_header()) throw Error(ErrorCode::BadHeader, "unrecognized feature header");
    const std::size_t width = h.size();
    std::vector<FeatureRow> rows;
    while (auto rec = reader.next()) {
        const auto where = "feature file line " + std::to_string(reader.line());
        if (rec->size() != width) throw Error(ErrorCode::ParseError, where + ": expected " + std::to_string(width) + " fields");
        FeatureRow row;
        row.claim_id = trim((*rec)[0]);
        const auto scope = parse_scope((*rec)[1]);
        if (!scope) throw Error(ErrorCode::ParseError, where + ": unknown scope '" + (*rec)[1] + "'");
        if ((*scope == Scope::Hybrid) != hybrid) throw Error(ErrorCode::ParseError, where + ": scope does not fit the layout");
        row.scope = *scope;
        for (std::size_t i = 2; i < width; ++i) {
            const auto v = parse_double((*rec)[i]);
            if (!v || !std::isfinite(*v)) throw Error(ErrorCode::ParseError, where + ": bad number '" + (*rec)[i] + "'");
            row.values.push_back(*v);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<FeatureRow> read_feature_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return read_feature_csv(in);
}

std::vector<FeatureRow> select_scope(const std::vector<FeatureRow>& rows, Scope scope) {
    std::vector<FeatureRow> out;
    if (scope != Scope::Hybrid) {
        for (const auto& r : rows) {
            if (r.scope == scope) out.push_back(r);
        }
        return out;
    }
    for (const auto& r : rows) {
        if (r.scope == Scope::Hybrid) out.push_back(r);
    }
    if (!out.empty()) return out;

    std::vector<std::string> order;
    std::map<std::string, const FeatureRow*> g;
    std::map<std::string, const FeatureRow*> y;
    for (const auto& r : rows) {
        if (!g.count(r.claim_id) && !y.count(r.claim_id)) order.push_back(r.claim_id);
        (r.scope == Scope::Google ? g : y)[r.claim_id] = &r;
    }
    const std::vector<double> zeros(ClaimFeatures::kDim, 0.0);
    for (const auto& id : order) {
        // Stored values are copied as-is; a missing side is zero-filled.
        const auto gi = g.find(id);
        const auto yi = y.find(id);
        FeatureRow row{id, Scope::Hybrid, gi != g.end() ? gi->second->values : zeros};
        const auto& yv = yi != y.end() ? yi->second->values : zeros;
        row.values.insert(row.values.end(), yv.begin(), yv.end());
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace mwv::features
