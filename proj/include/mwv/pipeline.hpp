#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mwv/error.hpp"
#include "mwv/eval.hpp"
#include "mwv/evidence/collector.hpp"
#include "mwv/features.hpp"
#include "mwv/learn.hpp"
#include "mwv/querybuild.hpp"
#include "mwv/text/lexdb.hpp"
#include "mwv/text/pos.hpp"
#include "mwv/text/sentiment.hpp"
#include "mwv/text/stopwords.hpp"

namespace mwv::pipeline {

inline constexpr std::string_view kToolVersion = "1.0.0";

// Bundled resources: $MWV_DATA_DIR when set, else the data/ directory of the source tree.
std::filesystem::path default_data_dir();

/// Run configuration. The file format is one "key = value" per line; '#' at line start or after
/// whitespace starts a comment. Keys:
///   build_case        1 | 2:<n> | 3                          (default 1)
///   providers         comma list of google, youtube            (google,youtube)
///   mode              live | record | replay                   (replay)
///   fixtures          fixture directory
///   threshold         relevance gate tau in [0, 1]              (0.2)
///   data_dir          resource directory                       (bundled data)
///   stopwords, sentiment_lexicon, pos_lexicon, fake_phrases    files (default: under data_dir)
///   lexdb             lexical database directory                (data_dir/lexdb)
///   match_mode        substring | word                          (substring)
///   stem              true | false                              (false)
///   model_google, model_youtube, model_hybrid                   model files; unset scopes do not vote
///   vote_rule         majority | hybrid-only                    (majority)
///   tie_break         fake | real                               (fake)
///   seed              unsigned integer                          (0)
///   workers           batch worker threads                      (1)
///   fail_fast         true | false                              (false)
///   timeout_ms, retries, polite_delay_ms, user_agent            live fetching
/// Relative paths in a file resolve against the file's directory.
struct PipelineConfig {
    BuildStrategy strategy = BuildStrategy::stopword_removal();
    std::vector<evidence::Platform> providers{evidence::Platform::Google, evidence::Platform::YouTube};
    evidence::EvidenceMode mode = evidence::EvidenceMode::Replay;
    std::filesystem::path fixtures;
    double tau = 0.2;
    std::filesystem::path data_dir = default_data_dir();
    std::filesystem::path stopwords;
    std::filesystem::path sentiment_lexicon;
    std::filesystem::path pos_lexicon;
    std::filesystem::path fake_phrases;
    std::filesystem::path lexdb;
    features::MatchMode match_mode = features::MatchMode::Substring;
    bool stem = false;
    std::filesystem::path model_google;
    std::filesystem::path model_youtube;
    std::filesystem::path model_hybrid;
    eval::VoteRule vote_rule = eval::VoteRule::Majority;
    Label tie_break = Label::Misleading;
    std::uint64_t seed = 0;
    int workers = 1;
    bool fail_fast = false;
    evidence::HttpOptions http;

    // Usage/BadConfig on unknown keys or malformed values.
    void set(std::string_view key, std::string_view value, const std::filesystem::path& base = {});
    static PipelineConfig load_file(const std::filesystem::path& path);
    void merge_file(const std::filesystem::path& path);

    // Resolved resource path (explicit setting or the data_dir default).
    std::filesystem::path resource(std::string_view key) const;
    // Every setting as text, sorted by key.
    std::map<std::string, std::string> snapshot() const;
    // tau range, worker budget, existence of referenced files; IoError for missing files.
    void validate() const;
};

// Shared read-only resources.
struct Resources {
    text::StopwordList stopwords;
    text::SentimentLexicon lexicon;
    text::PosTagger tagger;
    text::LexicalDatabase lexdb;
    features::FakePhraseCorpus corpus = features::FakePhraseCorpus::bundled();

    static Resources load(const PipelineConfig& cfg);
};

struct TrailEntry {
    evidence::Platform platform = evidence::Platform::Google;
    int rank = 0;
    std::string query;
    std::string title;
    std::string url;
    features::TitleFeatures signals;
};

struct ScopeOutcome {
    features::Scope scope = features::Scope::Google;
    std::vector<double> features;
    std::optional<Label> label;  // absent when no model is configured for the scope
    std::optional<double> probability;
};

struct Verdict {
    std::string claim_id;
    std::vector<std::string> queries;
    std::vector<ScopeOutcome> scopes;  // google, youtube, hybrid as available
    eval::VoteResult vote;
    bool insufficient_evidence = false;  // no platform returned a single title
    std::vector<TrailEntry> trail;       // titles that passed the relevance gate
    std::size_t titles_seen = 0;

    std::optional<Label> label_for(features::Scope s) const;
};

// One JSON object on a single line; keys in fixed order, so equal verdicts give equal bytes.
std::string verdict_json(const Verdict& v);

// Declared hooks: image input is not supported, translation passes text through.
std::string extract_image_text(const std::filesystem::path& image);
std::string translate_to_english(std::string_view text);

struct ClaimError {
    std::string claim_id;
    ErrorCode code = ErrorCode::IoError;
    std::string stage;
    std::string message;
};

std::string claim_error_json(const ClaimError& e);

struct RunManifest {
    std::string tool_version{kToolVersion};
    std::map<std::string, std::string> config;
    std::string input_path;
    std::string input_sha256;
    std::map<std::string, std::size_t> counts;  // claims, verdicts, errors, queries, titles, retained
    std::string started_at;
    std::string finished_at;
};

std::string manifest_json(const RunManifest& m);

struct BatchResult {
    // Input order; each claim yields a verdict or an error.
    std::vector<std::variant<Verdict, ClaimError>> outcomes;
    RunManifest manifest;

    std::size_t verdict_count() const;
    std::size_t error_count() const;
    // One line per claim, in input order.
    std::string verdicts_jsonl() const;
};

/// Collector for a configuration: fixture store when a fixture directory is set, network
/// providers for live and record modes.
std::shared_ptr<evidence::EvidenceCollector> make_collector(const PipelineConfig& cfg);

// Merged evidence of one claim on one platform, together with the queries that produced it.
struct CollectedEvidence {
    std::string claim_id;
    evidence::Platform platform = evidence::Platform::Google;
    std::vector<BuiltQuery> queries;
    evidence::MergedEvidence merged;
};

/// Builds the claim's queries and collects every enabled platform (Google first). Stage-tagged errors.
std::vector<CollectedEvidence> collect_claim(const Claim& claim, const PipelineConfig& cfg, const Resources& res,
                                             const evidence::EvidenceCollector& collector);

// Evidence file: one JSON line per (claim, platform):
//   {"claim_id":..., "platform":..., "queries":[{"text":..., "content":...}],
//    "titles":[{"query_index":..., "rank":..., "title":..., "url":..., "fetched_at":...}]}
std::string evidence_json(const CollectedEvidence& e);
std::vector<CollectedEvidence> read_evidence_jsonl(std::istream& in);
std::vector<CollectedEvidence> read_evidence_file(const std::filesystem::path& path);

struct FeaturizeResult {
    std::vector<features::ClaimFeatures> platform_rows;  // claim order, Google before YouTube
    std::vector<features::HybridFeatures> hybrid_rows;   // claims with at least one platform
};

/// Feature rows for every claim that has evidence. Evidence for unknown claims is an error.
FeaturizeResult featurize(const std::vector<Claim>& claims, const std::vector<CollectedEvidence>& evidence,
                          const features::FeatureContext& ctx, double tau);

features::FeatureContext make_context(const Resources& res, const PipelineConfig& cfg);

class Pipeline {
public:
    /// Loads resources and models, validates the configuration and wires providers for live and
    /// record modes. A collector may be injected (tests, custom providers).
    explicit Pipeline(PipelineConfig cfg, std::shared_ptr<evidence::EvidenceCollector> collector = nullptr);

    const PipelineConfig& config() const noexcept { return cfg_; }
    const Resources& resources() const noexcept { return *res_; }

    /// Stage errors propagate with their code and a "<stage>:" prefix on the message.
    Verdict verify(const Claim& claim) const;
    Verdict verify_text(std::string_view text, std::string id = "claim") const;

    /// Verifies every claim on up to cfg.workers threads. A failing claim becomes a ClaimError
    /// unless fail_fast, in which case the first failure (in input order) is rethrown.
    BatchResult run_batch(const std::vector<Claim>& claims) const;

private:
    features::FeatureContext context() const;

    PipelineConfig cfg_;
    std::unique_ptr<Resources> res_;
    std::shared_ptr<evidence::EvidenceCollector> collector_;
    std::unique_ptr<learn::Model> model_google_;
    std::unique_ptr<learn::Model> model_youtube_;
    std::unique_ptr<learn::Model> model_hybrid_;
};

/// Runs a batch over a dataset file and writes the verdict file plus "<out>.manifest.json".
BatchResult run_batch_file(const Pipeline& pipeline, const std::filesystem::path& dataset,
                           const std::filesystem::path& out);

}  // namespace mwv::pipeline
