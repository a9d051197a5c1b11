#pragma once

#include <array>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mwv/features.hpp"
#include "mwv/learn.hpp"
#include "mwv/querybuild.hpp"

namespace mwv::eval {

// ---------------------------------------------------------------------------
// Datasets

struct DatasetRecord {
    std::string id;
    std::string text;
    Label label = Label::Real;
};

struct LoadOptions {
    // Drop records whose trimmed text repeats an earlier record. Off so published counts survive.
    bool dedup = false;
    // Labels are optional (claims to verify rather than to evaluate).
    bool require_label = true;
};

/// Delimited file with a header naming id, tweet|text and label columns (any order, any case,
/// extra columns ignored). '\t' or ',' is chosen from the extension, or from the header when the
/// extension says neither. Labels must be real or fake, any case.
/// Errors: BadHeader, BadLabel (with line), DuplicateId, ParseError for ragged rows or empty text.
std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path, const LoadOptions& options = {});
std::vector<DatasetRecord> load_dataset(std::istream& in, char delimiter, const LoadOptions& options = {},
                                        std::string_view source = "input");

std::vector<Claim> to_claims(const std::vector<DatasetRecord>& records);
std::map<std::string, Label> label_map(const std::vector<DatasetRecord>& records);

struct SplitSet {
    std::vector<DatasetRecord> train;
    std::vector<DatasetRecord> validation;
    std::vector<DatasetRecord> test;
};

/// Ids only need to be unique within a split; across splits they are qualified as "<split>/<id>"
/// and those are disjoint by construction. Returns the qualified ids of all splits.
std::vector<std::string> qualified_ids(const SplitSet& splits);

struct SplitFiles {
    std::filesystem::path train;
    std::filesystem::path validation;
    std::filesystem::path test;
};

// Finds one file per split by name ("train", "val", "test"; .csv/.tsv) in a directory.
std::optional<SplitFiles> locate_split_files(const std::filesystem::path& dir);
SplitSet load_splits(const SplitFiles& files, const LoadOptions& options = {});

struct SplitCounts {
    std::size_t total = 0;
    std::size_t real = 0;
    std::size_t fake = 0;
    friend bool operator==(const SplitCounts&, const SplitCounts&) = default;
};

SplitCounts count_labels(const std::vector<DatasetRecord>& records);

// The published 3:1:1 corpus counts.
struct ExpectedSplits {
    SplitCounts train{6420, 3360, 3060};
    SplitCounts validation{2140, 1120, 1020};
    SplitCounts test{2140, 1120, 1020};
};

struct SplitCheckRow {
    std::string split;
    SplitCounts expected;
    SplitCounts actual;
    bool matches = false;
};

struct SplitCheck {
    std::vector<SplitCheckRow> rows;  // train, validation, test
    std::vector<std::string> warnings;
    bool all_match() const;
};

/// Compares the three splits against the expected counts. Mismatches become warnings, or
/// CountMismatch when strict.
SplitCheck verify_split_counts(const SplitSet& splits, bool strict = false, const ExpectedSplits& expected = {});
std::string format_split_check(const SplitCheck& check);

// ---------------------------------------------------------------------------
// Metrics (positive class: fake / Misleading)

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const noexcept { return tp + fp + fn + tn; }
    void add(Label gold, Label predicted);
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix tally(const std::vector<Label>& gold, const std::vector<Label>& predicted);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct Averaged {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct MetricsReport {
    ConfusionMatrix cm;
    ClassMetrics fake;
    ClassMetrics real;
    Averaged macro;
    Averaged micro;
    Averaged weighted;
    double accuracy = 0.0;
    // Every 0/0 replaced by 0, e.g. "precision_fake".
    std::vector<std::string> undefined;
};

// EmptyEvaluation on an empty matrix.
MetricsReport compute_metrics(const ConfusionMatrix& cm);

// ---------------------------------------------------------------------------
// Platform vote

enum class VoteRule { Majority, HybridOnly };

std::string_view to_string(VoteRule r) noexcept;
std::optional<VoteRule> parse_vote_rule(std::string_view s) noexcept;

struct VoteResult {
    Label final = Label::Real;
    int votes_misleading = 0;
    int votes_real = 0;
    int voters = 0;
    // |votes_M - votes_R| / voters; not a calibrated confidence.
    double support = 0.0;
    bool tie_broken = false;
};

/// Majority over the labels present. Two voters that disagree defer to the hybrid label when it is
/// one of them, otherwise to `two_voter_tie` (Misleading by default). HybridOnly returns the hybrid
/// label. NoVotes when nothing usable is present.
VoteResult platform_vote(std::optional<Label> google, std::optional<Label> youtube, std::optional<Label> hybrid,
                         VoteRule rule = VoteRule::Majority, Label two_voter_tie = Label::Misleading);

// ---------------------------------------------------------------------------
// Experiment runner

struct ModelSpec {
    std::string name;
    learn::TrainConfig config;
};

// The seven configurations of the per-platform tables.
std::vector<ModelSpec> default_models();

struct LabeledFeatures {
    std::vector<features::FeatureRow> rows;
    std::map<std::string, Label> labels;
};

struct ExperimentInputs {
    LabeledFeatures train;
    LabeledFeatures eval;
    std::string eval_split = "test";
    std::vector<features::Scope> scopes{features::Scope::Google, features::Scope::YouTube, features::Scope::Hybrid};
    std::vector<ModelSpec> models = default_models();
    std::uint64_t seed = 0;
};

struct ExperimentRow {
    std::string model;
    features::Scope scope = features::Scope::Google;
    std::size_t n_train = 0;
    std::size_t n_eval = 0;
    MetricsReport metrics;
};

struct ExperimentReport {
    std::string eval_split;
    std::uint64_t seed = 0;
    std::vector<ExperimentRow> rows;  // model-major, scopes in the requested order
};

/// The labeled ids of a split must all have features in each scope, else MissingFeatures.
/// Each model is seeded with mix_seed(seed, model index) in every scope.
ExperimentReport run_experiment(const ExperimentInputs& inputs);

/// Builds the per-claim design matrix for one scope, ordered as the labels map (by id).
learn::Dataset design_matrix(const LabeledFeatures& data, features::Scope scope);

// {"eval_split":..., "seed":..., "rows":[{model, scope, precision, recall, f1, accuracy, averaging, ...}]}
std::string report_json(const ExperimentReport& report);
std::string report_table(const ExperimentReport& report);
std::string metrics_json(const MetricsReport& m);

/// Experiment spec file (JSON). Relative paths resolve against the spec's directory.
///   {"train_features": "...csv", "train_labels": "...tsv",
///    "eval_features": "...csv", "eval_labels": "...tsv", "eval_split": "test",
///    "scopes": ["google","youtube","hybrid"], "models": ["random_forest", ...], "seed": 7}
struct ExperimentSpec {
    std::filesystem::path train_features;
    std::filesystem::path train_labels;
    std::filesystem::path eval_features;
    std::filesystem::path eval_labels;
    std::string eval_split = "test";
    std::vector<features::Scope> scopes{features::Scope::Google, features::Scope::YouTube, features::Scope::Hybrid};
    std::vector<std::string> models;  // empty: default_models()
    std::optional<std::uint64_t> seed;
};

ExperimentSpec load_experiment_spec(const std::filesystem::path& path);
ExperimentInputs load_experiment_inputs(const ExperimentSpec& spec, std::uint64_t seed);

}  // namespace mwv::eval
