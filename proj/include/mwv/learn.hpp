#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mwv/querybuild.hpp"
#include "mwv/rng.hpp"

namespace mwv::learn {

using Vector = std::vector<double>;

struct Dataset {
    std::vector<Vector> x;
    std::vector<Label> y;

    std::size_t size() const noexcept { return x.size(); }
    std::size_t dim() const noexcept { return x.empty() ? 0 : x.front().size(); }
    void add(Vector features, Label label);
    // Non-empty, constant dimension, finite values, one label per row.
    void validate() const;
    bool has_both_classes() const;
};

// Per-column z-scoring fitted on training data. Population standard deviation, floored at 1e-9.
class Standardizer {
public:
    static constexpr double kScaleFloor = 1e-9;

    Standardizer() = default;
    Standardizer(Vector mean, Vector scale);

    static Standardizer fit(const std::vector<Vector>& rows);

    Vector transform(std::span<const double> x) const;
    std::vector<Vector> transform_all(const std::vector<Vector>& rows) const;
    double inverse(std::size_t column, double z) const { return z * scale_[column] + mean_[column]; }

    const Vector& mean() const noexcept { return mean_; }
    const Vector& scale() const noexcept { return scale_; }
    std::size_t dim() const noexcept { return mean_.size(); }

private:
    Vector mean_;
    Vector scale_;
};

enum class ModelKind { Logistic, LinearSvm, Sgd, Cart, RandomForest, Knn, GaussianNb, Voting, Bagging };

std::string_view to_string(ModelKind k) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view s) noexcept;

enum class SgdLoss { Hinge, Log };
enum class VotingMode { Hard, Soft };

std::string_view to_string(SgdLoss l) noexcept;
std::string_view to_string(VotingMode m) noexcept;

/// Hyperparameters. defaults(kind) gives the documented per-kind defaults:
///   logistic      lr 0.1, 500 epochs, lambda 1e-3 (full-batch gradient descent)
///   linear_svm    lambda 1e-3, 20 epochs (Pegasos)
///   sgd           hinge loss, lr 0.01 decayed as lr / (1 + lr * lambda * t), 20 epochs, lambda 1e-4
///   cart          max_depth 10 (<= 0 means unbounded), min_samples_split 2
///   random_forest 100 trees, bootstrap, ceil(sqrt(d)) features per split, trees as cart
///   knn           k 5
///   voting        hard; members listed in `members`
///   bagging       10 bags, bootstrap; base model is members[0]
struct TrainConfig {
    ModelKind kind = ModelKind::Logistic;
    std::uint64_t seed = 0;

    double learning_rate = 0.1;
    int epochs = 500;
    double lambda = 1e-3;
    SgdLoss loss = SgdLoss::Hinge;

    int max_depth = 10;
    int min_samples_split = 2;
    int n_estimators = 100;
    bool bootstrap = true;
    int max_features = 0;  // 0: ceil(sqrt(d)) for forests, every feature for a single tree

    int k = 5;

    VotingMode voting = VotingMode::Hard;
    std::vector<TrainConfig> members;

    static TrainConfig defaults(ModelKind kind);
    // BadConfig on non-positive hyperparameters or a malformed ensemble.
    void validate() const;
};

/// Named configurations accepted by the CLI: every kind name plus the ensembles
/// "voting_rf_lr_knn", "voting_lr_lsvm_cart" and "bagging_dt".
TrainConfig preset(std::string_view name);
std::vector<std::string> preset_names();

// ---------------------------------------------------------------------------
// Models

class Model {
public:
    virtual ~Model() = default;

    virtual ModelKind kind() const noexcept = 0;
    std::size_t dim() const noexcept { return dim_; }

    // DimensionMismatch when x has the wrong length.
    Label predict(std::span<const double> x) const;
    // Probability of Misleading; NotSupported unless has_proba().
    double predict_proba(std::span<const double> x) const;
    virtual bool has_proba() const noexcept { return false; }

    std::vector<Label> predict_all(const std::vector<Vector>& rows) const;

protected:
    explicit Model(std::size_t dim) : dim_(dim) {}
    virtual Label do_predict(std::span<const double> x) const = 0;
    virtual double do_proba(std::span<const double> x) const;

private:
    std::size_t dim_;
};

// Logistic regression, Pegasos SVM and SGD share the linear form w.z + b on standardized z.
class LinearModel final : public Model {
public:
    LinearModel(ModelKind kind, SgdLoss loss, Standardizer standardizer, Vector weights, double bias);

    ModelKind kind() const noexcept override { return kind_; }
    bool has_proba() const noexcept override;
    SgdLoss loss() const noexcept { return loss_; }
    const Standardizer& standardizer() const noexcept { return std_; }
    const Vector& weights() const noexcept { return w_; }
    double bias() const noexcept { return b_; }
    double decision_function(std::span<const double> x) const;

protected:
    Label do_predict(std::span<const double> x) const override;
    double do_proba(std::span<const double> x) const override;

private:
    ModelKind kind_;
    SgdLoss loss_;
    Standardizer std_;
    Vector w_;
    double b_;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;  // standardized units; z[feature] <= threshold goes left
    int left = -1;
    int right = -1;
    int n_real = 0;
    int n_fake = 0;

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class DecisionTree {
public:
    DecisionTree() = default;
    explicit DecisionTree(std::vector<TreeNode> nodes);

    // Leaf majority; a tie goes to Real.
    Label predict(std::span<const double> z) const;
    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    int depth() const;

private:
    std::vector<TreeNode> nodes_;
};

struct TreeParams {
    int max_depth = 10;
    int min_samples_split = 2;
    int max_features = 0;  // 0 or >= d: every feature in index order
};

/// Gini CART over rows idx of standardized data z. Thresholds are midpoints between adjacent
/// distinct values; the lowest weighted impurity wins, earlier feature then lower threshold on
/// ties. An impure node splits whenever some feature varies, even at zero gain. With a feature
/// subset a node that finds no split among its sampled features keeps drawing from the rest.
DecisionTree grow_tree(const std::vector<Vector>& z, const std::vector<Label>& y, std::span<const std::size_t> idx,
                       const TreeParams& params, Rng* rng);

class CartModel final : public Model {
public:
    CartModel(Standardizer standardizer, DecisionTree tree);
    ModelKind kind() const noexcept override { return ModelKind::Cart; }
    const Standardizer& standardizer() const noexcept { return std_; }
    const DecisionTree& tree() const noexcept { return tree_; }
    // Root split in raw feature units, nullopt for a single leaf.
    std::optional<std::pair<int, double>> root_split() const;

protected:
    Label do_predict(std::span<const double> x) const override;

private:
    Standardizer std_;
    DecisionTree tree_;
};

class ForestModel final : public Model {
public:
    ForestModel(Standardizer standardizer, std::vector<DecisionTree> trees);
    ModelKind kind() const noexcept override { return ModelKind::RandomForest; }
    const Standardizer& standardizer() const noexcept { return std_; }
    const std::vector<DecisionTree>& trees() const noexcept { return trees_; }

protected:
    // Misleading only on a strict majority of trees.
    Label do_predict(std::span<const double> x) const override;

private:
    Standardizer std_;
    std::vector<DecisionTree> trees_;
};

class KnnModel final : public Model {
public:
    KnnModel(Standardizer standardizer, std::vector<Vector> points, std::vector<Label> labels, int k);
    ModelKind kind() const noexcept override { return ModelKind::Knn; }
    const Standardizer& standardizer() const noexcept { return std_; }
    const std::vector<Vector>& points() const noexcept { return points_; }
    const std::vector<Label>& labels() const noexcept { return labels_; }
    int k() const noexcept { return k_; }
    // Indices of the k nearest stored points by Euclidean distance, ties to the lower index.
    std::vector<std::size_t> neighbors(std::span<const double> x) const;

protected:
    Label do_predict(std::span<const double> x) const override;

private:
    Standardizer std_;
    std::vector<Vector> points_;  // standardized
    std::vector<Label> labels_;
    int k_;
};

class GaussianNbModel final : public Model {
public:
    static constexpr double kVarianceFloor = 1e-9;

    // Index 0 is Real, 1 is Misleading.
    GaussianNbModel(Standardizer standardizer, std::array<Vector, 2> means, std::array<Vector, 2> variances,
                    std::array<double, 2> priors);
    ModelKind kind() const noexcept override { return ModelKind::GaussianNb; }
    bool has_proba() const noexcept override { return true; }
    const Standardizer& standardizer() const noexcept { return std_; }
    const std::array<Vector, 2>& means() const noexcept { return means_; }
    const std::array<Vector, 2>& variances() const noexcept { return vars_; }
    const std::array<double, 2>& priors() const noexcept { return priors_; }
    double log_posterior(std::span<const double> x, Label c) const;  // unnormalized

protected:
    Label do_predict(std::span<const double> x) const override;
    double do_proba(std::span<const double> x) const override;

private:
    Standardizer std_;
    std::array<Vector, 2> means_;
    std::array<Vector, 2> vars_;
    std::array<double, 2> priors_;
};

// Voting and bagging. Members take raw features and standardize on their own.
class EnsembleModel final : public Model {
public:
    EnsembleModel(ModelKind kind, VotingMode mode, std::vector<std::unique_ptr<Model>> members);
    ModelKind kind() const noexcept override { return kind_; }
    bool has_proba() const noexcept override { return mode_ == VotingMode::Soft; }
    VotingMode mode() const noexcept { return mode_; }
    std::size_t member_count() const noexcept { return members_.size(); }
    const Model& member(std::size_t i) const { return *members_.at(i); }

protected:
    // Hard: Misleading only on a strict majority. Soft: mean member probability >= 0.5, members
    // without probabilities contributing 0 or 1.
    Label do_predict(std::span<const double> x) const override;
    double do_proba(std::span<const double> x) const override;

private:
    ModelKind kind_;
    VotingMode mode_;
    std::vector<std::unique_ptr<Model>> members_;
};

// ---------------------------------------------------------------------------
// Training

std::unique_ptr<Model> train(const Dataset& data, const TrainConfig& cfg);

std::unique_ptr<LinearModel> train_logistic(const Dataset& data, const TrainConfig& cfg);
std::unique_ptr<LinearModel> train_linear_svm(const Dataset& data, const TrainConfig& cfg);
std::unique_ptr<LinearModel> train_sgd(const Dataset& data, const TrainConfig& cfg);
std::unique_ptr<CartModel> train_cart(const Dataset& data, const TrainConfig& cfg);
std::unique_ptr<ForestModel> train_random_forest(const Dataset& data, const TrainConfig& cfg);
std::unique_ptr<KnnModel> train_knn(const Dataset& data, const TrainConfig& cfg);
std::unique_ptr<GaussianNbModel> train_gnb(const Dataset& data, const TrainConfig& cfg);
std::unique_ptr<EnsembleModel> train_voting(const Dataset& data, const TrainConfig& cfg);
std::unique_ptr<EnsembleModel> train_bagging(const Dataset& data, const TrainConfig& cfg);

// Objectives on standardized rows z with y in {0, 1}; exposed for gradient checking.
// Logistic: mean log loss + (lambda / 2) |w|^2, bias unregularized. Gradient layout [dw..., db].
double logistic_objective(const std::vector<Vector>& z, const std::vector<Label>& y, std::span<const double> w,
                          double b, double lambda);
Vector logistic_gradient(const std::vector<Vector>& z, const std::vector<Label>& y, std::span<const double> w,
                         double b, double lambda);
// Per-instance SGD loss with the same regularizer; hinge uses y in {-1, +1} internally.
double sgd_instance_loss(SgdLoss loss, std::span<const double> z, Label y, std::span<const double> w, double b,
                         double lambda);
Vector sgd_instance_gradient(SgdLoss loss, std::span<const double> z, Label y, std::span<const double> w, double b,
                             double lambda);

// ---------------------------------------------------------------------------
// Persistence: {"format_version":1, "kind":..., "dim":..., "standardizer":..., "params":...}

inline constexpr int kModelFormatVersion = 1;

void save_model(const Model& model, std::ostream& out);
void save_model_file(const Model& model, const std::filesystem::path& path);
// ParseError on malformed input, IncompatibleModel on any other format_version.
std::unique_ptr<Model> load_model(std::istream& in);
std::unique_ptr<Model> load_model_file(const std::filesystem::path& path);

}  // namespace mwv::learn
