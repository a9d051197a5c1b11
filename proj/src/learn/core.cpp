#include <algorithm>
#include <cmath>

#include "mwv/error.hpp"
#include "mwv/learn.hpp"
#include "mwv/util.hpp"

namespace mwv::learn {

void Dataset::add(Vector features, Label label) {
    x.push_back(std::move(features));
    y.push_back(label);
}

void Dataset::validate() const {
    if (x.empty()) throw Error(ErrorCode::DegenerateLabels, "training set is empty");
    if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "feature rows and labels differ in count");
    const std::size_t d = x.front().size();
    if (d == 0) throw Error(ErrorCode::DimensionMismatch, "feature vectors are empty");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].size() != d) {
            throw Error(ErrorCode::DimensionMismatch, "row " + std::to_string(i) + " has " + std::to_string(x[i].size()) +
                                                          " features, expected " + std::to_string(d));
        }
        for (double v : x[i]) {
            if (!std::isfinite(v)) throw Error(ErrorCode::ParseError, "row " + std::to_string(i) + " holds a non-finite value");
        }
    }
}

bool Dataset::has_both_classes() const {
    bool real = false;
    bool fake = false;
    for (Label l : y) (l == Label::Real ? real : fake) = true;
    return real && fake;
}

// ---------------------------------------------------------------------------

Standardizer::Standardizer(Vector mean, Vector scale) : mean_(std::move(mean)), scale_(std::move(scale)) {
    if (mean_.size() != scale_.size()) throw Error(ErrorCode::DimensionMismatch, "standardizer mean/scale sizes differ");
    for (double s : scale_) {
        if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorCode::ParseError, "standardizer scale must be positive");
    }
}

Standardizer Standardizer::fit(const std::vector<Vector>& rows) {
    if (rows.empty()) throw Error(ErrorCode::DegenerateLabels, "cannot standardize an empty set");
    const std::size_t d = rows.front().size();
    const double n = static_cast<double>(rows.size());
    Vector mean(d, 0.0);
    Vector scale(d, 0.0);
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < d; ++j) mean[j] += r[j];
    }
    for (auto& m : mean) m /= n;
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < d; ++j) {
            const double dev = r[j] - mean[j];
            scale[j] += dev * dev;
        }
    }
    for (auto& s : scale) s = std::max(std::sqrt(s / n), kScaleFloor);
    return Standardizer(std::move(mean), std::move(scale));
}

Vector Standardizer::transform(std::span<const double> x) const {
    if (x.size() != mean_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(mean_.size()) + " features, got " +
                                                      std::to_string(x.size()));
    }
    Vector z(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) z[j] = (x[j] - mean_[j]) / scale_[j];
    return z;
}

std::vector<Vector> Standardizer::transform_all(const std::vector<Vector>& rows) const {
    std::vector<Vector> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(transform(r));
    return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ModelKind k) noexcept {
    switch (k) {
        case ModelKind::Logistic: return "logistic";
        case ModelKind::LinearSvm: return "linear_svm";
        case ModelKind::Sgd: return "sgd";
        case ModelKind::Cart: return "cart";
        case ModelKind::RandomForest: return "random_forest";
        case ModelKind::Knn: return "knn";
        case ModelKind::GaussianNb: return "gnb";
        case ModelKind::Voting: return "voting";
        case ModelKind::Bagging: return "bagging";
    }
    return "logistic";
}

std::optional<ModelKind> parse_model_kind(std::string_view s) noexcept {
    const std::string v = to_lower_ascii(trim(s));
    if (v == "logistic" || v == "lr") return ModelKind::Logistic;
    if (v == "linear_svm" || v == "svm" || v == "lsvm") return ModelKind::LinearSvm;
    if (v == "sgd") return ModelKind::Sgd;
    if (v == "cart" || v == "dt" || v == "tree") return ModelKind::Cart;
    if (v == "random_forest" || v == "rf") return ModelKind::RandomForest;
    if (v == "knn") return ModelKind::Knn;
    if (v == "gnb" || v == "nb") return ModelKind::GaussianNb;
    if (v == "voting") return ModelKind::Voting;
    if (v == "bagging") return ModelKind::Bagging;
    return std::nullopt;
}

std::string_view to_string(SgdLoss l) noexcept { return l == SgdLoss::Hinge ? "hinge" : "log"; }
std::string_view to_string(VotingMode m) noexcept { return m == VotingMode::Hard ? "hard" : "soft"; }

TrainConfig TrainConfig::defaults(ModelKind kind) {
    TrainConfig c;
    c.kind = kind;
    switch (kind) {
        case ModelKind::LinearSvm:
            c.epochs = 20;
            c.lambda = 1e-3;
            break;
        case ModelKind::Sgd:
            c.learning_rate = 0.01;
            c.epochs = 20;
            c.lambda = 1e-4;
            break;
        case ModelKind::Bagging:
            c.n_estimators = 10;
            c.members = {defaults(ModelKind::Cart)};
            break;
        default:
            break;
    }
    return c;
}

void TrainConfig::validate() const {
    auto bad = [](const std::string& m) { throw Error(ErrorCode::BadConfig, m); };
    switch (kind) {
        case ModelKind::Logistic:
        case ModelKind::Sgd:
            if (!(learning_rate > 0.0)) bad("learning_rate must be positive");
            [[fallthrough]];
        case ModelKind::LinearSvm:
            if (epochs < 1) bad("epochs must be at least 1");
            if (kind == ModelKind::LinearSvm ? !(lambda > 0.0) : !(lambda >= 0.0)) bad("lambda out of range");
            break;
        case ModelKind::Cart:
        case ModelKind::RandomForest:
            if (min_samples_split < 2) bad("min_samples_split must be at least 2");
            if (max_features < 0) bad("max_features must be non-negative");
            if (kind == ModelKind::RandomForest && n_estimators < 1) bad("n_estimators must be at least 1");
            break;
        case ModelKind::Knn:
            if (k < 1) bad("k must be at least 1");
            break;
        case ModelKind::GaussianNb:
            break;
        case ModelKind::Voting:
            if (members.empty()) throw Error(ErrorCode::NoMembers, "voting needs at least one member");
            for (const auto& m : members) m.validate();
            break;
        case ModelKind::Bagging:
            if (n_estimators < 1) bad("bagging needs at least one estimator");
            if (members.size() != 1) bad("bagging takes exactly one base model");
            members.front().validate();
            break;
    }
}

TrainConfig preset(std::string_view name) {
    const std::string v = to_lower_ascii(trim(name));
    if (v == "voting_rf_lr_knn") {
        auto c = TrainConfig::defaults(ModelKind::Voting);
        c.members = {TrainConfig::defaults(ModelKind::RandomForest), TrainConfig::defaults(ModelKind::Logistic),
                     TrainConfig::defaults(ModelKind::Knn)};
        return c;
    }
    if (v == "voting_lr_lsvm_cart") {
        auto c = TrainConfig::defaults(ModelKind::Voting);
        c.members = {TrainConfig::defaults(ModelKind::Logistic), TrainConfig::defaults(ModelKind::LinearSvm),
                     TrainConfig::defaults(ModelKind::Cart)};
        return c;
    }
    if (v == "bagging_dt") return TrainConfig::defaults(ModelKind::Bagging);
    if (v == "sgd_log") {
        auto c = TrainConfig::defaults(ModelKind::Sgd);
        c.loss = SgdLoss::Log;
        return c;
    }
    const auto k = parse_model_kind(v);
    if (!k || *k == ModelKind::Voting) throw Error(ErrorCode::Usage, "unknown model '" + std::string(name) + "'");
    return TrainConfig::defaults(*k);
}

std::vector<std::string> preset_names() {
    return {"logistic", "linear_svm", "sgd", "sgd_log", "cart", "random_forest", "knn", "gnb",
            "voting_rf_lr_knn", "voting_lr_lsvm_cart", "bagging_dt"};
}

// ---------------------------------------------------------------------------

Label Model::predict(std::span<const double> x) const {
    if (x.size() != dim_) {
        throw Error(ErrorCode::DimensionMismatch, "model expects " + std::to_string(dim_) + " features, got " +
                                                      std::to_string(x.size()));
    }
    return do_predict(x);
}

double Model::predict_proba(std::span<const double> x) const {
    if (!has_proba()) {
        throw Error(ErrorCode::NotSupported, std::string(to_string(kind())) + " does not estimate probabilities");
    }
    if (x.size() != dim_) {
        throw Error(ErrorCode::DimensionMismatch, "model expects " + std::to_string(dim_) + " features, got " +
                                                      std::to_string(x.size()));
    }
    return do_proba(x);
}

double Model::do_proba(std::span<const double>) const {
    throw Error(ErrorCode::NotSupported, "no probability estimate");
}

std::vector<Label> Model::predict_all(const std::vector<Vector>& rows) const {
    std::vector<Label> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(predict(r));
    return out;
}

// ---------------------------------------------------------------------------

std::unique_ptr<Model> train(const Dataset& data, const TrainConfig& cfg) {
    switch (cfg.kind) {
        case ModelKind::Logistic: return train_logistic(data, cfg);
        case ModelKind::LinearSvm: return train_linear_svm(data, cfg);
        case ModelKind::Sgd: return train_sgd(data, cfg);
        case ModelKind::Cart: return train_cart(data, cfg);
        case ModelKind::RandomForest: return train_random_forest(data, cfg);
        case ModelKind::Knn: return train_knn(data, cfg);
        case ModelKind::GaussianNb: return train_gnb(data, cfg);
        case ModelKind::Voting: return train_voting(data, cfg);
        case ModelKind::Bagging: return train_bagging(data, cfg);
    }
    throw Error(ErrorCode::BadConfig, "unknown model kind");
}

}  // namespace mwv::learn
