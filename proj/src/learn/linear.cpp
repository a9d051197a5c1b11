#include <algorithm>
#include <cmath>
#include <numeric>

#include "mwv/error.hpp"
#include "mwv/learn.hpp"

namespace mwv::learn {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double sigmoid(double m) {
    if (m >= 0.0) return 1.0 / (1.0 + std::exp(-m));
    const double e = std::exp(m);
    return e / (1.0 + e);
}

// log(1 + e^m) without overflow.
double softplus(double m) {
    return m > 0.0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
}

double y01(Label y) { return y == Label::Misleading ? 1.0 : 0.0; }
double ypm(Label y) { return y == Label::Misleading ? 1.0 : -1.0; }

void require_two_classes(const Dataset& data, std::string_view what) {
    data.validate();
    if (!data.has_both_classes()) {
        throw Error(ErrorCode::DegenerateLabels, std::string(what) + " needs both classes in the training set");
    }
}

// Gradient steps with learning_rate * lambda past the stability limit blow up instead of converging.
void require_finite(const Vector& w, double b, std::string_view what) {
    bool ok = std::isfinite(b);
    for (double v : w) ok = ok && std::isfinite(v);
    if (!ok) throw Error(ErrorCode::BadConfig, std::string(what) + " diverged; lower learning_rate or lambda");
}

}  // namespace

// ---------------------------------------------------------------------------

LinearModel::LinearModel(ModelKind kind, SgdLoss loss, Standardizer standardizer, Vector weights, double bias)
    : Model(weights.size()), kind_(kind), loss_(loss), std_(std::move(standardizer)), w_(std::move(weights)), b_(bias) {
    if (std_.dim() != w_.size()) throw Error(ErrorCode::DimensionMismatch, "weights and standardizer disagree");
}

bool LinearModel::has_proba() const noexcept {
    return kind_ == ModelKind::Logistic || (kind_ == ModelKind::Sgd && loss_ == SgdLoss::Log);
}

double LinearModel::decision_function(std::span<const double> x) const {
    const Vector z = std_.transform(x);
    return dot(w_, z) + b_;
}

Label LinearModel::do_predict(std::span<const double> x) const {
    if (has_proba()) return do_proba(x) >= 0.5 ? Label::Misleading : Label::Real;
    return decision_function(x) > 0.0 ? Label::Misleading : Label::Real;
}

double LinearModel::do_proba(std::span<const double> x) const {
    return sigmoid(decision_function(x));
}

// ---------------------------------------------------------------------------
// Objectives

double logistic_objective(const std::vector<Vector>& z, const std::vector<Label>& y, std::span<const double> w,
                          double b, double lambda) {
    double loss = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double m = dot(w, z[i]) + b;
        loss += softplus(m) - y01(y[i]) * m;
    }
    return loss / static_cast<double>(z.size()) + 0.5 * lambda * dot(w, w);
}

Vector logistic_gradient(const std::vector<Vector>& z, const std::vector<Label>& y, std::span<const double> w,
                         double b, double lambda) {
    const std::size_t d = w.size();
    Vector g(d + 1, 0.0);
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double r = sigmoid(dot(w, z[i]) + b) - y01(y[i]);
        for (std::size_t j = 0; j < d; ++j) g[j] += r * z[i][j];
        g[d] += r;
    }
    const double n = static_cast<double>(z.size());
    for (std::size_t j = 0; j < d; ++j) g[j] = g[j] / n + lambda * w[j];
    g[d] /= n;
    return g;
}

double sgd_instance_loss(SgdLoss loss, std::span<const double> z, Label y, std::span<const double> w, double b,
                         double lambda) {
    const double m = dot(w, z) + b;
    const double reg = 0.5 * lambda * dot(w, w);
    if (loss == SgdLoss::Hinge) return std::max(0.0, 1.0 - ypm(y) * m) + reg;
    return softplus(m) - y01(y) * m + reg;
}

Vector sgd_instance_gradient(SgdLoss loss, std::span<const double> z, Label y, std::span<const double> w, double b,
                             double lambda) {
    const std::size_t d = w.size();
    const double m = dot(w, z) + b;
    double r = 0.0;
    if (loss == SgdLoss::Hinge) {
        r = ypm(y) * m < 1.0 ? -ypm(y) : 0.0;
    } else {
        r = sigmoid(m) - y01(y);
    }
    Vector g(d + 1);
    for (std::size_t j = 0; j < d; ++j) g[j] = r * z[j] + lambda * w[j];
    g[d] = r;
    return g;
}

// ---------------------------------------------------------------------------
// Training

std::unique_ptr<LinearModel> train_logistic(const Dataset& data, const TrainConfig& cfg) {
    cfg.validate();
    require_two_classes(data, "logistic regression");
    auto scaler = Standardizer::fit(data.x);
    const auto z = scaler.transform_all(data.x);
    const std::size_t d = data.dim();
    Vector w(d, 0.0);
    double b = 0.0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const Vector g = logistic_gradient(z, data.y, w, b, cfg.lambda);
        for (std::size_t j = 0; j < d; ++j) w[j] -= cfg.learning_rate * g[j];
        b -= cfg.learning_rate * g[d];
    }
    require_finite(w, b, "logistic regression");
    return std::make_unique<LinearModel>(ModelKind::Logistic, SgdLoss::Log, std::move(scaler), std::move(w), b);
}

std::unique_ptr<LinearModel> train_linear_svm(const Dataset& data, const TrainConfig& cfg) {
    cfg.validate();
    require_two_classes(data, "linear svm");
    auto scaler = Standardizer::fit(data.x);
    const auto z = scaler.transform_all(data.x);
    const std::size_t d = data.dim();
    // Pegasos on [z, 1]: the bias is the last weight and is regularized with the rest.
    Vector w(d + 1, 0.0);
    const double radius = 1.0 / std::sqrt(cfg.lambda);
    Rng rng(cfg.seed);
    std::vector<std::size_t> order(z.size());
    std::iota(order.begin(), order.end(), 0);
    std::uint64_t t = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t i : order) {
            ++t;
            const double eta = 1.0 / (cfg.lambda * static_cast<double>(t));
            const double y = ypm(data.y[i]);
            const double m = dot(std::span<const double>(w).first(d), z[i]) + w[d];
            const double shrink = 1.0 - eta * cfg.lambda;
            for (auto& v : w) v *= shrink;
            if (y * m < 1.0) {
                for (std::size_t j = 0; j < d; ++j) w[j] += eta * y * z[i][j];
                w[d] += eta * y;
            }
            const double norm = std::sqrt(dot(w, w));
            if (norm > radius) {
                const double f = radius / norm;
                for (auto& v : w) v *= f;
            }
        }
    }
    const double b = w[d];
    w.pop_back();
    return std::make_unique<LinearModel>(ModelKind::LinearSvm, SgdLoss::Hinge, std::move(scaler), std::move(w), b);
}

std::unique_ptr<LinearModel> train_sgd(const Dataset& data, const TrainConfig& cfg) {
    cfg.validate();
    require_two_classes(data, "sgd");
    auto scaler = Standardizer::fit(data.x);
    const auto z = scaler.transform_all(data.x);
    const std::size_t d = data.dim();
    Vector w(d, 0.0);
    double b = 0.0;
    Rng rng(cfg.seed);
    std::vector<std::size_t> order(z.size());
    std::iota(order.begin(), order.end(), 0);
    std::uint64_t t = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t i : order) {
            const double eta = cfg.learning_rate / (1.0 + cfg.learning_rate * cfg.lambda * static_cast<double>(t));
            const Vector g = sgd_instance_gradient(cfg.loss, z[i], data.y[i], w, b, cfg.lambda);
            for (std::size_t j = 0; j < d; ++j) w[j] -= eta * g[j];
            b -= eta * g[d];
            ++t;
        }
    }
    require_finite(w, b, "sgd");
    return std::make_unique<LinearModel>(ModelKind::Sgd, cfg.loss, std::move(scaler), std::move(w), b);
}

}  // namespace mwv::learn
