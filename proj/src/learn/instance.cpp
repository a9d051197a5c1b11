#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "mwv/error.hpp"
#include "mwv/learn.hpp"

namespace mwv::learn {

// ---------------------------------------------------------------------------
// KNN

KnnModel::KnnModel(Standardizer standardizer, std::vector<Vector> points, std::vector<Label> labels, int k)
    : Model(standardizer.dim()), std_(std::move(standardizer)), points_(std::move(points)), labels_(std::move(labels)), k_(k) {
    if (points_.size() != labels_.size()) throw Error(ErrorCode::ParseError, "knn points and labels differ in count");
    if (k_ < 1) throw Error(ErrorCode::BadConfig, "k must be at least 1");
    if (static_cast<std::size_t>(k_) > points_.size()) {
        throw Error(ErrorCode::KTooLarge, "k=" + std::to_string(k_) + " exceeds " + std::to_string(points_.size()) + " points");
    }
    for (const auto& p : points_) {
        if (p.size() != dim()) throw Error(ErrorCode::DimensionMismatch, "stored point has the wrong dimension");
    }
}

std::vector<std::size_t> KnnModel::neighbors(std::span<const double> x) const {
    if (x.size() != dim()) throw Error(ErrorCode::DimensionMismatch, "query has the wrong dimension");
    const Vector z = std_.transform(x);
    std::vector<std::pair<double, std::size_t>> dist(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j) {
            const double d = points_[i][j] - z[j];
            s += d * d;
        }
        dist[i] = {s, i};
    }
    const auto k = static_cast<std::size_t>(k_);
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = dist[i].second;
    return out;
}

Label KnnModel::do_predict(std::span<const double> x) const {
    std::size_t fake = 0;
    const auto nn = neighbors(x);
    for (std::size_t i : nn) fake += labels_[i] == Label::Misleading ? 1 : 0;
    return 2 * fake > nn.size() ? Label::Misleading : Label::Real;
}

std::unique_ptr<KnnModel> train_knn(const Dataset& data, const TrainConfig& cfg) {
    cfg.validate();
    data.validate();
    if (static_cast<std::size_t>(cfg.k) > data.size()) {
        throw Error(ErrorCode::KTooLarge, "k=" + std::to_string(cfg.k) + " exceeds " + std::to_string(data.size()) + " instances");
    }
    auto scaler = Standardizer::fit(data.x);
    auto z = scaler.transform_all(data.x);
    return std::make_unique<KnnModel>(std::move(scaler), std::move(z), data.y, cfg.k);
}

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

GaussianNbModel::GaussianNbModel(Standardizer standardizer, std::array<Vector, 2> means, std::array<Vector, 2> variances,
                                 std::array<double, 2> priors)
    : Model(standardizer.dim()), std_(std::move(standardizer)), means_(std::move(means)), vars_(std::move(variances)), priors_(priors) {
    for (int c = 0; c < 2; ++c) {
        if (means_[c].size() != dim() || vars_[c].size() != dim()) {
            throw Error(ErrorCode::DimensionMismatch, "naive Bayes parameters have the wrong dimension");
        }
        if (!(priors_[c] > 0.0 && priors_[c] < 1.0)) throw Error(ErrorCode::ParseError, "class prior out of range");
        for (double v : vars_[c]) {
            if (!(v > 0.0)) throw Error(ErrorCode::ParseError, "variance must be positive");
        }
    }
}

double GaussianNbModel::log_posterior(std::span<const double> x, Label c) const {
    const Vector z = std_.transform(x);
    const auto k = static_cast<std::size_t>(c == Label::Misleading ? 1 : 0);
    double lp = std::log(priors_[k]);
    for (std::size_t j = 0; j < z.size(); ++j) {
        const double v = vars_[k][j];
        const double d = z[j] - means_[k][j];
        lp += -0.5 * std::log(2.0 * std::numbers::pi * v) - d * d / (2.0 * v);
    }
    return lp;
}

double GaussianNbModel::do_proba(std::span<const double> x) const {
    const double r = log_posterior(x, Label::Real);
    const double f = log_posterior(x, Label::Misleading);
    // P(M) = 1 / (1 + exp(r - f))
    const double diff = r - f;
    if (diff >= 0.0) {
        const double e = std::exp(-diff);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(diff));
}

Label GaussianNbModel::do_predict(std::span<const double> x) const {
    return do_proba(x) >= 0.5 ? Label::Misleading : Label::Real;
}

std::unique_ptr<GaussianNbModel> train_gnb(const Dataset& data, const TrainConfig& cfg) {
    cfg.validate();
    data.validate();
    if (!data.has_both_classes()) throw Error(ErrorCode::DegenerateLabels, "naive Bayes needs both classes");
    auto scaler = Standardizer::fit(data.x);
    const auto z = scaler.transform_all(data.x);
    const std::size_t d = data.dim();
    std::array<Vector, 2> mean{Vector(d, 0.0), Vector(d, 0.0)};
    std::array<Vector, 2> var{Vector(d, 0.0), Vector(d, 0.0)};
    std::array<double, 2> count{0.0, 0.0};
    for (std::size_t i = 0; i < z.size(); ++i) {
        const std::size_t c = data.y[i] == Label::Misleading ? 1 : 0;
        count[c] += 1.0;
        for (std::size_t j = 0; j < d; ++j) mean[c][j] += z[i][j];
    }
    for (std::size_t c = 0; c < 2; ++c) {
        for (auto& m : mean[c]) m /= count[c];
    }
    for (std::size_t i = 0; i < z.size(); ++i) {
        const std::size_t c = data.y[i] == Label::Misleading ? 1 : 0;
        for (std::size_t j = 0; j < d; ++j) {
            const double dev = z[i][j] - mean[c][j];
            var[c][j] += dev * dev;
        }
    }
    for (std::size_t c = 0; c < 2; ++c) {
        for (auto& v : var[c]) v = std::max(v / count[c], GaussianNbModel::kVarianceFloor);
    }
    const double n = static_cast<double>(z.size());
    return std::make_unique<GaussianNbModel>(std::move(scaler), std::move(mean), std::move(var),
                                             std::array<double, 2>{count[0] / n, count[1] / n});
}

}  // namespace mwv::learn
