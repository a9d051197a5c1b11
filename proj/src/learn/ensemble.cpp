#include <numeric>

#include "mwv/error.hpp"
#include "mwv/learn.hpp"
#include "mwv/util.hpp"

namespace mwv::learn {

EnsembleModel::EnsembleModel(ModelKind kind, VotingMode mode, std::vector<std::unique_ptr<Model>> members)
    : Model(members.empty() ? 0 : members.front()->dim()), kind_(kind), mode_(mode), members_(std::move(members)) {
    if (members_.empty()) throw Error(ErrorCode::NoMembers, "ensemble has no members");
    for (const auto& m : members_) {
        if (!m) throw Error(ErrorCode::NoMembers, "null ensemble member");
        if (m->dim() != dim()) throw Error(ErrorCode::DimensionMismatch, "ensemble members disagree on dimension");
    }
}

double EnsembleModel::do_proba(std::span<const double> x) const {
    double s = 0.0;
    for (const auto& m : members_) {
        s += m->has_proba() ? m->predict_proba(x) : (m->predict(x) == Label::Misleading ? 1.0 : 0.0);
    }
    return s / static_cast<double>(members_.size());
}

Label EnsembleModel::do_predict(std::span<const double> x) const {
    if (mode_ == VotingMode::Soft) return do_proba(x) >= 0.5 ? Label::Misleading : Label::Real;
    std::size_t fake = 0;
    for (const auto& m : members_) fake += m->predict(x) == Label::Misleading ? 1 : 0;
    return 2 * fake > members_.size() ? Label::Misleading : Label::Real;
}

std::unique_ptr<EnsembleModel> train_voting(const Dataset& data, const TrainConfig& cfg) {
    if (cfg.members.empty()) throw Error(ErrorCode::NoMembers, "voting needs at least one member");
    cfg.validate();
    std::vector<std::unique_ptr<Model>> members;
    for (std::size_t i = 0; i < cfg.members.size(); ++i) {
        TrainConfig m = cfg.members[i];
        m.seed = mix_seed(cfg.seed, i);
        members.push_back(train(data, m));
    }
    return std::make_unique<EnsembleModel>(ModelKind::Voting, cfg.voting, std::move(members));
}

std::unique_ptr<EnsembleModel> train_bagging(const Dataset& data, const TrainConfig& cfg) {
    cfg.validate();
    data.validate();
    const std::size_t n = data.size();
    std::vector<std::unique_ptr<Model>> members;
    for (int b = 0; b < cfg.n_estimators; ++b) {
        const auto seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(b));
        Rng rng(seed);
        Dataset sample;
        if (cfg.bootstrap) {
            for (std::size_t i = 0; i < n; ++i) {
                const auto r = static_cast<std::size_t>(rng.below(n));
                sample.add(data.x[r], data.y[r]);
            }
        } else {
            sample = data;
        }
        TrainConfig base = cfg.members.front();
        base.seed = mix_seed(seed, 1);
        members.push_back(train(sample, base));
    }
    return std::make_unique<EnsembleModel>(ModelKind::Bagging, VotingMode::Hard, std::move(members));
}

}  // namespace mwv::learn
