#include <algorithm>
#include <numeric>

#include "mwv/error.hpp"
#include "mwv/learn.hpp"
#include "mwv/util.hpp"

namespace mwv::learn {

DecisionTree::DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw Error(ErrorCode::ParseError, "tree has no nodes");
    const int n = static_cast<int>(nodes_.size());
    for (int i = 0; i < n; ++i) {
        const auto& node = nodes_[static_cast<std::size_t>(i)];
        if (node.feature < 0) continue;
        // Children always follow their parent, which also rules out cycles.
        if (node.left <= i || node.right <= i || node.left >= n || node.right >= n) {
            throw Error(ErrorCode::ParseError, "tree node " + std::to_string(i) + " has invalid children");
        }
    }
}

Label DecisionTree::predict(std::span<const double> z) const {
    std::size_t i = 0;
    for (;;) {
        const auto& node = nodes_[i];
        if (node.feature < 0) return node.n_fake > node.n_real ? Label::Misleading : Label::Real;
        const auto f = static_cast<std::size_t>(node.feature);
        if (f >= z.size()) throw Error(ErrorCode::DimensionMismatch, "tree splits on a missing feature");
        i = static_cast<std::size_t>(z[f] <= node.threshold ? node.left : node.right);
    }
}

int DecisionTree::depth() const {
    std::vector<int> d(nodes_.size(), 0);
    int best = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& node = nodes_[i];
        best = std::max(best, d[i]);
        if (node.feature < 0) continue;
        d[static_cast<std::size_t>(node.left)] = d[i] + 1;
        d[static_cast<std::size_t>(node.right)] = d[i] + 1;
    }
    return best;
}

namespace {

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = 0.0;  // weighted child impurity times node size
};

double gini_mass(double real, double fake) {
    const double n = real + fake;
    if (n == 0.0) return 0.0;
    return n - (real * real + fake * fake) / n;
}

class TreeBuilder {
public:
    TreeBuilder(const std::vector<Vector>& z, const std::vector<Label>& y, const TreeParams& params, Rng* rng)
        : z_(z), y_(y), params_(params), rng_(rng), dim_(z.empty() ? 0 : z.front().size()) {}

    std::vector<TreeNode> build(std::vector<std::size_t> rows) {
        grow(std::move(rows), 0);
        return std::move(nodes_);
    }

private:
    int grow(std::vector<std::size_t> rows, int depth) {
        TreeNode node;
        for (std::size_t r : rows) (y_[r] == Label::Misleading ? node.n_fake : node.n_real) += 1;
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back(node);

        const bool pure = node.n_fake == 0 || node.n_real == 0;
        const bool depth_cap = params_.max_depth > 0 && depth >= params_.max_depth;
        if (pure || depth_cap || static_cast<int>(rows.size()) < params_.min_samples_split) return id;

        const auto split = best_split(rows);
        if (split.feature < 0) return id;

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        const auto f = static_cast<std::size_t>(split.feature);
        for (std::size_t r : rows) (z_[r][f] <= split.threshold ? left : right).push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        const int l = grow(std::move(left), depth + 1);
        const int r = grow(std::move(right), depth + 1);
        auto& n = nodes_[static_cast<std::size_t>(id)];
        n.feature = split.feature;
        n.threshold = split.threshold;
        n.left = l;
        n.right = r;
        return id;
    }

    std::vector<std::size_t> feature_order() {
        std::vector<std::size_t> order(dim_);
        std::iota(order.begin(), order.end(), 0);
        const bool subset = params_.max_features > 0 && static_cast<std::size_t>(params_.max_features) < dim_;
        if (subset) {
            if (!rng_) throw Error(ErrorCode::BadConfig, "feature subsampling needs a random source");
            rng_->shuffle(order);
        }
        return order;
    }

    Split best_split(const std::vector<std::size_t>& rows) {
        const auto order = feature_order();
        const std::size_t budget = params_.max_features > 0 ? static_cast<std::size_t>(params_.max_features) : dim_;
        Split best;
        std::vector<std::pair<double, Label>> col(rows.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            if (k >= budget && best.feature >= 0) break;
            const std::size_t f = order[k];
            for (std::size_t i = 0; i < rows.size(); ++i) col[i] = {z_[rows[i]][f], y_[rows[i]]};
            std::stable_sort(col.begin(), col.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
            double total_real = 0.0;
            double total_fake = 0.0;
            for (const auto& [v, l] : col) (l == Label::Misleading ? total_fake : total_real) += 1.0;
            double lr = 0.0;
            double lf = 0.0;
            for (std::size_t i = 0; i + 1 < col.size(); ++i) {
                (col[i].second == Label::Misleading ? lf : lr) += 1.0;
                const double a = col[i].first;
                const double b = col[i + 1].first;
                if (!(a < b)) continue;
                double thr = 0.5 * (a + b);
                if (!(thr < b)) thr = a;
                const double score = gini_mass(lr, lf) + gini_mass(total_real - lr, total_fake - lf);
                const bool better = best.feature < 0 || score < best.score ||
                                    (score == best.score && static_cast<int>(f) < best.feature);
                if (better) best = {static_cast<int>(f), thr, score};
            }
        }
        return best;
    }

    const std::vector<Vector>& z_;
    const std::vector<Label>& y_;
    TreeParams params_;
    Rng* rng_;
    std::size_t dim_;
    std::vector<TreeNode> nodes_;
};

std::size_t ceil_sqrt(std::size_t d) {
    std::size_t m = 1;
    while (m * m < d) ++m;
    return m;
}

TreeParams tree_params(const TrainConfig& cfg) {
    return {cfg.max_depth, cfg.min_samples_split, cfg.max_features};
}

}  // namespace

DecisionTree grow_tree(const std::vector<Vector>& z, const std::vector<Label>& y, std::span<const std::size_t> idx,
                       const TreeParams& params, Rng* rng) {
    if (idx.empty()) throw Error(ErrorCode::DegenerateLabels, "cannot grow a tree on no rows");
    TreeBuilder builder(z, y, params, rng);
    return DecisionTree(builder.build(std::vector<std::size_t>(idx.begin(), idx.end())));
}

// ---------------------------------------------------------------------------

CartModel::CartModel(Standardizer standardizer, DecisionTree tree)
    : Model(standardizer.dim()), std_(std::move(standardizer)), tree_(std::move(tree)) {}

Label CartModel::do_predict(std::span<const double> x) const {
    return tree_.predict(std_.transform(x));
}

std::optional<std::pair<int, double>> CartModel::root_split() const {
    const auto& root = tree_.nodes().front();
    if (root.feature < 0) return std::nullopt;
    return std::pair{root.feature, std_.inverse(static_cast<std::size_t>(root.feature), root.threshold)};
}

ForestModel::ForestModel(Standardizer standardizer, std::vector<DecisionTree> trees)
    : Model(standardizer.dim()), std_(std::move(standardizer)), trees_(std::move(trees)) {
    if (trees_.empty()) throw Error(ErrorCode::NoMembers, "forest has no trees");
}

Label ForestModel::do_predict(std::span<const double> x) const {
    const Vector z = std_.transform(x);
    std::size_t fake = 0;
    for (const auto& t : trees_) fake += t.predict(z) == Label::Misleading ? 1 : 0;
    return 2 * fake > trees_.size() ? Label::Misleading : Label::Real;
}

std::unique_ptr<CartModel> train_cart(const Dataset& data, const TrainConfig& cfg) {
    cfg.validate();
    data.validate();
    auto scaler = Standardizer::fit(data.x);
    const auto z = scaler.transform_all(data.x);
    std::vector<std::size_t> idx(z.size());
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(cfg.seed);
    auto tree = grow_tree(z, data.y, idx, tree_params(cfg), &rng);
    return std::make_unique<CartModel>(std::move(scaler), std::move(tree));
}

std::unique_ptr<ForestModel> train_random_forest(const Dataset& data, const TrainConfig& cfg) {
    cfg.validate();
    data.validate();
    auto scaler = Standardizer::fit(data.x);
    const auto z = scaler.transform_all(data.x);
    TreeParams params = tree_params(cfg);
    if (params.max_features == 0) params.max_features = static_cast<int>(ceil_sqrt(data.dim()));
    const std::size_t n = z.size();
    std::vector<DecisionTree> trees;
    trees.reserve(static_cast<std::size_t>(cfg.n_estimators));
    for (int t = 0; t < cfg.n_estimators; ++t) {
        Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> idx(n);
        if (cfg.bootstrap) {
            for (auto& i : idx) i = static_cast<std::size_t>(rng.below(n));
        } else {
            std::iota(idx.begin(), idx.end(), 0);
        }
        trees.push_back(grow_tree(z, data.y, idx, params, &rng));
    }
    return std::make_unique<ForestModel>(std::move(scaler), std::move(trees));
}

}  // namespace mwv::learn
