#include <json.hpp>

#include <fstream>
#include <sstream>

#include "mwv/error.hpp"
#include "mwv/learn.hpp"
#include "mwv/util.hpp"

namespace mwv::learn {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

namespace {

ordered_json standardizer_json(const Standardizer& s) {
    ordered_json j;
    j["mean"] = s.mean();
    j["scale"] = s.scale();
    return j;
}

Standardizer standardizer_from(const json& j) {
    return Standardizer(j.at("mean").get<Vector>(), j.at("scale").get<Vector>());
}

ordered_json tree_json(const DecisionTree& t) {
    ordered_json nodes = ordered_json::array();
    for (const auto& n : t.nodes()) {
        // [feature, threshold, left, right, n_real, n_fake]
        nodes.push_back(ordered_json::array({n.feature, n.threshold, n.left, n.right, n.n_real, n.n_fake}));
    }
    return nodes;
}

DecisionTree tree_from(const json& j) {
    std::vector<TreeNode> nodes;
    for (const auto& a : j) {
        if (!a.is_array() || a.size() != 6) throw Error(ErrorCode::ParseError, "tree node must have 6 fields");
        TreeNode n;
        n.feature = a[0].get<int>();
        n.threshold = a[1].get<double>();
        n.left = a[2].get<int>();
        n.right = a[3].get<int>();
        n.n_real = a[4].get<int>();
        n.n_fake = a[5].get<int>();
        nodes.push_back(n);
    }
    return DecisionTree(std::move(nodes));
}

int label_code(Label l) { return l == Label::Misleading ? 1 : 0; }

Label label_from(const json& j) {
    const int v = j.get<int>();
    if (v != 0 && v != 1) throw Error(ErrorCode::ParseError, "label must be 0 or 1");
    return v == 1 ? Label::Misleading : Label::Real;
}

ordered_json to_json(const Model& model) {
    ordered_json j;
    j["format_version"] = kModelFormatVersion;
    j["kind"] = std::string(to_string(model.kind()));
    j["dim"] = model.dim();
    ordered_json params;
    switch (model.kind()) {
        case ModelKind::Logistic:
        case ModelKind::LinearSvm:
        case ModelKind::Sgd: {
            const auto& m = dynamic_cast<const LinearModel&>(model);
            j["standardizer"] = standardizer_json(m.standardizer());
            params["loss"] = std::string(to_string(m.loss()));
            params["weights"] = m.weights();
            params["bias"] = m.bias();
            break;
        }
        case ModelKind::Cart: {
            const auto& m = dynamic_cast<const CartModel&>(model);
            j["standardizer"] = standardizer_json(m.standardizer());
            params["nodes"] = tree_json(m.tree());
            break;
        }
        case ModelKind::RandomForest: {
            const auto& m = dynamic_cast<const ForestModel&>(model);
            j["standardizer"] = standardizer_json(m.standardizer());
            params["trees"] = ordered_json::array();
            for (const auto& t : m.trees()) params["trees"].push_back(tree_json(t));
            break;
        }
        case ModelKind::Knn: {
            const auto& m = dynamic_cast<const KnnModel&>(model);
            j["standardizer"] = standardizer_json(m.standardizer());
            params["k"] = m.k();
            params["points"] = m.points();
            ordered_json labels = ordered_json::array();
            for (Label l : m.labels()) labels.push_back(label_code(l));
            params["labels"] = labels;
            break;
        }
        case ModelKind::GaussianNb: {
            const auto& m = dynamic_cast<const GaussianNbModel&>(model);
            j["standardizer"] = standardizer_json(m.standardizer());
            params["means"] = {m.means()[0], m.means()[1]};
            params["variances"] = {m.variances()[0], m.variances()[1]};
            params["priors"] = {m.priors()[0], m.priors()[1]};
            break;
        }
        case ModelKind::Voting:
        case ModelKind::Bagging: {
            const auto& m = dynamic_cast<const EnsembleModel&>(model);
            j["standardizer"] = nullptr;
            params["voting"] = std::string(to_string(m.mode()));
            params["members"] = ordered_json::array();
            for (std::size_t i = 0; i < m.member_count(); ++i) params["members"].push_back(to_json(m.member(i)));
            break;
        }
    }
    j["params"] = std::move(params);
    return j;
}

std::unique_ptr<Model> from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "model must be a JSON object");
    if (!j.contains("format_version") || !j["format_version"].is_number_integer()) {
        throw Error(ErrorCode::ParseError, "model lacks an integer format_version");
    }
    const int version = j["format_version"].get<int>();
    if (version != kModelFormatVersion) {
        throw Error(ErrorCode::IncompatibleModel, "format_version " + std::to_string(version) + " (supported: " +
                                                      std::to_string(kModelFormatVersion) + ")");
    }
    const auto kind = parse_model_kind(j.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::ParseError, "unknown model kind");
    const auto dim = j.at("dim").get<std::size_t>();
    const auto& p = j.at("params");
    std::unique_ptr<Model> model;
    switch (*kind) {
        case ModelKind::Logistic:
        case ModelKind::LinearSvm:
        case ModelKind::Sgd: {
            const auto loss_name = p.at("loss").get<std::string>();
            if (loss_name != "hinge" && loss_name != "log") throw Error(ErrorCode::ParseError, "unknown loss");
            model = std::make_unique<LinearModel>(*kind, loss_name == "log" ? SgdLoss::Log : SgdLoss::Hinge,
                                                  standardizer_from(j.at("standardizer")), p.at("weights").get<Vector>(),
                                                  p.at("bias").get<double>());
            break;
        }
        case ModelKind::Cart:
            model = std::make_unique<CartModel>(standardizer_from(j.at("standardizer")), tree_from(p.at("nodes")));
            break;
        case ModelKind::RandomForest: {
            std::vector<DecisionTree> trees;
            for (const auto& t : p.at("trees")) trees.push_back(tree_from(t));
            model = std::make_unique<ForestModel>(standardizer_from(j.at("standardizer")), std::move(trees));
            break;
        }
        case ModelKind::Knn: {
            std::vector<Label> labels;
            for (const auto& l : p.at("labels")) labels.push_back(label_from(l));
            model = std::make_unique<KnnModel>(standardizer_from(j.at("standardizer")),
                                               p.at("points").get<std::vector<Vector>>(), std::move(labels),
                                               p.at("k").get<int>());
            break;
        }
        case ModelKind::GaussianNb: {
            const auto means = p.at("means").get<std::vector<Vector>>();
            const auto vars = p.at("variances").get<std::vector<Vector>>();
            const auto priors = p.at("priors").get<std::vector<double>>();
            if (means.size() != 2 || vars.size() != 2 || priors.size() != 2) {
                throw Error(ErrorCode::ParseError, "naive Bayes needs parameters for two classes");
            }
            model = std::make_unique<GaussianNbModel>(standardizer_from(j.at("standardizer")),
                                                      std::array<Vector, 2>{means[0], means[1]},
                                                      std::array<Vector, 2>{vars[0], vars[1]},
                                                      std::array<double, 2>{priors[0], priors[1]});
            break;
        }
        case ModelKind::Voting:
        case ModelKind::Bagging: {
            const auto mode = p.at("voting").get<std::string>();
            if (mode != "hard" && mode != "soft") throw Error(ErrorCode::ParseError, "unknown voting mode");
            std::vector<std::unique_ptr<Model>> members;
            for (const auto& m : p.at("members")) members.push_back(from_json(m));
            model = std::make_unique<EnsembleModel>(*kind, mode == "soft" ? VotingMode::Soft : VotingMode::Hard,
                                                    std::move(members));
            break;
        }
    }
    if (model->dim() != dim) throw Error(ErrorCode::ParseError, "stored dim does not match the parameters");
    return model;
}

}  // namespace

void save_model(const Model& model, std::ostream& out) {
    out << to_json(model).dump() << '\n';
    if (!out) throw Error(ErrorCode::IoError, "failed writing model");
}

void save_model_file(const Model& model, const std::filesystem::path& path) {
    std::ostringstream out;
    save_model(model, out);
    write_file_atomic(path, out.str());
}

std::unique_ptr<Model> load_model(std::istream& in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("model file: ") + e.what());
    }
    try {
        return from_json(j);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("model file: ") + e.what());
    }
}

std::unique_ptr<Model> load_model_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return load_model(in);
}

}  // namespace mwv::learn
