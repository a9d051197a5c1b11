#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mwv/error.hpp"
#include "mwv/eval.hpp"
#include "mwv/util.hpp"

namespace mwv::eval {

using ordered_json = nlohmann::ordered_json;

std::vector<ModelSpec> default_models() {
    std::vector<ModelSpec> out;
    for (const char* name : {"random_forest", "linear_svm", "logistic", "sgd", "voting_rf_lr_knn", "voting_lr_lsvm_cart",
                             "bagging_dt"}) {
        out.push_back({name, learn::preset(name)});
    }
    return out;
}

learn::Dataset design_matrix(const LabeledFeatures& data, features::Scope scope) {
    std::map<std::string, const features::FeatureRow*> by_id;
    const auto rows = features::select_scope(data.rows, scope);
    for (const auto& r : rows) by_id[r.claim_id] = &r;
    learn::Dataset ds;
    for (const auto& [id, label] : data.labels) {
        auto it = by_id.find(id);
        if (it == by_id.end()) {
            throw Error(ErrorCode::MissingFeatures, "no " + std::string(features::to_string(scope)) +
                                                        " features for claim '" + id + "'");
        }
        ds.add(it->second->values, label);
    }
    return ds;
}

ExperimentReport run_experiment(const ExperimentInputs& inputs) {
    if (inputs.models.empty()) throw Error(ErrorCode::BadConfig, "experiment lists no models");
    if (inputs.scopes.empty()) throw Error(ErrorCode::BadConfig, "experiment lists no scopes");
    ExperimentReport report;
    report.eval_split = inputs.eval_split;
    report.seed = inputs.seed;

    std::vector<learn::Dataset> train_sets;
    std::vector<learn::Dataset> eval_sets;
    for (auto scope : inputs.scopes) {
        train_sets.push_back(design_matrix(inputs.train, scope));
        eval_sets.push_back(design_matrix(inputs.eval, scope));
        if (eval_sets.back().size() == 0) throw Error(ErrorCode::EmptyEvaluation, "evaluation split is empty");
    }
    for (std::size_t m = 0; m < inputs.models.size(); ++m) {
        learn::TrainConfig cfg = inputs.models[m].config;
        cfg.seed = mix_seed(inputs.seed, m);
        for (std::size_t s = 0; s < inputs.scopes.size(); ++s) {
            const auto model = learn::train(train_sets[s], cfg);
            const auto predicted = model->predict_all(eval_sets[s].x);
            ExperimentRow row;
            row.model = inputs.models[m].name;
            row.scope = inputs.scopes[s];
            row.n_train = train_sets[s].size();
            row.n_eval = eval_sets[s].size();
            row.metrics = compute_metrics(tally(eval_sets[s].y, predicted));
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

namespace {

ordered_json averaged_json(const Averaged& a) {
    ordered_json j;
    j["precision"] = a.precision;
    j["recall"] = a.recall;
    j["f1"] = a.f1;
    return j;
}

ordered_json class_json(const ClassMetrics& c) {
    ordered_json j;
    j["precision"] = c.precision;
    j["recall"] = c.recall;
    j["f1"] = c.f1;
    j["support"] = c.support;
    return j;
}

ordered_json metrics_object(const MetricsReport& m) {
    ordered_json j;
    j["confusion"] = {{"tp", m.cm.tp}, {"fp", m.cm.fp}, {"fn", m.cm.fn}, {"tn", m.cm.tn}};
    j["accuracy"] = m.accuracy;
    j["fake"] = class_json(m.fake);
    j["real"] = class_json(m.real);
    j["macro"] = averaged_json(m.macro);
    j["micro"] = averaged_json(m.micro);
    j["weighted"] = averaged_json(m.weighted);
    j["undefined"] = m.undefined;
    return j;
}

}  // namespace

std::string metrics_json(const MetricsReport& m) {
    return metrics_object(m).dump(2) + "\n";
}

std::string report_json(const ExperimentReport& report) {
    ordered_json j;
    j["eval_split"] = report.eval_split;
    j["seed"] = report.seed;
    ordered_json rows = ordered_json::array();
    for (const auto& r : report.rows) {
        ordered_json row;
        row["model"] = r.model;
        row["scope"] = std::string(features::to_string(r.scope));
        // Headline columns use support-weighted averaging.
        row["precision"] = r.metrics.weighted.precision;
        row["recall"] = r.metrics.weighted.recall;
        row["f1"] = r.metrics.weighted.f1;
        row["accuracy"] = r.metrics.accuracy;
        row["averaging"] = "weighted";
        row["n_train"] = r.n_train;
        row["n_eval"] = r.n_eval;
        row["metrics"] = metrics_object(r.metrics);
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

std::string report_table(const ExperimentReport& report) {
    std::ostringstream out;
    char line[200];
    std::snprintf(line, sizeof line, "%-22s %-8s %9s %9s %9s %9s\n", "model", "scope", "precision", "recall", "f1",
                  "accuracy");
    out << line;
    for (const auto& r : report.rows) {
        std::snprintf(line, sizeof line, "%-22s %-8s %9.4f %9.4f %9.4f %9.4f\n", r.model.c_str(),
                      std::string(features::to_string(r.scope)).c_str(), r.metrics.weighted.precision,
                      r.metrics.weighted.recall, r.metrics.weighted.f1, r.metrics.accuracy);
        out << line;
    }
    out << "(weighted averages; split: " << report.eval_split << ")\n";
    return out.str();
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    const auto base = path.parent_path();
    auto resolve = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_string()) throw Error(ErrorCode::BadConfig, std::string("spec needs '") + key + "'");
        std::filesystem::path p = j[key].get<std::string>();
        return p.is_absolute() ? p : base / p;
    };
    ExperimentSpec spec;
    try {
        spec.train_features = resolve("train_features");
        spec.train_labels = resolve("train_labels");
        spec.eval_features = resolve("eval_features");
        spec.eval_labels = resolve("eval_labels");
        spec.eval_split = j.value("eval_split", std::string("test"));
        if (j.contains("scopes")) {
            spec.scopes.clear();
            for (const auto& s : j["scopes"]) {
                const auto scope = features::parse_scope(s.get<std::string>());
                if (!scope) throw Error(ErrorCode::BadConfig, "unknown scope " + s.get<std::string>());
                spec.scopes.push_back(*scope);
            }
        }
        if (j.contains("models")) spec.models = j["models"].get<std::vector<std::string>>();
        if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BadConfig, path.string() + ": " + e.what());
    }
    return spec;
}

ExperimentInputs load_experiment_inputs(const ExperimentSpec& spec, std::uint64_t seed) {
    ExperimentInputs in;
    in.train.rows = features::read_feature_csv_file(spec.train_features);
    in.train.labels = label_map(load_dataset(spec.train_labels));
    in.eval.rows = features::read_feature_csv_file(spec.eval_features);
    in.eval.labels = label_map(load_dataset(spec.eval_labels));
    in.eval_split = spec.eval_split;
    in.scopes = spec.scopes;
    if (!spec.models.empty()) {
        in.models.clear();
        for (const auto& name : spec.models) in.models.push_back({name, learn::preset(name)});
    }
    in.seed = seed;
    return in;
}

}  // namespace mwv::eval
