// mwv: command line front end for the misleading-claim verifier.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "mwv/error.hpp"
#include "mwv/eval.hpp"
#include "mwv/features.hpp"
#include "mwv/learn.hpp"
#include "mwv/pipeline.hpp"
#include "mwv/util.hpp"

namespace {

using namespace mwv;
using pipeline::PipelineConfig;

// Pipeline settings shared by collect, featurize, verify and batch. Flags are applied on top of
// the --config file, so flags win.
struct PipelineFlags {
    std::string config;
    std::map<std::string, std::string> values;

    void add(CLI::App* app, bool models) {
        app->add_option("--config", config, "key = value configuration file")->check(CLI::ExistingFile);
        auto opt = [&](const char* flag, const char* key, const char* help) {
            app->add_option_function<std::string>(flag, [this, key](const std::string& v) { values[key] = v; }, help);
        };
        opt("--build-case", "build_case", "query build case: 1, 2:<n> or 3");
        opt("--providers", "providers", "comma list of google, youtube");
        opt("--mode", "mode", "live, record or replay");
        opt("--fixtures", "fixtures", "fixture directory");
        opt("--threshold,--tau", "threshold", "relevance gate in [0, 1]");
        opt("--data-dir", "data_dir", "resource directory");
        opt("--match-mode", "match_mode", "fake phrase matching: substring or word");
        opt("--stem", "stem", "stem tokens before cosine similarity (true|false)");
        opt("--timeout-ms", "timeout_ms", "HTTP timeout per request");
        opt("--retries", "retries", "HTTP retries");
        opt("--polite-delay-ms", "polite_delay_ms", "pause between live requests");
        if (models) {
            opt("--model-google", "model_google", "model for the Google scope");
            opt("--model-youtube", "model_youtube", "model for the YouTube scope");
            opt("--model-hybrid", "model_hybrid", "model for the hybrid scope");
            opt("--vote-rule", "vote_rule", "majority or hybrid-only");
            opt("--tie-break", "tie_break", "label for a two-voter tie: fake or real");
            opt("--seed", "seed", "seed recorded with the run");
            opt("--workers", "workers", "batch worker threads");
        }
    }

    PipelineConfig build() const {
        PipelineConfig cfg;
        if (!config.empty()) cfg.merge_file(config);
        for (const auto& [k, v] : values) cfg.set(k, v);
        return cfg;
    }
};

void write_out(const std::string& path, const std::string& contents) {
    if (path.empty() || path == "-") {
        std::cout << contents;
    } else {
        write_file_atomic(path, contents);
    }
}

features::Scope scope_arg(const std::string& s) {
    const auto scope = features::parse_scope(s);
    if (!scope) throw Error(ErrorCode::Usage, "unknown scope '" + s + "' (google, youtube, hybrid)");
    return *scope;
}

// Scope for a feature file: explicit, or the only scope the file holds.
features::Scope infer_scope(const std::vector<features::FeatureRow>& rows, const std::string& requested) {
    if (!requested.empty()) return scope_arg(requested);
    std::optional<features::Scope> only;
    for (const auto& r : rows) {
        if (only && *only != r.scope) throw Error(ErrorCode::Usage, "feature file mixes scopes; pass --scope");
        only = r.scope;
    }
    if (!only) throw Error(ErrorCode::EmptyEvaluation, "feature file has no rows");
    return *only;
}

// ---------------------------------------------------------------------------

struct CollectArgs {
    PipelineFlags flags;
    std::string input;
    std::string out;
};

int run_collect(const CollectArgs& a) {
    const PipelineConfig cfg = a.flags.build();
    if (cfg.mode != evidence::EvidenceMode::Live && cfg.fixtures.empty()) {
        throw Error(ErrorCode::BadConfig, "--fixtures is required in record and replay modes");
    }
    const auto res = pipeline::Resources::load(cfg);
    const auto collector = pipeline::make_collector(cfg);
    eval::LoadOptions opts;
    opts.require_label = false;
    const auto claims = eval::to_claims(eval::load_dataset(a.input, opts));
    std::string out;
    std::size_t titles = 0;
    for (const auto& claim : claims) {
        for (const auto& e : pipeline::collect_claim(claim, cfg, res, *collector)) {
            titles += e.merged.titles.size();
            out += pipeline::evidence_json(e);
            out += '\n';
        }
    }
    write_out(a.out, out);
    std::cerr << "collected " << titles << " titles for " << claims.size() << " claims\n";
    return 0;
}

struct QueriesArgs {
    PipelineFlags flags;
    std::string input;
    std::string out;
};

// Built queries with the fixture file each enabled platform would read; for preparing fixtures.
int run_queries(const QueriesArgs& a) {
    const PipelineConfig cfg = a.flags.build();
    const auto res = pipeline::Resources::load(cfg);
    eval::LoadOptions opts;
    opts.require_label = false;
    std::string out;
    for (const auto& claim : eval::to_claims(eval::load_dataset(a.input, opts))) {
        for (const auto& q : build_queries(claim, cfg.strategy, res.stopwords, res.tagger)) {
            nlohmann::ordered_json j;
            j["claim_id"] = q.claim_id;
            j["query"] = q.text;
            j["content"] = q.content;
            j["fallback"] = q.fallback;
            auto& files = j["fixtures"];
            for (auto platform : cfg.providers) {
                files[std::string(evidence::to_string(platform))] = evidence::FixtureStore::key(platform, q.text) + ".jsonl";
            }
            out += j.dump() + '\n';
        }
    }
    write_out(a.out, out);
    return 0;
}

struct FeaturizeArgs {
    PipelineFlags flags;
    std::string claims;
    std::string evidence;
    std::string out;
    std::string hybrid_out;
};

int run_featurize(const FeaturizeArgs& a) {
    PipelineConfig cfg = a.flags.build();
    const auto res = pipeline::Resources::load(cfg);
    eval::LoadOptions opts;
    opts.require_label = false;
    const auto claims = eval::to_claims(eval::load_dataset(a.claims, opts));
    const auto ev = pipeline::read_evidence_file(a.evidence);
    const auto r = pipeline::featurize(claims, ev, pipeline::make_context(res, cfg), cfg.tau);
    std::ostringstream platform;
    features::write_platform_csv(platform, r.platform_rows);
    write_out(a.out, platform.str());
    if (!a.hybrid_out.empty()) {
        std::ostringstream hybrid;
        features::write_hybrid_csv(hybrid, r.hybrid_rows);
        write_out(a.hybrid_out, hybrid.str());
    }
    return 0;
}

struct TrainArgs {
    std::string features;
    std::string labels;
    std::string scope;
    std::string model = "logistic";
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<int> k, n_estimators, max_depth, epochs, max_features;
    std::optional<double> learning_rate, lambda;
    std::string loss, voting, members;
};

int run_train(const TrainArgs& a) {
    const auto rows = features::read_feature_csv_file(a.features);
    const auto scope = infer_scope(rows, a.scope);
    eval::LabeledFeatures data{rows, eval::label_map(eval::load_dataset(a.labels))};
    const auto ds = eval::design_matrix(data, scope);

    learn::TrainConfig cfg = learn::preset(a.model);
    cfg.seed = *a.seed;
    if (a.k) cfg.k = *a.k;
    if (a.n_estimators) cfg.n_estimators = *a.n_estimators;
    if (a.max_depth) cfg.max_depth = *a.max_depth;
    if (a.epochs) cfg.epochs = *a.epochs;
    if (a.max_features) cfg.max_features = *a.max_features;
    if (a.learning_rate) cfg.learning_rate = *a.learning_rate;
    if (a.lambda) cfg.lambda = *a.lambda;
    if (!a.loss.empty()) {
        if (a.loss == "hinge") {
            cfg.loss = learn::SgdLoss::Hinge;
        } else if (a.loss == "log") {
            cfg.loss = learn::SgdLoss::Log;
        } else {
            throw Error(ErrorCode::Usage, "--loss expects hinge or log");
        }
    }
    if (!a.voting.empty()) {
        if (a.voting == "hard") {
            cfg.voting = learn::VotingMode::Hard;
        } else if (a.voting == "soft") {
            cfg.voting = learn::VotingMode::Soft;
        } else {
            throw Error(ErrorCode::Usage, "--voting expects hard or soft");
        }
    }
    if (!a.members.empty()) {
        cfg.members.clear();
        for (const auto& m : split(a.members, ',')) cfg.members.push_back(learn::preset(trim(m)));
    }
    const auto model = learn::train(ds, cfg);
    learn::save_model_file(*model, a.out);
    const auto fitted = model->predict_all(ds.x);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < fitted.size(); ++i) correct += fitted[i] == ds.y[i] ? 1 : 0;
    std::cerr << to_string(cfg.kind) << " on " << features::to_string(scope) << ": " << ds.size()
              << " claims, training accuracy " << format_double(static_cast<double>(correct) / ds.size()) << "\n";
    return 0;
}

struct PredictArgs {
    std::string model;
    std::string features;
    std::string scope;
    std::string out;
};

int run_predict(const PredictArgs& a) {
    const auto model = learn::load_model_file(a.model);
    const auto all = features::read_feature_csv_file(a.features);
    const auto scope = infer_scope(all, a.scope);
    std::string out;
    for (const auto& r : features::select_scope(all, scope)) {
        nlohmann::ordered_json j;
        j["claim_id"] = r.claim_id;
        j["scope"] = std::string(features::to_string(scope));
        j["label"] = std::string(to_string(model->predict(r.values)));
        j["probability"] = model->has_proba() ? nlohmann::ordered_json(model->predict_proba(r.values)) : nullptr;
        out += j.dump() + "\n";
    }
    write_out(a.out, out);
    return 0;
}

struct EvaluateArgs {
    std::string pred;
    std::string gold;
    std::string report;
    bool skip_missing = false;
};

// Predictions: JSON lines with "claim_id" and "label" (predict) or "final" (verify, batch).
std::map<std::string, Label> read_predictions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::map<std::string, Label> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const std::string where = path + " line " + std::to_string(lineno);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ParseError, where + ": " + e.what());
        }
        if (!j.contains("claim_id")) throw Error(ErrorCode::ParseError, where + ": no claim_id");
        const char* field = j.contains("label") ? "label" : (j.contains("final") ? "final" : nullptr);
        if (!field) continue;  // per-claim error entries carry no label
        const auto l = parse_label(j[field].get<std::string>());
        if (!l) throw Error(ErrorCode::BadLabel, where + ": '" + j[field].get<std::string>() + "'");
        if (!out.emplace(j["claim_id"].get<std::string>(), *l).second) {
            throw Error(ErrorCode::DuplicateId, where + ": claim '" + j["claim_id"].get<std::string>() + "' predicted twice");
        }
    }
    return out;
}

int run_evaluate(const EvaluateArgs& a) {
    const auto pred = read_predictions(a.pred);
    const auto gold = eval::load_dataset(a.gold);
    std::vector<Label> y;
    std::vector<Label> p;
    std::size_t missing = 0;
    for (const auto& g : gold) {
        const auto it = pred.find(g.id);
        if (it == pred.end()) {
            if (!a.skip_missing) throw Error(ErrorCode::MissingFeatures, "no prediction for claim '" + g.id + "'");
            ++missing;
            continue;
        }
        y.push_back(g.label);
        p.push_back(it->second);
    }
    const auto m = eval::compute_metrics(eval::tally(y, p));
    write_out(a.report, eval::metrics_json(m));
    char line[160];
    std::snprintf(line, sizeof line, "n=%zu accuracy=%.4f  weighted P=%.4f R=%.4f F1=%.4f  macro F1=%.4f\n", y.size(),
                  m.accuracy, m.weighted.precision, m.weighted.recall, m.weighted.f1, m.macro.f1);
    std::cerr << line;
    if (missing) std::cerr << missing << " gold claims had no prediction and were skipped\n";
    return 0;
}

struct VerifyArgs {
    PipelineFlags flags;
    std::string text;
    std::string id = "claim";
    std::string image;
};

int run_verify(const VerifyArgs& a) {
    if (!a.image.empty()) pipeline::extract_image_text(a.image);
    const pipeline::Pipeline p(a.flags.build());
    std::cout << pipeline::verdict_json(p.verify_text(pipeline::translate_to_english(a.text), a.id)) << "\n";
    return 0;
}

struct BatchArgs {
    PipelineFlags flags;
    std::string input;
    std::string out;
    bool fail_fast = false;
};

int run_batch(const BatchArgs& a) {
    PipelineConfig cfg = a.flags.build();
    if (a.fail_fast) cfg.fail_fast = true;
    const pipeline::Pipeline p(std::move(cfg));
    const auto r = pipeline::run_batch_file(p, a.input, a.out);
    std::cerr << r.verdict_count() << " verdicts, " << r.error_count() << " errors\n";
    return 0;
}

struct ExperimentArgs {
    std::string spec;
    std::optional<std::uint64_t> seed;
    std::string report;
    std::string split;
};

int run_experiment(const ExperimentArgs& a) {
    auto spec = eval::load_experiment_spec(a.spec);
    if (!a.split.empty()) spec.eval_split = a.split;
    const auto report = eval::run_experiment(eval::load_experiment_inputs(spec, *a.seed));
    if (!a.report.empty()) write_file_atomic(a.report, eval::report_json(report));
    std::cout << eval::report_table(report);
    return 0;
}

struct CheckSplitsArgs {
    std::string dir;
    bool strict = false;
    bool dedup = false;
};

int run_check_splits(const CheckSplitsArgs& a) {
    const auto files = eval::locate_split_files(a.dir);
    if (!files) throw Error(ErrorCode::IoError, "no train/val/test files under " + a.dir);
    eval::LoadOptions opts;
    opts.dedup = a.dedup;
    const auto check = eval::verify_split_counts(eval::load_splits(*files, opts), a.strict);
    std::cout << eval::format_split_check(check);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mwv: verify claims against web search evidence"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(pipeline::kToolVersion));

    CollectArgs collect;
    auto* c = app.add_subcommand("collect", "collect evidence titles for every claim of a dataset");
    c->add_option("--input", collect.input, "claims (TSV/CSV with id and text columns)")->required();
    c->add_option("--out", collect.out, "evidence JSON lines (- for stdout)")->required();
    collect.flags.add(c, false);

    QueriesArgs queries;
    auto* q = app.add_subcommand("queries", "print each claim's search queries and their fixture files");
    q->add_option("--input", queries.input, "claims file")->required();
    q->add_option("--out", queries.out, "query JSON lines (- for stdout)")->capture_default_str();
    queries.flags.add(q, false);

    FeaturizeArgs featurize;
    auto* f = app.add_subcommand("featurize", "turn collected evidence into feature rows");
    f->add_option("--claims", featurize.claims, "claims file")->required();
    f->add_option("--evidence", featurize.evidence, "evidence JSON lines from collect")->required();
    f->add_option("--out", featurize.out, "per-platform feature CSV")->required();
    f->add_option("--hybrid-out", featurize.hybrid_out, "hybrid feature CSV");
    featurize.flags.add(f, false);

    TrainArgs train;
    auto* t = app.add_subcommand("train", "fit a classifier on feature rows");
    t->add_option("--features", train.features, "feature CSV")->required();
    t->add_option("--labels", train.labels, "labelled claims file")->required();
    t->add_option("--scope", train.scope, "google, youtube or hybrid (default: the file's only scope)");
    t->add_option("--model", train.model, "model kind or preset")->capture_default_str();
    t->add_option("--seed", train.seed, "random seed")->required();
    t->add_option("--out", train.out, "model file")->required();
    t->add_option("--k", train.k, "neighbours for knn");
    t->add_option("--n-estimators", train.n_estimators, "trees or bags");
    t->add_option("--max-depth", train.max_depth, "tree depth, 0 for unbounded");
    t->add_option("--max-features", train.max_features, "features tried per split");
    t->add_option("--epochs", train.epochs, "passes over the data");
    t->add_option("--learning-rate", train.learning_rate, "step size");
    t->add_option("--lambda", train.lambda, "L2 strength");
    t->add_option("--loss", train.loss, "sgd loss: hinge or log");
    t->add_option("--voting", train.voting, "hard or soft");
    t->add_option("--members", train.members, "comma list of member presets for voting/bagging");

    PredictArgs predict;
    auto* p = app.add_subcommand("predict", "label feature rows with a trained model");
    p->add_option("--model", predict.model, "model file")->required();
    p->add_option("--features", predict.features, "feature CSV")->required();
    p->add_option("--scope", predict.scope, "google, youtube or hybrid");
    p->add_option("--out", predict.out, "prediction JSON lines (- for stdout)")->required();

    EvaluateArgs evaluate;
    auto* e = app.add_subcommand("evaluate", "score predictions against gold labels");
    e->add_option("--pred", evaluate.pred, "predictions or verdicts (JSON lines)")->required();
    e->add_option("--gold", evaluate.gold, "labelled claims file")->required();
    e->add_option("--report", evaluate.report, "metrics JSON (- for stdout)")->required();
    e->add_flag("--skip-missing", evaluate.skip_missing, "ignore gold claims without a prediction");

    VerifyArgs verify;
    auto* v = app.add_subcommand("verify", "verify a single claim");
    v->add_option("text", verify.text, "claim text")->required();
    v->add_option("--id", verify.id, "claim id in the verdict");
    v->add_option("--image", verify.image, "image claim (not supported)");
    verify.flags.add(v, true);

    BatchArgs batch;
    auto* b = app.add_subcommand("batch", "verify every claim of a dataset");
    b->add_option("--input", batch.input, "claims file")->required();
    b->add_option("--out", batch.out, "verdict JSON lines; the manifest goes next to it")->required();
    b->add_flag("--fail-fast", batch.fail_fast, "stop at the first failing claim");
    batch.flags.add(b, true);

    ExperimentArgs experiment;
    auto* x = app.add_subcommand("experiment", "train and score every model on every scope");
    x->add_option("--spec", experiment.spec, "experiment JSON")->required()->check(CLI::ExistingFile);
    x->add_option("--seed", experiment.seed, "random seed")->required();
    x->add_option("--report", experiment.report, "report JSON");
    x->add_option("--split", experiment.split, "name of the evaluation split (overrides the spec)");

    CheckSplitsArgs check;
    auto* k = app.add_subcommand("check-splits", "count labels in a train/val/test corpus");
    k->add_option("--dir", check.dir, "directory holding the split files")->required();
    k->add_flag("--strict", check.strict, "fail when counts differ from the expected split");
    k->add_flag("--dedup", check.dedup, "drop repeated texts before counting");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::CallForVersion& ex) {
        return app.exit(ex);
    } catch (const CLI::ParseError& ex) {
        app.exit(ex);
        return 1;
    }

    try {
        if (*c) return run_collect(collect);
        if (*q) return run_queries(queries);
        if (*f) return run_featurize(featurize);
        if (*t) return run_train(train);
        if (*p) return run_predict(predict);
        if (*e) return run_evaluate(evaluate);
        if (*v) return run_verify(verify);
        if (*b) return run_batch(batch);
        if (*x) return run_experiment(experiment);
        if (*k) return run_check_splits(check);
    } catch (const Error& ex) {
        std::cerr << "mwv: " << ex.what() << "\n";
        return exit_code_for(ex.code());
    } catch (const std::exception& ex) {
        std::cerr << "mwv: " << ex.what() << "\n";
        return 2;
    }
    return 1;
}
