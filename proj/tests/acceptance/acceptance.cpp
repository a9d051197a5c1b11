// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status 1 if any fails.
//   acceptance                 run all ten
//   acceptance --criterion N   run one
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "../unit/synthetic.hpp"
#include "mwv/error.hpp"
#include "mwv/eval.hpp"
#include "mwv/features.hpp"
#include "mwv/learn.hpp"
#include "mwv/pipeline.hpp"
#include "mwv/text/normalize.hpp"
#include "mwv/text/stopwords.hpp"
#include "mwv/util.hpp"

using namespace mwv;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

struct Criterion {
    int number;
    std::string name;
    double limit_s;
    std::function<Outcome()> run;
};

fs::path golden(const std::string& name) { return fs::path(MWV_GOLDEN_DIR) / name; }

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

// ---------------------------------------------------------------------------

Outcome dataset_counts() {
    const char* env = std::getenv("MWV_CONSTRAINT_DIR");
    const fs::path dir = env ? fs::path(env) : fs::path(MWV_SOURCE_DIR) / "data" / "constraint2021";
    const auto files = eval::locate_split_files(dir);
    if (!files) {
        return {false, "corpus not found in " + dir.string() + " (set MWV_CONSTRAINT_DIR to the train/val/test files)"};
    }
    const auto splits = eval::load_splits(*files);
    const auto check = eval::verify_split_counts(splits);
    std::string detail;
    for (const auto& r : check.rows) {
        detail += r.split + " " + std::to_string(r.actual.total) + " (" + std::to_string(r.actual.real) + "/" +
                  std::to_string(r.actual.fake) + ") ";
    }
    return {check.all_match(), detail};
}

double brute_cosine(const text::TokenList& a, const text::TokenList& b, const text::StopwordList& sw) {
    std::set<std::string> x, y, all;
    for (const auto& t : a) if (!sw.contains(t)) x.insert(t.str());
    for (const auto& t : b) if (!sw.contains(t)) y.insert(t.str());
    all = x;
    all.insert(y.begin(), y.end());
    double dot = 0, n1 = 0, n2 = 0;
    for (const auto& w : all) {
        const double l1 = x.count(w), l2 = y.count(w);
        dot += l1 * l2;
        n1 += l1 * l1;
        n2 += l2 * l2;
    }
    return n1 == 0 || n2 == 0 ? 0.0 : dot / std::sqrt(n1 * n2);
}

Outcome cosine_oracle() {
    const auto sw = text::StopwordList::load_file(fs::path(MWV_SOURCE_DIR) / "data" / "stopwords.txt");
    const double hand = features::cosine_similarity(text::make_tokens({"drinking", "water", "eliminates", "coronavirus"}),
                                                    text::make_tokens({"drinking", "water", "coronavirus", "myth"}), sw);
    if (std::abs(hand - 0.75) > 1e-12) return {false, "hand case gave " + fmt(hand)};
    Rng rng(2);
    double worst = 0.0;
    const std::vector<std::string> vocab{"the", "is", "virus", "water", "cure", "garlic", "5g", "mask", "vaccine", "a"};
    for (int i = 0; i < 100; ++i) {
        text::TokenList a, b;
        for (std::size_t k = rng.below(9); k > 0; --k) a.emplace_back(vocab[rng.below(vocab.size())]);
        for (std::size_t k = rng.below(9); k > 0; --k) b.emplace_back(vocab[rng.below(vocab.size())]);
        worst = std::max(worst, std::abs(features::cosine_similarity(a, b, sw) - brute_cosine(a, b, sw)));
    }
    return {worst <= 1e-12, "0.75 hand case ok, max deviation " + fmt(worst) + " over 100 pairs"};
}

Outcome classifier_oracles() {
    Rng rng(3);
    // KNN against an exhaustive sort.
    const auto pts = testing::random_dataset(rng, 200, 3);
    auto kcfg = learn::TrainConfig::defaults(learn::ModelKind::Knn);
    const auto knn = learn::train_knn(pts, kcfg);
    std::size_t knn_bad = 0;
    for (std::size_t q = 0; q < 200; ++q) {
        learn::Vector x{rng.normal(), rng.normal(), rng.normal()};
        const auto z = knn->standardizer().transform(x);
        std::vector<std::pair<double, std::size_t>> d;
        for (std::size_t i = 0; i < knn->points().size(); ++i) {
            double s = 0;
            for (std::size_t j = 0; j < 3; ++j) s += (knn->points()[i][j] - z[j]) * (knn->points()[i][j] - z[j]);
            d.emplace_back(s, i);
        }
        std::sort(d.begin(), d.end());
        int fake = 0;
        std::vector<std::size_t> expect;
        for (int i = 0; i < kcfg.k; ++i) {
            expect.push_back(d[i].second);
            fake += pts.y[d[i].second] == Label::Misleading;
        }
        const Label want = 2 * fake > kcfg.k ? Label::Misleading : Label::Real;
        if (knn->neighbors(x) != expect || knn->predict(x) != want) ++knn_bad;
    }

    // Hard voting against the mode of its members' outputs.
    auto vcfg = learn::preset("voting_rf_lr_knn");
    vcfg.seed = 4;
    vcfg.members[0].n_estimators = 25;
    const auto vote = learn::train_voting(pts, vcfg);
    std::size_t vote_bad = 0;
    for (int t = 0; t < 1000; ++t) {
        learn::Vector x{rng.normal(0, 2), rng.normal(0, 2), rng.normal(0, 2)};
        std::size_t fake = 0;
        for (std::size_t m = 0; m < vote->member_count(); ++m) fake += vote->member(m).predict(x) == Label::Misleading;
        const std::size_t real = vote->member_count() - fake;
        const Label mode = fake > real ? Label::Misleading : Label::Real;
        if (vote->predict(x) != mode) ++vote_bad;
    }

    // Unbounded CART on consistent data.
    auto data = testing::random_dataset(rng, 300, 4);
    for (auto& y : data.y) y = rng.below(2) ? Label::Misleading : Label::Real;
    auto ccfg = learn::TrainConfig::defaults(learn::ModelKind::Cart);
    ccfg.max_depth = 0;
    const double acc = testing::accuracy(*learn::train_cart(data, ccfg), data);

    return {knn_bad == 0 && vote_bad == 0 && acc == 1.0,
            "knn mismatches " + std::to_string(knn_bad) + "/200, vote mismatches " + std::to_string(vote_bad) +
                "/1000, cart training accuracy " + fmt(acc)};
}

Outcome gradient_check() {
    Rng rng(5);
    const auto d = testing::random_dataset(rng, 40, 4);
    const auto z = learn::Standardizer::fit(d.x).transform_all(d.x);
    double worst_lr = 0.0, worst_sgd = 0.0;
    for (int t = 0; t < 20; ++t) {
        learn::Vector p(5);
        for (auto& v : p) v = rng.normal(0, 1.5);
        auto obj = [&](const learn::Vector& q) {
            return learn::logistic_objective(z, d.y, std::span(q).first(4), q[4], 1e-2);
        };
        const auto g = learn::logistic_gradient(z, d.y, std::span(p).first(4), p[4], 1e-2);
        worst_lr = std::max(worst_lr, testing::gradient_error(obj, p, g));

        const auto& x = z[t];
        auto inst = [&](const learn::Vector& q) {
            return learn::sgd_instance_loss(learn::SgdLoss::Log, x, d.y[t], std::span(q).first(4), q[4], 1e-2);
        };
        const auto gi = learn::sgd_instance_gradient(learn::SgdLoss::Log, x, d.y[t], std::span(p).first(4), p[4], 1e-2);
        worst_sgd = std::max(worst_sgd, testing::gradient_error(inst, p, gi));
    }
    return {worst_lr < 1e-5 && worst_sgd < 1e-5,
            "max relative error LR " + fmt(worst_lr) + ", SGD(log) " + fmt(worst_sgd)};
}

Outcome separability() {
    const auto sep = testing::separable_2d(400400);
    auto lr = learn::preset("logistic");
    auto svm = learn::preset("linear_svm");
    lr.seed = svm.seed = 1;
    const double a_lr = testing::accuracy(*learn::train(sep, lr), sep);
    const double a_svm = testing::accuracy(*learn::train(sep, svm), sep);
    const auto [tr, te] = testing::split_at(testing::xor_blobs(1000), 750);
    auto rf = learn::preset("random_forest");
    rf.seed = 1;
    const double a_rf = testing::accuracy(*learn::train(tr, rf), te);
    return {a_lr >= 0.98 && a_svm >= 0.98 && a_rf >= 0.90,
            "LR " + fmt(a_lr) + ", linear SVM " + fmt(a_svm) + " (train, n=400); RF " + fmt(a_rf) + " (test, XOR)"};
}

Outcome metric_identities() {
    const auto worked = eval::compute_metrics({40, 5, 10, 45});
    if (std::abs(worked.fake.f1 - 0.8421) > 1e-4) return {false, "worked example F1 " + fmt(worked.fake.f1)};
    Rng rng(6);
    int bad = 0;
    for (int i = 0; i < 100; ++i) {
        eval::ConfusionMatrix cm;
        do {
            cm = {rng.below(50), rng.below(50), rng.below(50), rng.below(50)};
        } while (cm.total() == 0);
        const auto m = eval::compute_metrics(cm);
        if (m.micro.f1 != m.accuracy || m.weighted.recall != m.accuracy) ++bad;
    }
    return {bad == 0, "F1_fake " + fmt(worked.fake.f1) + "; identity violations " + std::to_string(bad) + "/100"};
}

Outcome golden_run() {
    const auto expected = read_file(golden("verdicts.jsonl"));
    const pipeline::Pipeline p(pipeline::PipelineConfig::load_file(golden("golden.conf")));
    const auto claims = eval::to_claims(eval::load_dataset(golden("claims.tsv")));
    std::string single;
    for (const auto& c : claims) single += pipeline::verdict_json(p.verify(c)) + "\n";
    const auto batch = p.run_batch(claims).verdicts_jsonl();
    return {single == expected && batch == expected,
            std::string("verify ") + (single == expected ? "matches" : "differs") + ", run_batch " +
                (batch == expected ? "matches" : "differs") + " (" + std::to_string(claims.size()) + " claims)"};
}

Outcome feature_semantics() {
    auto tf = [](int fake, int qm, double cos) {
        features::TitleFeatures t;
        t.fake_flag = fake;
        t.qm_flag = qm;
        t.cosine = cos;
        return t;
    };
    const std::vector<features::TitleFeatures> bundle{tf(1, 0, 0.5), tf(0, 0, 0.1), tf(1, 1, 0.7)};
    const auto f = features::aggregate("c", features::Scope::Google, text::Polarity::Neutral, bundle, 0.2).features;
    const bool example = f.fake_count == 2 && f.qm_count == 1 && f.cos_mean == 0.6 && f.n_retained == 2;
    Rng rng(8);
    int bad = 0;
    for (int i = 0; i < 100; ++i) {
        std::vector<features::TitleFeatures> titles;
        for (std::size_t n = rng.below(11); n > 0; --n) {
            titles.push_back(tf(static_cast<int>(rng.below(2)), static_cast<int>(rng.below(2)), rng.uniform()));
        }
        const double lo = rng.uniform();
        const double hi = lo + (1.0 - lo) * rng.uniform();
        const auto a = features::aggregate("c", features::Scope::Google, text::Polarity::Neutral, titles, lo).features;
        const auto b = features::aggregate("c", features::Scope::Google, text::Polarity::Neutral, titles, hi).features;
        if (b.n_retained > a.n_retained) ++bad;
    }
    return {example && bad == 0, std::string("worked example ") + (example ? "ok" : "wrong") + " (fake " +
                                     std::to_string(f.fake_count) + ", qm " + std::to_string(f.qm_count) + ", cos " +
                                     fmt(f.cos_mean) + ", retained " + std::to_string(f.n_retained) +
                                     "); monotonicity violations " + std::to_string(bad) + "/100"};
}

Outcome persistence() {
    Rng rng(9);
    const auto d = testing::random_dataset(rng, 120, 6);
    std::set<learn::ModelKind> kinds;
    std::size_t mismatches = 0;
    for (const auto& name : learn::preset_names()) {
        auto cfg = learn::preset(name);
        cfg.seed = 10;
        const auto m = learn::train(d, cfg);
        kinds.insert(m->kind());
        std::stringstream buf;
        learn::save_model(*m, buf);
        const auto back = learn::load_model(buf);
        for (int i = 0; i < 100; ++i) {
            learn::Vector x(6);
            for (auto& v : x) v = rng.normal(0, 3);
            if (back->predict(x) != m->predict(x)) ++mismatches;
            if (m->has_proba() && back->predict_proba(x) != m->predict_proba(x)) ++mismatches;
        }
    }
    return {mismatches == 0 && kinds.size() == 9,
            std::to_string(kinds.size()) + " model kinds, " + std::to_string(mismatches) + " mismatches"};
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MWV_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// collect -> featurize -> experiment, twice, through the command line.
Outcome determinism() {
    const auto root = fs::temp_directory_path() / ("mwv_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    std::vector<std::string> reports;
    const std::string claims = "'" + golden("claims.tsv").string() + "'";
    const std::string conf = "'" + golden("golden.conf").string() + "'";
    for (int run = 0; run < 2; ++run) {
        const auto dir = root / std::to_string(run);
        fs::create_directories(dir);
        const auto q = [&](const char* n) { return "'" + (dir / n).string() + "'"; };
        if (run_cli("collect --config " + conf + " --input " + claims + " --out " + q("ev.jsonl")) != 0 ||
            run_cli("featurize --claims " + claims + " --evidence " + q("ev.jsonl") + " --out " + q("f.csv")) != 0) {
            fs::remove_all(root);
            return {false, "collect/featurize failed in run " + std::to_string(run + 1)};
        }
        fs::copy_file(golden("experiment/train_labels.tsv"), dir / "train_labels.tsv");
        fs::copy_file(golden("experiment/eval_labels.tsv"), dir / "eval_labels.tsv");
        write_file_atomic(dir / "spec.json",
                          R"({"train_features":"f.csv","train_labels":"train_labels.tsv","eval_features":"f.csv",)"
                          R"("eval_labels":"eval_labels.tsv","eval_split":"test"})");
        if (run_cli("experiment --spec " + q("spec.json") + " --seed 11 --report " + q("report.json")) != 0) {
            fs::remove_all(root);
            return {false, "experiment failed in run " + std::to_string(run + 1)};
        }
        reports.push_back(read_file(dir / "report.json"));
    }
    fs::remove_all(root);
    const auto rows = nlohmann::json::parse(reports[0])["rows"].size();
    return {reports[0] == reports[1] && !reports[0].empty(),
            std::string("report files ") + (reports[0] == reports[1] ? "identical" : "differ") + " (" +
                std::to_string(rows) + " rows, " + std::to_string(reports[0].size()) + " bytes)"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "dataset split counts", 5, dataset_counts},
        {2, "cosine oracle", 1, cosine_oracle},
        {3, "classifier oracles", 30, classifier_oracles},
        {4, "gradient check", 5, gradient_check},
        {5, "separability", 60, separability},
        {6, "metric identities", 1, metric_identities},
        {7, "pipeline golden run", 30, golden_run},
        {8, "feature semantics", 5, feature_semantics},
        {9, "persistence", 10, persistence},
        {10, "determinism", 120, determinism},
    };
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--criterion" && i + 1 < argc) {
            const auto n = parse_int(argv[++i]);
            if (!n || *n < 1 || *n > 10) {
                std::cerr << "criterion must be 1..10\n";
                return 2;
            }
            only = static_cast<int>(*n);
        } else {
            std::cerr << "usage: acceptance [--criterion N]\n";
            return 2;
        }
    }
    int failed = 0;
    for (const auto& c : all) {
        if (only && c.number != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.limit_s;
        const bool pass = o.ok && in_time;
        failed += pass ? 0 : 1;
        std::cout << "criterion " << c.number << " [" << c.name << "]: " << (pass ? "PASS" : "FAIL") << " ("
                  << fmt(secs) << " s, limit " << c.limit_s << " s) " << o.detail
                  << (in_time ? "" : " -- over the time limit") << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
