#include <doctest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mwv/error.hpp"
#include "mwv/eval.hpp"
#include "mwv/util.hpp"
#include "support.hpp"

using namespace mwv;
using namespace mwv::eval;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no mwv::Error thrown");
    return ErrorCode::IoError;
}

std::vector<DatasetRecord> parse(const std::string& text, char delim = '\t', LoadOptions opt = {}) {
    std::istringstream in(text);
    return load_dataset(in, delim, opt);
}

std::vector<DatasetRecord> records(std::size_t real, std::size_t fake, const std::string& prefix = "") {
    std::vector<DatasetRecord> out;
    for (std::size_t i = 0; i < real + fake; ++i) {
        out.push_back({prefix + std::to_string(i), "text " + std::to_string(i), i < real ? Label::Real : Label::Misleading});
    }
    return out;
}

ConfusionMatrix random_cm(Rng& rng) {
    ConfusionMatrix cm;
    do {
        cm.tp = rng.below(60);
        cm.fp = rng.below(60);
        cm.fn = rng.below(60);
        cm.tn = rng.below(60);
        // Sprinkle in degenerate matrices.
        if (rng.below(8) == 0) cm.tp = 0;
        if (rng.below(8) == 0) cm.tn = 0;
        if (rng.below(8) == 0) cm.fp = 0;
    } while (cm.total() == 0);
    return cm;
}

double safe_div(double a, double b) { return b == 0 ? 0.0 : a / b; }

features::FeatureRow row(const std::string& id, features::Scope s, std::vector<double> v) {
    return {id, s, std::move(v)};
}

// Labeled features where the first value loosely predicts the label.
LabeledFeatures synthetic_features(std::uint64_t seed, std::size_t n, const std::string& prefix) {
    Rng rng(seed);
    LabeledFeatures lf;
    for (std::size_t i = 0; i < n; ++i) {
        const std::string id = prefix + std::to_string(1000 + i);
        const bool fake = i % 2 == 0;
        for (auto scope : {features::Scope::Google, features::Scope::YouTube}) {
            std::vector<double> v(features::ClaimFeatures::kDim);
            for (auto& x : v) x = rng.normal();
            v[0] += fake ? 1.5 : -1.5;
            lf.rows.push_back(row(id, scope, v));
        }
        lf.labels[id] = fake ? Label::Misleading : Label::Real;
    }
    return lf;
}

}  // namespace

TEST_CASE("dataset loading") {
    const auto r = parse("id\ttweet\tlabel\n1\tGarlic cures covid\tFAKE\n2\tMasks help\tReal\n");
    REQUIRE(r.size() == 2);
    CHECK(r[0].label == Label::Misleading);
    CHECK(r[1].label == Label::Real);
    CHECK(r[1].text == "Masks help");

    // Columns in any order and case, extra columns ignored, quoted CSV fields.
    const auto c = parse("Label,extra,ID,Text\nreal,x,a,\"hello, world\"\n", ',');
    REQUIRE(c.size() == 1);
    CHECK(c[0].id == "a");
    CHECK(c[0].text == "hello, world");
}

TEST_CASE("dataset loading errors") {
    CHECK(code_of([] { parse("id\tlabel\n1\treal\n"); }) == ErrorCode::BadHeader);
    CHECK(code_of([] { parse(""); }) == ErrorCode::BadHeader);
    try {
        parse("id\ttweet\tlabel\n1\tok\treal\n2\thmm\tmaybe\n");
        FAIL("expected BadLabel");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadLabel);
        CHECK(e.message().find("3") != std::string::npos);
    }
    CHECK(code_of([] { parse("id\ttweet\tlabel\n1\ta\treal\n1\tb\tfake\n"); }) == ErrorCode::DuplicateId);
    CHECK(code_of([] { parse("id\ttweet\tlabel\n1\ta\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse("id\ttweet\tlabel\n1\t  \treal\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { load_dataset(std::filesystem::path("/nonexistent/train.tsv")); }) == ErrorCode::IoError);
}

TEST_CASE("dedup and optional labels") {
    const std::string text = "id\ttweet\tlabel\n1\tsame\treal\n2\t same \tfake\n3\tother\treal\n";
    CHECK(parse(text).size() == 3);
    LoadOptions dedup;
    dedup.dedup = true;
    CHECK(parse(text, '\t', dedup).size() == 2);
    LoadOptions unlabeled;
    unlabeled.require_label = false;
    CHECK(parse("id\ttext\n1\tclaim one\n", '\t', unlabeled).size() == 1);
}

TEST_CASE("split files on disk") {
    const auto dir = std::filesystem::path(testing::scratch_dir("splits"));
    write_file_atomic(dir / "Constraint_Train.csv", "id,tweet,label\n1,a,real\n2,b,fake\n");
    write_file_atomic(dir / "Constraint_Val.csv", "id,tweet,label\n1,c,real\n");
    write_file_atomic(dir / "english_test_with_labels.csv", "id,tweet,label\n1,d,fake\n");
    const auto files = locate_split_files(dir);
    REQUIRE(files.has_value());
    const auto s = load_splits(*files);
    CHECK(count_labels(s.train) == SplitCounts{2, 1, 1});
    CHECK(count_labels(s.validation) == SplitCounts{1, 1, 0});
    CHECK(count_labels(s.test) == SplitCounts{1, 0, 1});
    // Same raw id in several splits; qualified ids stay unique.
    const auto q = qualified_ids(s);
    CHECK(std::set<std::string>(q.begin(), q.end()).size() == q.size());
    CHECK_FALSE(locate_split_files(dir / "missing").has_value());
    std::filesystem::remove_all(dir);
}

TEST_CASE("split count verification") {
    SplitSet s;
    s.train = records(3360, 3060, "t");
    s.validation = records(1120, 1020, "v");
    s.test = records(1120, 1020, "x");
    const auto ok = verify_split_counts(s);
    CHECK(ok.all_match());
    CHECK(ok.warnings.empty());

    s.validation.pop_back();
    const auto off = verify_split_counts(s);
    CHECK_FALSE(off.all_match());
    REQUIRE(off.warnings.size() == 1);
    CHECK(off.warnings[0].find("validation") != std::string::npos);
    CHECK(format_split_check(off).find("validation") != std::string::npos);
    CHECK(code_of([&] { verify_split_counts(s, true); }) == ErrorCode::CountMismatch);

    const auto empty = verify_split_counts(SplitSet{});
    for (const auto& r : empty.rows) CHECK(r.actual == SplitCounts{});
    CHECK(empty.rows.size() == 3);
}

TEST_CASE("worked metrics example") {
    ConfusionMatrix cm{40, 5, 10, 45};
    const auto m = compute_metrics(cm);
    CHECK(m.fake.precision == doctest::Approx(40.0 / 45.0));
    CHECK(m.fake.recall == doctest::Approx(0.8));
    CHECK(std::abs(m.fake.f1 - 0.8421) < 1e-4);
    CHECK(m.accuracy == doctest::Approx(0.85));
    CHECK(m.fake.support == 50);
    CHECK(m.real.support == 50);
    CHECK(m.undefined.empty());
}

TEST_CASE("perfect and hopeless predictions") {
    const auto perfect = compute_metrics({10, 0, 0, 7});
    for (double v : {perfect.accuracy, perfect.fake.f1, perfect.real.f1, perfect.macro.f1, perfect.weighted.f1}) {
        CHECK(v == 1.0);
    }
    const auto wrong = compute_metrics({0, 6, 4, 0});
    CHECK(wrong.accuracy == 0.0);
    CHECK(wrong.fake.f1 == 0.0);
    CHECK(wrong.real.f1 == 0.0);
    // Only real claims, all called fake: fake recall and real precision are 0/0.
    const auto flagged = compute_metrics({0, 5, 0, 0});
    CHECK(flagged.accuracy == 0.0);
    CHECK(flagged.fake.f1 == 0.0);
    CHECK(std::find(flagged.undefined.begin(), flagged.undefined.end(), "recall_fake") != flagged.undefined.end());
    CHECK(std::find(flagged.undefined.begin(), flagged.undefined.end(), "precision_real") != flagged.undefined.end());
    const auto none_pred = compute_metrics({0, 0, 5, 5});
    CHECK(std::find(none_pred.undefined.begin(), none_pred.undefined.end(), "precision_fake") !=
          none_pred.undefined.end());
    CHECK(code_of([] { compute_metrics({}); }) == ErrorCode::EmptyEvaluation);
}

TEST_CASE("metric identities on random confusion matrices") {
    Rng rng(2021);
    for (int i = 0; i < 500; ++i) {
        const auto cm = random_cm(rng);
        const auto m = compute_metrics(cm);
        CAPTURE(cm.tp);
        CAPTURE(cm.fp);
        CAPTURE(cm.fn);
        CAPTURE(cm.tn);
        CHECK(m.micro.f1 == m.accuracy);
        CHECK(m.weighted.recall == m.accuracy);
        // Independent support-weighted recall.
        const double n = static_cast<double>(cm.total());
        const double rf = safe_div(cm.tp, cm.tp + cm.fn);
        const double rr = safe_div(cm.tn, cm.tn + cm.fp);
        CHECK(std::abs((rf * (cm.tp + cm.fn) + rr * (cm.tn + cm.fp)) / n - m.accuracy) < 1e-12);
        for (double v : {m.fake.precision, m.fake.recall, m.fake.f1, m.real.precision, m.real.recall, m.real.f1,
                         m.macro.precision, m.macro.recall, m.macro.f1, m.weighted.precision, m.weighted.f1,
                         m.accuracy}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK(m.macro.f1 == doctest::Approx((m.fake.f1 + m.real.f1) / 2));
    }
}

TEST_CASE("metrics match a per-instance recount") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(80);
        std::vector<Label> gold;
        std::vector<Label> pred;
        for (std::size_t i = 0; i < n; ++i) {
            gold.push_back(rng.below(2) ? Label::Misleading : Label::Real);
            pred.push_back(rng.below(3) ? gold.back() : (rng.below(2) ? Label::Misleading : Label::Real));
        }
        std::size_t correct = 0, pf = 0, gf = 0, both_f = 0, pr = 0, gr = 0, both_r = 0;
        for (std::size_t i = 0; i < n; ++i) {
            correct += gold[i] == pred[i];
            pf += pred[i] == Label::Misleading;
            gf += gold[i] == Label::Misleading;
            both_f += gold[i] == Label::Misleading && pred[i] == Label::Misleading;
            pr += pred[i] == Label::Real;
            gr += gold[i] == Label::Real;
            both_r += gold[i] == Label::Real && pred[i] == Label::Real;
        }
        const auto m = compute_metrics(tally(gold, pred));
        CHECK(m.cm.total() == n);
        CHECK(m.accuracy == doctest::Approx(static_cast<double>(correct) / n));
        const double p_f = safe_div(both_f, pf), r_f = safe_div(both_f, gf);
        const double p_r = safe_div(both_r, pr), r_r = safe_div(both_r, gr);
        CHECK(m.fake.precision == doctest::Approx(p_f));
        CHECK(m.fake.recall == doctest::Approx(r_f));
        CHECK(m.fake.f1 == doctest::Approx(safe_div(2 * p_f * r_f, p_f + r_f)));
        CHECK(m.real.precision == doctest::Approx(p_r));
        CHECK(m.real.recall == doctest::Approx(r_r));
        CHECK(m.weighted.precision == doctest::Approx((p_f * gf + p_r * gr) / n));
    }
    CHECK_THROWS_AS(tally({Label::Real}, {}), Error);
}

TEST_CASE("platform vote examples") {
    const auto M = Label::Misleading;
    const auto R = Label::Real;
    CHECK(platform_vote(M, R, M).final == M);
    CHECK(platform_vote(R, R, R).final == R);
    const auto tie = platform_vote(M, R, std::nullopt);
    CHECK(tie.final == M);
    CHECK(tie.tie_broken);
    CHECK(tie.voters == 2);
    CHECK(platform_vote(M, R, std::nullopt, VoteRule::Majority, R).final == R);
    // Two voters, one of them the hybrid: the hybrid decides.
    CHECK(platform_vote(M, std::nullopt, R).final == R);
    CHECK(platform_vote(std::nullopt, R, M).final == M);
    CHECK(platform_vote(M, M, R, VoteRule::HybridOnly).final == R);
    CHECK(code_of([] { platform_vote(std::nullopt, std::nullopt, std::nullopt); }) == ErrorCode::NoVotes);
    CHECK(code_of([&] { platform_vote(M, R, std::nullopt, VoteRule::HybridOnly); }) == ErrorCode::NoVotes);
    const auto v = platform_vote(M, M, R);
    CHECK(v.votes_misleading == 2);
    CHECK(v.votes_real == 1);
    CHECK(v.support == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("majority vote equals the mode when one exists") {
    const std::array<std::optional<Label>, 3> options{std::nullopt, Label::Real, Label::Misleading};
    for (const auto& g : options) {
        for (const auto& y : options) {
            for (const auto& h : options) {
                int m = 0, r = 0;
                for (const auto& l : {g, y, h}) {
                    if (l) (*l == Label::Misleading ? m : r)++;
                }
                if (m + r == 0) continue;
                const auto v = platform_vote(g, y, h);
                CHECK(v.voters == m + r);
                if (m > r) CHECK(v.final == Label::Misleading);
                if (r > m) CHECK(v.final == Label::Real);
                CHECK(v.support >= 0.0);
                CHECK(v.support <= 1.0);
            }
        }
    }
}

TEST_CASE("experiment cardinality and determinism") {
    ExperimentInputs in;
    in.train = synthetic_features(1, 80, "tr");
    in.eval = synthetic_features(2, 40, "ev");
    in.seed = 42;
    for (auto& m : in.models) {
        m.config.n_estimators = std::min(m.config.n_estimators, 15);
        for (auto& mm : m.config.members) mm.n_estimators = std::min(mm.n_estimators, 15);
    }
    const auto a = run_experiment(in);
    REQUIRE(a.rows.size() == 21);
    CHECK(a.rows[0].model == "random_forest");
    CHECK(a.rows[0].scope == features::Scope::Google);
    CHECK(a.rows[2].scope == features::Scope::Hybrid);
    CHECK(a.rows[0].n_eval == 40);
    for (const auto& r : a.rows) CHECK(r.metrics.accuracy > 0.6);
    const auto b = run_experiment(in);
    CHECK(report_json(a) == report_json(b));
    CHECK(report_table(a) == report_table(b));
    in.seed = 43;
    CHECK(run_experiment(in).seed == 43);

    auto missing = in;
    missing.eval.labels["nope"] = Label::Real;
    CHECK(code_of([&] { run_experiment(missing); }) == ErrorCode::MissingFeatures);
}

TEST_CASE("hybrid design matrix concatenates google then youtube") {
    LabeledFeatures lf;
    lf.rows.push_back(row("a", features::Scope::YouTube, std::vector<double>(10, 2.0)));
    lf.rows.push_back(row("a", features::Scope::Google, std::vector<double>(10, 1.0)));
    lf.rows.push_back(row("b", features::Scope::Google, std::vector<double>(10, 3.0)));
    lf.labels = {{"a", Label::Real}, {"b", Label::Misleading}};
    const auto d = design_matrix(lf, features::Scope::Hybrid);
    REQUIRE(d.size() == 2);
    CHECK(d.x[0][0] == 1.0);
    CHECK(d.x[0][10] == 2.0);
    CHECK(d.x[1][0] == 3.0);
    CHECK(d.x[1][19] == 0.0);
    CHECK(code_of([&] { design_matrix(lf, features::Scope::YouTube); }) == ErrorCode::MissingFeatures);
}

TEST_CASE("experiment spec file") {
    const auto dir = std::filesystem::path(testing::scratch_dir("spec"));
    write_file_atomic(dir / "spec.json",
                      R"({"train_features":"tr.csv","train_labels":"tr.tsv","eval_features":"ev.csv",)"
                      R"("eval_labels":"ev.tsv","eval_split":"validation","scopes":["google"],)"
                      R"("models":["logistic","knn"],"seed":9})");
    const auto spec = load_experiment_spec(dir / "spec.json");
    CHECK(spec.train_features == dir / "tr.csv");
    CHECK(spec.eval_split == "validation");
    CHECK(spec.scopes == std::vector<features::Scope>{features::Scope::Google});
    CHECK(spec.models == std::vector<std::string>{"logistic", "knn"});
    CHECK(spec.seed == 9u);
    write_file_atomic(dir / "bad.json", R"({"train_features":1})");
    CHECK_THROWS_AS(load_experiment_spec(dir / "bad.json"), Error);
    std::filesystem::remove_all(dir);
}
