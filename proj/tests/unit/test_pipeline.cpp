#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mwv/error.hpp"
#include "mwv/eval.hpp"
#include "mwv/pipeline.hpp"
#include "mwv/util.hpp"
#include "support.hpp"

using namespace mwv;
using namespace mwv::pipeline;
namespace fs = std::filesystem;

namespace {

fs::path golden(const std::string& name) { return testing::golden_dir() / name; }

PipelineConfig golden_config() { return PipelineConfig::load_file(golden("golden.conf")); }

std::vector<Claim> golden_claims() { return eval::to_claims(eval::load_dataset(golden("claims.tsv"))); }

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no mwv::Error thrown");
    return ErrorCode::IoError;
}

// Runs the CLI through the shell and returns its exit status.
int cli(const std::string& args) {
    const std::string cmd = std::string(MWV_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("config file parsing") {
    const auto dir = fs::path(testing::scratch_dir("cfg"));
    write_file_atomic(dir / "run.conf",
                      "# comment\n\nbuild_case = 2:2\nproviders = youtube\nthreshold=0.35\n"
                      "fixtures = fx   # trailing note\nvote_rule = hybrid-only\ntie_break = real\nseed = 99\n");
    const auto cfg = PipelineConfig::load_file(dir / "run.conf");
    CHECK(cfg.strategy == BuildStrategy::ngrams(2));
    CHECK(cfg.providers == std::vector<evidence::Platform>{evidence::Platform::YouTube});
    CHECK(cfg.tau == 0.35);
    CHECK(cfg.fixtures == dir / "fx");
    CHECK(cfg.vote_rule == eval::VoteRule::HybridOnly);
    CHECK(cfg.tie_break == Label::Real);
    CHECK(cfg.seed == 99u);
    CHECK(cfg.snapshot().at("threshold") == "0.35");
    CHECK(cfg.resource("stopwords") == cfg.data_dir / "stopwords.txt");

    PipelineConfig c;
    CHECK(code_of([&] { c.set("colour", "blue"); }) == ErrorCode::BadConfig);
    CHECK(code_of([&] { c.set("threshold", "1.5"); }) == ErrorCode::BadConfig);
    CHECK(code_of([&] { c.set("threshold", "abc"); }) == ErrorCode::BadConfig);
    CHECK(code_of([&] { c.set("mode", "sometimes"); }) == ErrorCode::BadConfig);
    CHECK(code_of([&] { c.set("workers", "0"); }) == ErrorCode::BadConfig);
    write_file_atomic(dir / "bad.conf", "threshold 0.3\n");
    CHECK(code_of([&] { PipelineConfig::load_file(dir / "bad.conf"); }) == ErrorCode::BadConfig);

    c.set("model_google", (dir / "absent.json").string());
    CHECK(code_of([&] { c.validate(); }) == ErrorCode::IoError);
    fs::remove_all(dir);
}

TEST_CASE("golden batch reproduces the committed verdicts") {
    const Pipeline p(golden_config());
    const auto result = p.run_batch(golden_claims());
    CHECK(result.verdict_count() == 20);
    CHECK(result.error_count() == 0);
    CHECK(result.verdicts_jsonl() == read_file(golden("verdicts.jsonl")));
}

TEST_CASE("single verifications match the batch and parallel runs") {
    auto cfg = golden_config();
    const auto claims = golden_claims();
    const Pipeline serial(cfg);
    cfg.workers = 3;
    const Pipeline parallel(cfg);
    const auto batch = parallel.run_batch(claims);
    CHECK(batch.verdicts_jsonl() == read_file(golden("verdicts.jsonl")));
    for (std::size_t i = 0; i < claims.size(); ++i) {
        CHECK(verdict_json(serial.verify(claims[i])) == verdict_json(std::get<Verdict>(batch.outcomes[i])));
    }
    const auto text = serial.verify_text(claims[4].text, claims[4].id);
    CHECK(verdict_json(text) == verdict_json(serial.verify(claims[4])));
}

TEST_CASE("verdict features agree with an independent featurization") {
    const auto cfg = golden_config();
    const Pipeline p(cfg);
    const auto claims = golden_claims();
    const auto collector = make_collector(cfg);
    std::vector<CollectedEvidence> ev;
    for (const auto& c : claims) {
        for (auto& e : collect_claim(c, cfg, p.resources(), *collector)) ev.push_back(std::move(e));
    }
    const auto fr = featurize(claims, ev, make_context(p.resources(), cfg), cfg.tau);
    REQUIRE(fr.platform_rows.size() == 40);
    REQUIRE(fr.hybrid_rows.size() == 20);

    // The committed feature matrix is the same computation.
    std::ostringstream csv;
    features::write_platform_csv(csv, fr.platform_rows);
    CHECK(csv.str() == read_file(golden("features.csv")));

    for (std::size_t i = 0; i < claims.size(); ++i) {
        const auto v = p.verify(claims[i]);
        REQUIRE(v.scopes.size() == 3);
        CHECK(v.scopes[0].features == fr.platform_rows[2 * i].to_vector());
        CHECK(v.scopes[1].features == fr.platform_rows[2 * i + 1].to_vector());
        CHECK(v.scopes[2].features == fr.hybrid_rows[i].to_vector());
        // The trail holds exactly the titles that passed the gate.
        const int retained = fr.platform_rows[2 * i].n_retained + fr.platform_rows[2 * i + 1].n_retained;
        CHECK(static_cast<int>(v.trail.size()) == retained);
        for (const auto& t : v.trail) CHECK(t.signals.cosine >= cfg.tau);
        std::size_t seen = 0;
        for (const auto& e : ev) seen += e.claim_id == claims[i].id ? e.merged.titles.size() : 0;
        CHECK(v.titles_seen == seen);
    }
}

TEST_CASE("golden corpus shape") {
    const Pipeline p(golden_config());
    const auto claims = golden_claims();
    const auto g01 = p.verify(claims[0]);
    CHECK(g01.scopes[0].features[0] == 10.0);  // ten fake-flagged google titles
    CHECK(g01.scopes[0].features[9] == 10.0);

    const auto g10 = p.verify(claims[9]);
    CHECK(g10.insufficient_evidence);
    CHECK(g10.titles_seen == 0);
    CHECK(g10.trail.empty());
    CHECK(verdict_json(g10).find("\"insufficient_evidence\":true") != std::string::npos);
}

TEST_CASE("evidence lines round trip") {
    const auto cfg = golden_config();
    const Pipeline p(cfg);
    const auto collector = make_collector(cfg);
    std::string text;
    std::vector<CollectedEvidence> ev;
    for (const auto& c : golden_claims()) {
        for (auto& e : collect_claim(c, cfg, p.resources(), *collector)) {
            text += evidence_json(e) + "\n";
            ev.push_back(std::move(e));
        }
    }
    CHECK(text == read_file(golden("evidence.jsonl")));
    std::istringstream in(text);
    const auto back = read_evidence_jsonl(in);
    REQUIRE(back.size() == ev.size());
    for (std::size_t i = 0; i < ev.size(); ++i) CHECK(evidence_json(back[i]) == evidence_json(ev[i]));

    std::istringstream bad("{\"claim_id\":\"x\"}\n");
    CHECK(code_of([&] { read_evidence_jsonl(bad); }) == ErrorCode::ParseError);
    std::istringstream range(
        R"({"claim_id":"x","platform":"google","queries":[],"titles":[{"query_index":0,"rank":1,"title":"t","url":"","fetched_at":"2021-01-15T12:00:00Z"}]})"
        "\n");
    CHECK(code_of([&] { read_evidence_jsonl(range); }) == ErrorCode::ParseError);
}

TEST_CASE("featurize rejects evidence for unknown claims") {
    const auto cfg = golden_config();
    const Pipeline p(cfg);
    auto ev = read_evidence_file(golden("evidence.jsonl"));
    auto claims = golden_claims();
    claims.erase(claims.begin());
    CHECK(code_of([&] { featurize(claims, ev, make_context(p.resources(), cfg), cfg.tau); }) ==
          ErrorCode::MismatchedClaim);
}

TEST_CASE("per-claim failures become error records") {
    const Pipeline p(golden_config());
    auto claims = golden_claims();
    claims.insert(claims.begin() + 3, Claim{"x1", "Aliens confirm the moon is cheese", std::nullopt});
    claims.push_back(Claim{"x2", "the of and", std::nullopt});
    const auto r = p.run_batch(claims);
    CHECK(r.verdict_count() == 20);
    CHECK(r.error_count() == 2);
    REQUIRE(std::holds_alternative<ClaimError>(r.outcomes[3]));
    const auto& miss = std::get<ClaimError>(r.outcomes[3]);
    CHECK(miss.claim_id == "x1");
    CHECK(miss.code == ErrorCode::MissingFixture);
    CHECK(miss.stage == "collect");
    const auto& empty = std::get<ClaimError>(r.outcomes.back());
    CHECK(empty.code == ErrorCode::EmptyQuery);
    CHECK(empty.stage == "query");

    // Remaining lines are the golden verdicts, in input order.
    std::istringstream lines(r.verdicts_jsonl());
    std::string line;
    std::string kept;
    while (std::getline(lines, line)) {
        if (line.find("\"error\"") == std::string::npos) kept += line + "\n";
    }
    CHECK(kept == read_file(golden("verdicts.jsonl")));

    auto cfg = golden_config();
    cfg.fail_fast = true;
    const Pipeline strict(cfg);
    CHECK(code_of([&] { strict.run_batch(claims); }) == ErrorCode::MissingFixture);
}

TEST_CASE("batch file writes a manifest") {
    const auto dir = fs::path(testing::scratch_dir("batch"));
    const Pipeline p(golden_config());
    const auto r = run_batch_file(p, golden("claims.tsv"), dir / "out.jsonl");
    CHECK(read_file(dir / "out.jsonl") == read_file(golden("verdicts.jsonl")));
    const auto m = nlohmann::json::parse(read_file(dir / "out.jsonl.manifest.json"));
    CHECK(m["input"]["sha256"] == sha256_hex(read_file(golden("claims.tsv"))));
    CHECK(m["counts"]["claims"] == 20);
    CHECK(m["counts"]["verdicts"] == 20);
    CHECK(m["counts"]["titles"] == 358);
    CHECK(m["config"]["mode"] == "replay");
    CHECK(m["config"]["seed"] == "7");
    CHECK(m["tool_version"] == std::string(kToolVersion));
    CHECK(r.manifest.counts.at("errors") == 0);

    // The manifest's configuration reproduces the run.
    PipelineConfig again;
    for (const auto& [k, v] : m["config"].items()) again.set(k, v.get<std::string>(), testing::golden_dir());
    CHECK(Pipeline(again).run_batch(golden_claims()).verdicts_jsonl() == read_file(golden("verdicts.jsonl")));
    fs::remove_all(dir);
}

TEST_CASE("declared hooks") {
    CHECK(code_of([] { extract_image_text("claim.png"); }) == ErrorCode::NotSupported);
    CHECK(translate_to_english("Garlic cures covid") == "Garlic cures covid");
}

TEST_CASE("models must fit the feature dimension") {
    auto cfg = golden_config();
    cfg.model_google = golden("models/hybrid.json");  // 20 inputs where 10 arrive
    // Caught when the models load, before any claim runs.
    CHECK(code_of([&] { Pipeline p(cfg); }) == ErrorCode::DimensionMismatch);
    cfg.model_google = golden("models/youtube.json");
    CHECK_NOTHROW(Pipeline{cfg});
}

TEST_CASE("cli exit codes") {
    const auto dir = fs::path(testing::scratch_dir("cli"));
    const auto conf = q(golden("golden.conf"));
    CHECK(cli("") == 1);
    CHECK(cli("--version") == 0);
    CHECK(cli("verify") == 1);
    CHECK(cli("verify --config " + conf + " 'garlic cures covid 2021'") == 3);
    CHECK(cli("verify --config " + conf + " --threshold 7 'x'") == 1);
    CHECK(cli("verify --config " + conf + " 'the of'") == 1);
    CHECK(cli("verify --config " + conf + " --id g05 'Holding your breath for ten seconds tests for coronavirus'") ==
          0);
    CHECK(cli("verify --config " + conf + " --image x.png 'claim'") != 0);
    CHECK(cli("predict --model " + q(golden("models/google.json")) + " --features " + q(golden("features_hybrid.csv")) +
              " --out " + q(dir / "p.jsonl")) == 4);
    CHECK(cli("train --features " + q(golden("features.csv")) + " --labels " + q(golden("claims.tsv")) +
              " --scope google --out " + q(dir / "m.json")) == 1);  // --seed is mandatory
    CHECK(cli("evaluate --pred /nonexistent --gold " + q(golden("claims.tsv")) + " --report -") == 2);

    // collect -> featurize -> train -> predict -> evaluate
    const auto claims = q(golden("claims.tsv"));
    REQUIRE(cli("collect --config " + conf + " --input " + claims + " --out " + q(dir / "ev.jsonl")) == 0);
    CHECK(read_file(dir / "ev.jsonl") == read_file(golden("evidence.jsonl")));
    REQUIRE(cli("featurize --claims " + claims + " --evidence " + q(dir / "ev.jsonl") + " --out " + q(dir / "f.csv") +
                " --hybrid-out " + q(dir / "h.csv")) == 0);
    CHECK(read_file(dir / "f.csv") == read_file(golden("features.csv")));
    CHECK(read_file(dir / "h.csv") == read_file(golden("features_hybrid.csv")));
    REQUIRE(cli("train --features " + q(dir / "f.csv") + " --labels " + claims + " --scope google --model logistic" +
                " --seed 7 --out " + q(dir / "m.json")) == 0);
    CHECK(read_file(dir / "m.json") == read_file(golden("models/google.json")));
    REQUIRE(cli("predict --model " + q(dir / "m.json") + " --features " + q(dir / "f.csv") +
                " --scope google --out " + q(dir / "p.jsonl")) == 0);
    REQUIRE(cli("evaluate --pred " + q(dir / "p.jsonl") + " --gold " + claims + " --report " + q(dir / "r.json")) == 0);
    const auto report = nlohmann::json::parse(read_file(dir / "r.json"));
    CHECK(report["accuracy"] == 1.0);

    // Verdict files evaluate too.
    REQUIRE(cli("batch --config " + conf + " --input " + claims + " --out " + q(dir / "v.jsonl")) == 0);
    CHECK(cli("evaluate --pred " + q(dir / "v.jsonl") + " --gold " + claims + " --report -") == 0);

    // Missing split files and a strict count check.
    write_file_atomic(dir / "splits" / "train.tsv", "id\ttweet\tlabel\n1\ta\treal\n");
    write_file_atomic(dir / "splits" / "val.tsv", "id\ttweet\tlabel\n1\ta\treal\n");
    write_file_atomic(dir / "splits" / "test.tsv", "id\ttweet\tlabel\n1\ta\treal\n");
    CHECK(cli("check-splits --dir " + q(dir / "splits")) == 0);
    CHECK(cli("check-splits --strict --dir " + q(dir / "splits")) == 5);
    CHECK(cli("check-splits --dir " + q(dir / "nothing")) == 2);
    fs::remove_all(dir);
}
