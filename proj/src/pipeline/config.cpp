#include <cstdlib>
#include <fstream>

#include "mwv/error.hpp"
#include "mwv/pipeline.hpp"
#include "mwv/util.hpp"

#ifndef MWV_DEFAULT_DATA_DIR
#define MWV_DEFAULT_DATA_DIR "data"
#endif

namespace mwv::pipeline {

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("MWV_DATA_DIR"); env && *env) return env;
    return MWV_DEFAULT_DATA_DIR;
}

namespace {

bool parse_bool(std::string_view key, std::string_view v) {
    const std::string s = to_lower_ascii(trim(v));
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw Error(ErrorCode::BadConfig, std::string(key) + ": expected true or false, got '" + std::string(v) + "'");
}

long long parse_whole(std::string_view key, std::string_view v, long long lo) {
    const auto n = parse_int(trim(v));
    if (!n || *n < lo) {
        throw Error(ErrorCode::BadConfig, std::string(key) + ": expected an integer >= " + std::to_string(lo) + ", got '" +
                                              std::string(v) + "'");
    }
    return *n;
}

std::filesystem::path resolve(std::string_view v, const std::filesystem::path& base) {
    std::filesystem::path p{std::string(trim(v))};
    if (p.empty() || p.is_absolute() || base.empty()) return p;
    return base / p;
}

}  // namespace

void PipelineConfig::set(std::string_view raw_key, std::string_view value, const std::filesystem::path& base) {
    const std::string key = to_lower_ascii(trim(raw_key));
    const std::string v = trim(value);
    if (key == "build_case") {
        strategy = BuildStrategy::parse(v);
    } else if (key == "providers") {
        providers = evidence::parse_platform_list(v);
        if (providers.empty()) throw Error(ErrorCode::BadConfig, "providers: at least one platform is required");
    } else if (key == "mode") {
        const auto m = evidence::parse_mode(v);
        if (!m) throw Error(ErrorCode::BadConfig, "mode: expected live, record or replay");
        mode = *m;
    } else if (key == "fixtures") {
        fixtures = resolve(v, base);
    } else if (key == "threshold" || key == "tau") {
        const auto t = parse_double(v);
        if (!t || !(*t >= 0.0 && *t <= 1.0)) throw Error(ErrorCode::BadConfig, "threshold must be a number in [0, 1]");
        tau = *t;
    } else if (key == "data_dir") {
        data_dir = resolve(v, base);
    } else if (key == "stopwords") {
        stopwords = resolve(v, base);
    } else if (key == "sentiment_lexicon") {
        sentiment_lexicon = resolve(v, base);
    } else if (key == "pos_lexicon") {
        pos_lexicon = resolve(v, base);
    } else if (key == "fake_phrases") {
        fake_phrases = resolve(v, base);
    } else if (key == "lexdb") {
        lexdb = resolve(v, base);
    } else if (key == "match_mode") {
        const std::string m = to_lower_ascii(v);
        if (m == "substring") {
            match_mode = features::MatchMode::Substring;
        } else if (m == "word" || m == "word_boundary" || m == "word-boundary") {
            match_mode = features::MatchMode::WordBoundary;
        } else {
            throw Error(ErrorCode::BadConfig, "match_mode: expected substring or word");
        }
    } else if (key == "stem") {
        stem = parse_bool(key, v);
    } else if (key == "model_google") {
        model_google = resolve(v, base);
    } else if (key == "model_youtube") {
        model_youtube = resolve(v, base);
    } else if (key == "model_hybrid") {
        model_hybrid = resolve(v, base);
    } else if (key == "vote_rule") {
        const auto r = eval::parse_vote_rule(v);
        if (!r) throw Error(ErrorCode::BadConfig, "vote_rule: expected majority or hybrid-only");
        vote_rule = *r;
    } else if (key == "tie_break") {
        const auto l = parse_label(v);
        if (!l) throw Error(ErrorCode::BadConfig, "tie_break: expected fake or real");
        tie_break = *l;
    } else if (key == "seed") {
        seed = static_cast<std::uint64_t>(parse_whole(key, v, 0));
    } else if (key == "workers") {
        workers = static_cast<int>(parse_whole(key, v, 1));
    } else if (key == "fail_fast") {
        fail_fast = parse_bool(key, v);
    } else if (key == "timeout_ms") {
        http.timeout = std::chrono::milliseconds(parse_whole(key, v, 1));
    } else if (key == "retries") {
        http.retries = static_cast<int>(parse_whole(key, v, 0));
    } else if (key == "polite_delay_ms") {
        http.polite_delay = std::chrono::milliseconds(parse_whole(key, v, 0));
    } else if (key == "user_agent") {
        http.user_agent = v;
    } else {
        throw Error(ErrorCode::BadConfig, "unknown configuration key '" + key + "'");
    }
}

void PipelineConfig::merge_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
    const auto base = path.parent_path();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // A '#' at the start or after whitespace opens a comment.
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '#' && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
                line.erase(i);
                break;
            }
        }
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::BadConfig, path.string() + " line " + std::to_string(lineno) + ": expected key = value");
        }
        set(t.substr(0, eq), t.substr(eq + 1), base.empty() ? std::filesystem::path(".") : base);
    }
}

PipelineConfig PipelineConfig::load_file(const std::filesystem::path& path) {
    PipelineConfig cfg;
    cfg.merge_file(path);
    return cfg;
}

std::filesystem::path PipelineConfig::resource(std::string_view key) const {
    auto pick = [&](const std::filesystem::path& set, const char* name) { return set.empty() ? data_dir / name : set; };
    if (key == "stopwords") return pick(stopwords, "stopwords.txt");
    if (key == "sentiment_lexicon") return pick(sentiment_lexicon, "sentiment_lexicon.tsv");
    if (key == "pos_lexicon") return pick(pos_lexicon, "pos_lexicon.tsv");
    if (key == "fake_phrases") return pick(fake_phrases, "fake_phrases.txt");
    if (key == "lexdb") return pick(lexdb, "lexdb");
    throw Error(ErrorCode::BadConfig, "unknown resource '" + std::string(key) + "'");
}

std::map<std::string, std::string> PipelineConfig::snapshot() const {
    std::map<std::string, std::string> s;
    s["build_case"] = strategy.to_string();
    std::string prov;
    for (auto p : providers) {
        if (!prov.empty()) prov += ',';
        prov += to_string(p);
    }
    s["providers"] = prov;
    s["mode"] = std::string(evidence::to_string(mode));
    s["fixtures"] = fixtures.generic_string();
    s["threshold"] = format_double(tau);
    s["data_dir"] = data_dir.generic_string();
    for (const char* k : {"stopwords", "sentiment_lexicon", "pos_lexicon", "fake_phrases", "lexdb"}) {
        s[k] = resource(k).generic_string();
    }
    s["match_mode"] = match_mode == features::MatchMode::Substring ? "substring" : "word";
    s["stem"] = stem ? "true" : "false";
    s["model_google"] = model_google.generic_string();
    s["model_youtube"] = model_youtube.generic_string();
    s["model_hybrid"] = model_hybrid.generic_string();
    s["vote_rule"] = std::string(eval::to_string(vote_rule));
    s["tie_break"] = std::string(to_string(tie_break));
    s["seed"] = std::to_string(seed);
    s["workers"] = std::to_string(workers);
    s["fail_fast"] = fail_fast ? "true" : "false";
    s["timeout_ms"] = std::to_string(http.timeout.count());
    s["retries"] = std::to_string(http.retries);
    s["polite_delay_ms"] = std::to_string(http.polite_delay.count());
    s["user_agent"] = http.user_agent;
    return s;
}

void PipelineConfig::validate() const {
    if (!(tau >= 0.0 && tau <= 1.0)) throw Error(ErrorCode::BadConfig, "threshold must lie in [0, 1]");
    if (workers < 1) throw Error(ErrorCode::BadConfig, "workers must be at least 1");
    if (providers.empty()) throw Error(ErrorCode::BadConfig, "no providers enabled");
    for (const char* k : {"stopwords", "sentiment_lexicon", "pos_lexicon", "fake_phrases", "lexdb"}) {
        const auto p = resource(k);
        if (!std::filesystem::exists(p)) throw Error(ErrorCode::IoError, std::string(k) + " not found: " + p.string());
    }
    for (const auto* p : {&model_google, &model_youtube, &model_hybrid}) {
        if (!p->empty() && !std::filesystem::exists(*p)) throw Error(ErrorCode::IoError, "model not found: " + p->string());
    }
    if (mode != evidence::EvidenceMode::Live && fixtures.empty()) {
        throw Error(ErrorCode::BadConfig, std::string(evidence::to_string(mode)) + " mode needs a fixture directory");
    }
    if (mode == evidence::EvidenceMode::Replay && !std::filesystem::is_directory(fixtures)) {
        throw Error(ErrorCode::IoError, "fixture directory not found: " + fixtures.string());
    }
}

}  // namespace mwv::pipeline
