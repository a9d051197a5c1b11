#include "mwv/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <thread>

#include "mwv/util.hpp"

namespace mwv::pipeline {

using ordered_json = nlohmann::ordered_json;
using evidence::Platform;
using features::Scope;

namespace {

[[noreturn]] void rethrow_staged(std::string_view stage, const Error& e) {
    throw Error(e.code(), std::string(stage) + ": " + e.message());
}

std::string dump_line(const ordered_json& j) {
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::string now_rfc3339() {
    return evidence::format_rfc3339(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

// Stage of an error message produced by Pipeline::verify.
std::string stage_of(const std::string& message) {
    for (const char* s : {"query", "collect", "features", "predict", "vote"}) {
        if (message.rfind(std::string(s) + ": ", 0) == 0) return s;
    }
    return "pipeline";
}

}  // namespace

std::string extract_image_text(const std::filesystem::path& image) {
    throw Error(ErrorCode::NotSupported, "image input is not supported (" + image.string() + ")");
}

std::string translate_to_english(std::string_view text) { return std::string(text); }

Resources Resources::load(const PipelineConfig& cfg) {
    Resources r;
    r.stopwords = text::StopwordList::load_file(cfg.resource("stopwords"));
    r.lexicon = text::SentimentLexicon::load_file(cfg.resource("sentiment_lexicon"));
    r.tagger = text::PosTagger::load_file(cfg.resource("pos_lexicon"));
    r.lexdb = text::LexicalDatabase::load_directory(cfg.resource("lexdb"));
    r.corpus = features::FakePhraseCorpus::load_file(cfg.resource("fake_phrases"));
    return r;
}

std::optional<Label> Verdict::label_for(Scope s) const {
    for (const auto& o : scopes) {
        if (o.scope == s) return o.label;
    }
    return std::nullopt;
}

std::string verdict_json(const Verdict& v) {
    ordered_json j;
    j["claim_id"] = v.claim_id;
    j["final"] = std::string(to_string(v.vote.final));
    ordered_json labels = ordered_json::object();
    for (auto s : {Scope::Google, Scope::YouTube, Scope::Hybrid}) {
        const auto l = v.label_for(s);
        labels[std::string(features::to_string(s))] = l ? ordered_json(std::string(to_string(*l))) : ordered_json(nullptr);
    }
    j["labels"] = labels;
    j["votes"] = {{"misleading", v.vote.votes_misleading}, {"real", v.vote.votes_real}, {"voters", v.vote.voters}};
    j["support"] = v.vote.support;
    j["tie_broken"] = v.vote.tie_broken;
    j["insufficient_evidence"] = v.insufficient_evidence;
    j["queries"] = v.queries;
    ordered_json feats = ordered_json::object();
    for (const auto& o : v.scopes) {
        ordered_json f;
        f["values"] = o.features;
        f["probability"] = o.probability ? ordered_json(*o.probability) : ordered_json(nullptr);
        feats[std::string(features::to_string(o.scope))] = f;
    }
    j["features"] = feats;
    j["titles_seen"] = v.titles_seen;
    ordered_json trail = ordered_json::array();
    for (const auto& t : v.trail) {
        ordered_json e;
        e["platform"] = std::string(to_string(t.platform));
        e["rank"] = t.rank;
        e["query"] = t.query;
        e["title"] = t.title;
        e["url"] = t.url;
        e["cosine"] = t.signals.cosine;
        e["semantic"] = t.signals.semantic;
        e["fake_flag"] = t.signals.fake_flag;
        e["qm_flag"] = t.signals.qm_flag;
        e["polarity"] = std::string(text::to_string(t.signals.polarity));
        trail.push_back(std::move(e));
    }
    j["evidence"] = trail;
    return dump_line(j);
}

std::string claim_error_json(const ClaimError& e) {
    ordered_json j;
    j["claim_id"] = e.claim_id;
    j["error"] = {{"code", std::string(to_string(e.code))}, {"stage", e.stage}, {"message", e.message}};
    return dump_line(j);
}

std::string manifest_json(const RunManifest& m) {
    ordered_json j;
    j["tool_version"] = m.tool_version;
    j["config"] = m.config;
    j["input"] = {{"path", m.input_path}, {"sha256", m.input_sha256}};
    j["counts"] = m.counts;
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    return j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

std::size_t BatchResult::verdict_count() const {
    std::size_t n = 0;
    for (const auto& o : outcomes) n += std::holds_alternative<Verdict>(o) ? 1 : 0;
    return n;
}

std::size_t BatchResult::error_count() const { return outcomes.size() - verdict_count(); }

std::string BatchResult::verdicts_jsonl() const {
    std::string out;
    for (const auto& o : outcomes) {
        out += std::holds_alternative<Verdict>(o) ? verdict_json(std::get<Verdict>(o)) : claim_error_json(std::get<ClaimError>(o));
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------

std::shared_ptr<evidence::EvidenceCollector> make_collector(const PipelineConfig& cfg) {
    std::shared_ptr<evidence::FixtureStore> store;
    if (!cfg.fixtures.empty()) store = std::make_shared<evidence::FixtureStore>(cfg.fixtures);
    auto collector = std::make_shared<evidence::EvidenceCollector>(store);
    if (cfg.mode != evidence::EvidenceMode::Replay) {
        std::shared_ptr<evidence::HttpClient> client = evidence::make_network_client(cfg.http);
        for (auto p : cfg.providers) {
            if (p == Platform::Google) {
                collector->register_provider(std::make_unique<evidence::GoogleProvider>(client, cfg.http));
            } else {
                collector->register_provider(std::make_unique<evidence::YouTubeProvider>(client, cfg.http));
            }
        }
    }
    return collector;
}

features::FeatureContext make_context(const Resources& res, const PipelineConfig& cfg) {
    features::FeatureContext ctx{res.stopwords, res.lexicon, res.tagger, res.lexdb, res.corpus};
    ctx.match_mode = cfg.match_mode;
    ctx.stem = cfg.stem;
    return ctx;
}

std::vector<CollectedEvidence> collect_claim(const Claim& claim, const PipelineConfig& cfg, const Resources& res,
                                             const evidence::EvidenceCollector& collector) {
    std::vector<BuiltQuery> queries;
    try {
        queries = build_queries(claim, cfg.strategy, res.stopwords, res.tagger);
    } catch (const Error& e) {
        rethrow_staged("query", e);
    }
    std::vector<CollectedEvidence> out;
    for (auto platform : {Platform::Google, Platform::YouTube}) {
        if (std::find(cfg.providers.begin(), cfg.providers.end(), platform) == cfg.providers.end()) continue;
        std::vector<evidence::EvidenceBundle> bundles;
        try {
            for (const auto& q : queries) bundles.push_back(collector.collect(q, platform, cfg.mode));
        } catch (const Error& e) {
            rethrow_staged("collect", e);
        }
        out.push_back({claim.id, platform, queries, evidence::merge_bundles(bundles)});
    }
    return out;
}

std::string evidence_json(const CollectedEvidence& e) {
    ordered_json j;
    j["claim_id"] = e.claim_id;
    j["platform"] = std::string(to_string(e.platform));
    ordered_json qs = ordered_json::array();
    for (const auto& q : e.queries) qs.push_back({{"text", q.text}, {"content", q.content}});
    j["queries"] = qs;
    ordered_json ts = ordered_json::array();
    for (const auto& st : e.merged.titles) {
        ordered_json t;
        t["query_index"] = st.query_index;
        t["rank"] = st.title.rank;
        t["title"] = st.title.title;
        t["url"] = st.title.url;
        t["fetched_at"] = evidence::format_rfc3339(st.title.fetched_at);
        ts.push_back(std::move(t));
    }
    j["titles"] = ts;
    return dump_line(j);
}

std::vector<CollectedEvidence> read_evidence_jsonl(std::istream& in) {
    std::vector<CollectedEvidence> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const std::string where = "evidence line " + std::to_string(lineno);
        try {
            const auto j = nlohmann::json::parse(line);
            CollectedEvidence e;
            e.claim_id = j.at("claim_id").get<std::string>();
            const auto p = evidence::parse_platform(j.at("platform").get<std::string>());
            if (!p) throw Error(ErrorCode::ParseError, where + ": unknown platform");
            e.platform = *p;
            e.merged.platform = *p;
            for (const auto& q : j.at("queries")) {
                BuiltQuery bq;
                bq.claim_id = e.claim_id;
                bq.text = q.at("text").get<std::string>();
                bq.content = q.at("content").get<std::string>();
                e.queries.push_back(std::move(bq));
            }
            for (const auto& t : j.at("titles")) {
                evidence::SourcedTitle st;
                st.query_index = t.at("query_index").get<std::size_t>();
                if (st.query_index >= e.queries.size()) throw Error(ErrorCode::ParseError, where + ": query_index out of range");
                st.title.platform = *p;
                st.title.rank = t.at("rank").get<int>();
                st.title.title = t.at("title").get<std::string>();
                st.title.url = t.value("url", std::string{});
                const auto ts = evidence::parse_rfc3339(t.at("fetched_at").get<std::string>());
                if (!ts) throw Error(ErrorCode::ParseError, where + ": bad fetched_at");
                st.title.fetched_at = *ts;
                e.merged.titles.push_back(std::move(st));
            }
            out.push_back(std::move(e));
        } catch (const nlohmann::json::exception& ex) {
            throw Error(ErrorCode::ParseError, where + ": " + ex.what());
        }
    }
    return out;
}

std::vector<CollectedEvidence> read_evidence_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return read_evidence_jsonl(in);
}

FeaturizeResult featurize(const std::vector<Claim>& claims, const std::vector<CollectedEvidence>& evidence,
                          const features::FeatureContext& ctx, double tau) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < claims.size(); ++i) index.emplace(claims[i].id, i);
    std::vector<std::optional<features::ClaimFeatures>> google(claims.size());
    std::vector<std::optional<features::ClaimFeatures>> youtube(claims.size());
    for (const auto& e : evidence) {
        const auto it = index.find(e.claim_id);
        if (it == index.end()) throw Error(ErrorCode::MismatchedClaim, "evidence for unknown claim '" + e.claim_id + "'");
        auto ex = features::extract_platform(claims[it->second], e.queries, e.merged, ctx, tau);
        (e.platform == Platform::Google ? google : youtube)[it->second] = std::move(ex.aggregate.features);
    }
    FeaturizeResult r;
    for (std::size_t i = 0; i < claims.size(); ++i) {
        if (google[i]) r.platform_rows.push_back(*google[i]);
        if (youtube[i]) r.platform_rows.push_back(*youtube[i]);
        if (google[i] || youtube[i]) {
            r.hybrid_rows.push_back(features::hybrid_concat(google[i] ? &*google[i] : nullptr,
                                                            youtube[i] ? &*youtube[i] : nullptr));
        }
    }
    return r;
}

// ---------------------------------------------------------------------------

Pipeline::Pipeline(PipelineConfig cfg, std::shared_ptr<evidence::EvidenceCollector> collector)
    : cfg_(std::move(cfg)), collector_(std::move(collector)) {
    cfg_.validate();
    res_ = std::make_unique<Resources>(Resources::load(cfg_));

    auto load = [](const std::filesystem::path& p, std::size_t dim, const char* scope) -> std::unique_ptr<learn::Model> {
        if (p.empty()) return nullptr;
        auto m = learn::load_model_file(p);
        if (m->dim() != dim) {
            throw Error(ErrorCode::DimensionMismatch, std::string(scope) + " model expects " + std::to_string(m->dim()) +
                                                          " features, the scope has " + std::to_string(dim));
        }
        return m;
    };
    model_google_ = load(cfg_.model_google, features::ClaimFeatures::kDim, "google");
    model_youtube_ = load(cfg_.model_youtube, features::ClaimFeatures::kDim, "youtube");
    model_hybrid_ = load(cfg_.model_hybrid, 2 * features::ClaimFeatures::kDim, "hybrid");

    if (!collector_) collector_ = make_collector(cfg_);
}

features::FeatureContext Pipeline::context() const { return make_context(*res_, cfg_); }

Verdict Pipeline::verify_text(std::string_view text, std::string id) const {
    return verify(Claim{std::move(id), std::string(text), std::nullopt});
}

Verdict Pipeline::verify(const Claim& input) const {
    Claim claim = input;
    claim.text = translate_to_english(claim.text);
    Verdict v;
    v.claim_id = claim.id;

    const auto collected = collect_claim(claim, cfg_, *res_, *collector_);
    if (!collected.empty()) {
        for (const auto& q : collected.front().queries) v.queries.push_back(q.text);
    }

    const auto ctx = context();
    std::optional<features::ClaimFeatures> google;
    std::optional<features::ClaimFeatures> youtube;
    for (const auto& ce : collected) {
        features::PlatformExtraction ex;
        try {
            ex = features::extract_platform(claim, ce.queries, ce.merged, ctx, cfg_.tau);
        } catch (const Error& e) {
            rethrow_staged("features", e);
        }
        v.titles_seen += ce.merged.titles.size();
        for (std::size_t i : ex.aggregate.retained) {
            const auto& st = ce.merged.titles[i];
            v.trail.push_back({ce.platform, st.title.rank, ce.queries[st.query_index].text, st.title.title, st.title.url,
                               ex.titles[i]});
        }
        (ce.platform == Platform::Google ? google : youtube) = ex.aggregate.features;
    }
    v.insufficient_evidence = v.titles_seen == 0;

    auto score = [&](Scope scope, std::vector<double> x, const learn::Model* model) {
        ScopeOutcome o;
        o.scope = scope;
        o.features = std::move(x);
        if (model) {
            try {
                o.label = model->predict(o.features);
                if (model->has_proba()) o.probability = model->predict_proba(o.features);
            } catch (const Error& e) {
                rethrow_staged("predict", e);
            }
        }
        v.scopes.push_back(std::move(o));
    };
    if (google) score(Scope::Google, google->to_vector(), model_google_.get());
    if (youtube) score(Scope::YouTube, youtube->to_vector(), model_youtube_.get());
    if (google && youtube) {
        const auto h = features::hybrid_concat(&*google, &*youtube);
        score(Scope::Hybrid, h.to_vector(), model_hybrid_.get());
    }

    try {
        v.vote = eval::platform_vote(v.label_for(Scope::Google), v.label_for(Scope::YouTube), v.label_for(Scope::Hybrid),
                                     cfg_.vote_rule, cfg_.tie_break);
    } catch (const Error& e) {
        rethrow_staged("vote", e);
    }
    return v;
}

BatchResult Pipeline::run_batch(const std::vector<Claim>& claims) const {
    BatchResult result;
    result.manifest.config = cfg_.snapshot();
    result.manifest.started_at = now_rfc3339();

    std::vector<std::optional<std::variant<Verdict, ClaimError>>> slots(claims.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    auto worker = [&] {
        for (;;) {
            if (stop.load()) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= claims.size()) return;
            try {
                slots[i] = verify(claims[i]);
            } catch (const Error& e) {
                slots[i] = ClaimError{claims[i].id, e.code(), stage_of(e.message()), e.message()};
                if (cfg_.fail_fast) stop.store(true);
            } catch (const std::exception& e) {
                slots[i] = ClaimError{claims[i].id, ErrorCode::IoError, "pipeline", e.what()};
                if (cfg_.fail_fast) stop.store(true);
            }
        }
    };
    const std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(cfg_.workers), std::max<std::size_t>(1, claims.size()));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (std::size_t t = 0; t < n_workers; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    if (cfg_.fail_fast) {
        for (const auto& s : slots) {
            if (s && std::holds_alternative<ClaimError>(*s)) {
                const auto& e = std::get<ClaimError>(*s);
                throw Error(e.code, "claim " + e.claim_id + ": " + e.message);
            }
        }
    }

    std::size_t queries = 0;
    std::size_t titles = 0;
    std::size_t retained = 0;
    for (auto& s : slots) {
        if (!s) continue;
        if (const auto* v = std::get_if<Verdict>(&*s)) {
            queries += v->queries.size();
            titles += v->titles_seen;
            retained += v->trail.size();
        }
        result.outcomes.push_back(std::move(*s));
    }
    result.manifest.counts = {{"claims", claims.size()},         {"verdicts", result.verdict_count()},
                              {"errors", result.error_count()},  {"queries", queries},
                              {"titles", titles},                {"retained", retained}};
    result.manifest.finished_at = now_rfc3339();
    return result;
}

BatchResult run_batch_file(const Pipeline& pipeline, const std::filesystem::path& dataset,
                           const std::filesystem::path& out) {
    const std::string contents = read_file(dataset);
    eval::LoadOptions opts;
    opts.require_label = false;
    const auto records = eval::load_dataset(dataset, opts);
    auto result = pipeline.run_batch(eval::to_claims(records));
    result.manifest.input_path = dataset.generic_string();
    result.manifest.input_sha256 = sha256_hex(contents);
    write_file_atomic(out, result.verdicts_jsonl());
    std::filesystem::path manifest = out;
    manifest += ".manifest.json";
    write_file_atomic(manifest, manifest_json(result.manifest));
    return result;
}

}  // namespace mwv::pipeline
