#include "mwv/evidence/collector.hpp"

#include <json.hpp>

#include <algorithm>
#include <mutex>
#include <thread>

#include "mwv/error.hpp"
#include "mwv/text/normalize.hpp"
#include "mwv/util.hpp"

namespace mwv::evidence {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(EvidenceMode m) noexcept {
    switch (m) {
        case EvidenceMode::Live: return "live";
        case EvidenceMode::Replay: return "replay";
        case EvidenceMode::Record: return "record";
    }
    return "replay";
}

std::optional<EvidenceMode> parse_mode(std::string_view s) noexcept {
    const std::string v = to_lower_ascii(trim(s));
    if (v == "live") return EvidenceMode::Live;
    if (v == "replay") return EvidenceMode::Replay;
    if (v == "record") return EvidenceMode::Record;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// FixtureStore

FixtureStore::FixtureStore(std::filesystem::path root) : root_(std::move(root)) {}

std::string FixtureStore::key(Platform platform, std::string_view query_text) {
    std::string material(to_string(platform));
    material += '\n';
    material += canonical_query(query_text);
    return sha256_hex(material);
}

std::filesystem::path FixtureStore::path_for(Platform platform, std::string_view query_text) const {
    return root_ / (key(platform, query_text) + ".jsonl");
}

std::string FixtureStore::encode(Platform platform, std::string_view query_text,
                                 const std::vector<EvidenceTitle>& titles) {
    const std::string canon = canonical_query(query_text);
    std::string out;
    for (const auto& t : titles) {
        ordered_json j;
        j["query"] = canon;
        j["platform"] = std::string(to_string(platform));
        j["rank"] = t.rank;
        j["title"] = t.title;
        j["url"] = t.url;
        j["fetched_at"] = format_rfc3339(t.fetched_at);
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<EvidenceTitle> FixtureStore::decode(std::string_view jsonl, Platform platform,
                                                std::string_view query_text) {
    const std::string canon = canonical_query(query_text);
    std::vector<EvidenceTitle> titles;
    std::size_t lineno = 0;
    for (const auto& line : split(jsonl, '\n')) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto where = "fixture line " + std::to_string(lineno);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ParseError, where + ": " + e.what());
        }
        try {
            const auto p = parse_platform(j.at("platform").get<std::string>());
            if (!p || *p != platform) throw Error(ErrorCode::ParseError, where + ": platform mismatch");
            if (canonical_query(j.at("query").get<std::string>()) != canon) {
                throw Error(ErrorCode::ParseError, where + ": query mismatch");
            }
            EvidenceTitle t;
            t.platform = platform;
            t.rank = j.at("rank").get<int>();
            t.title = j.at("title").get<std::string>();
            t.url = j.value("url", std::string{});
            const auto ts = parse_rfc3339(j.at("fetched_at").get<std::string>());
            if (!ts) throw Error(ErrorCode::ParseError, where + ": bad fetched_at");
            t.fetched_at = *ts;
            if (t.title.empty()) throw Error(ErrorCode::ParseError, where + ": empty title");
            titles.push_back(std::move(t));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ParseError, where + ": " + e.what());
        }
    }
    std::stable_sort(titles.begin(), titles.end(),
                     [](const EvidenceTitle& a, const EvidenceTitle& b) { return a.rank < b.rank; });
    for (std::size_t i = 0; i < titles.size(); ++i) {
        if (titles[i].rank != static_cast<int>(i) + 1) {
            throw Error(ErrorCode::ParseError, "fixture ranks must be 1..n without gaps");
        }
    }
    if (titles.size() > kMaxTitles) throw Error(ErrorCode::ParseError, "fixture holds more than 10 titles");
    return titles;
}

std::optional<std::vector<EvidenceTitle>> FixtureStore::load(Platform platform, std::string_view query_text) const {
    const auto path = path_for(platform, query_text);
    std::string contents;
    {
        std::shared_lock lock(mutex_);
        if (!std::filesystem::exists(path)) return std::nullopt;
        contents = read_file(path);
    }
    return decode(contents, platform, query_text);
}

void FixtureStore::save(Platform platform, std::string_view query_text, const std::vector<EvidenceTitle>& titles) {
    const std::string contents = encode(platform, query_text, titles);
    std::unique_lock lock(mutex_);
    write_file_atomic(path_for(platform, query_text), contents);
}

// ---------------------------------------------------------------------------
// Providers

namespace {

HttpResponse polite_get(HttpClient& client, const std::string& url, const HttpOptions& options) {
    if (options.polite_delay.count() > 0) std::this_thread::sleep_for(options.polite_delay);
    return get_with_retry(client, url, options);
}

}  // namespace

GoogleProvider::GoogleProvider(std::shared_ptr<HttpClient> client, HttpOptions options)
    : client_(std::move(client)), options_(std::move(options)) {}

std::vector<ResultLink> GoogleProvider::search(const BuiltQuery& query) {
    const std::string serp_url = "https://www.google.com/search?q=" + url_encode(query.text) + "&num=10&hl=en";
    const auto serp = polite_get(*client_, serp_url, options_);
    if (serp.status >= 400) {
        throw Error(ErrorCode::ProviderUnavailable, "google search answered HTTP " + std::to_string(serp.status));
    }
    std::vector<FetchedPage> pages;
    for (const auto& link : extract_result_links(serp.body, kMaxTitles)) {
        try {
            auto page = polite_get(*client_, link, options_);
            if (page.status < 400) pages.push_back({link, std::move(page.body)});
        } catch (const Error& e) {
            // One unreachable result page does not sink the query.
            if (e.code() != ErrorCode::ProviderUnavailable) throw;
        }
    }
    return parse_google_results(pages);
}

YouTubeProvider::YouTubeProvider(std::shared_ptr<HttpClient> client, HttpOptions options)
    : client_(std::move(client)), options_(std::move(options)) {}

std::vector<ResultLink> YouTubeProvider::search(const BuiltQuery& query) {
    const std::string url = "https://www.youtube.com/results?search_query=" + url_encode(query.text);
    const auto res = polite_get(*client_, url, options_);
    if (res.status >= 400) {
        throw Error(ErrorCode::ProviderUnavailable, "youtube search answered HTTP " + std::to_string(res.status));
    }
    auto links = parse_youtube_results(res.body);
    if (links.empty()) links = parse_youtube_initial_data(res.body);
    return links;
}

// ---------------------------------------------------------------------------
// EvidenceCollector

EvidenceCollector::EvidenceCollector(std::shared_ptr<FixtureStore> store, Clock clock)
    : store_(std::move(store)), clock_(std::move(clock)) {
    if (!clock_) {
        clock_ = [] { return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()); };
    }
}

void EvidenceCollector::register_provider(std::unique_ptr<EvidenceProvider> provider) {
    const Platform p = provider->platform();
    providers_[p] = std::move(provider);
}

EvidenceBundle EvidenceCollector::fetch_live(const BuiltQuery& query, Platform platform) const {
    auto it = providers_.find(platform);
    if (it == providers_.end()) {
        throw Error(ErrorCode::BadConfig, "no provider registered for " + std::string(to_string(platform)));
    }
    const auto links = it->second->search(query);
    const Timestamp now = clock_();
    EvidenceBundle bundle{query, platform, {}};
    for (const auto& link : links) {
        if (bundle.titles.size() >= kMaxTitles) break;
        std::string title = text::normalize_text(link.title);
        if (title.empty()) continue;
        bundle.titles.push_back({platform, static_cast<int>(bundle.titles.size()) + 1, std::move(title), link.url, now});
    }
    return bundle;
}

EvidenceBundle EvidenceCollector::collect(const BuiltQuery& query, Platform platform, EvidenceMode mode) const {
    switch (mode) {
        case EvidenceMode::Replay: {
            if (!store_) throw Error(ErrorCode::BadConfig, "replay mode needs a fixture directory");
            auto titles = store_->load(platform, query.text);
            if (!titles) {
                throw Error(ErrorCode::MissingFixture,
                            std::string(to_string(platform)) + " query '" + canonical_query(query.text) + "'");
            }
            return {query, platform, std::move(*titles)};
        }
        case EvidenceMode::Record: {
            if (!store_) throw Error(ErrorCode::BadConfig, "record mode needs a fixture directory");
            auto bundle = fetch_live(query, platform);
            store_->save(platform, query.text, bundle.titles);
            return bundle;
        }
        case EvidenceMode::Live:
            return fetch_live(query, platform);
    }
    throw Error(ErrorCode::BadConfig, "unknown evidence mode");
}

}  // namespace mwv::evidence
