#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "mwv/evidence/html.hpp"
#include "mwv/evidence/http.hpp"
#include "mwv/evidence/types.hpp"

namespace mwv::evidence {

enum class EvidenceMode { Live, Replay, Record };

std::string_view to_string(EvidenceMode m) noexcept;
std::optional<EvidenceMode> parse_mode(std::string_view s) noexcept;

/// Recorded bundles on disk: one JSON Lines file per (platform, canonical query), named by the
/// SHA-256 of "<platform>\n<canonical query>". Each line is one title:
///   {"query":..., "platform":"google"|"youtube", "rank":n, "title":..., "url":..., "fetched_at":RFC3339}
/// Readers run concurrently; writers are serialized and replace files atomically.
class FixtureStore {
public:
    explicit FixtureStore(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }

    static std::string key(Platform platform, std::string_view query_text);
    std::filesystem::path path_for(Platform platform, std::string_view query_text) const;

    std::optional<std::vector<EvidenceTitle>> load(Platform platform, std::string_view query_text) const;
    void save(Platform platform, std::string_view query_text, const std::vector<EvidenceTitle>& titles);

    static std::string encode(Platform platform, std::string_view query_text, const std::vector<EvidenceTitle>& titles);
    static std::vector<EvidenceTitle> decode(std::string_view jsonl, Platform platform, std::string_view query_text);

private:
    std::filesystem::path root_;
    mutable std::shared_mutex mutex_;
};

// One search platform. search() returns up to 10 (url, title) results in result order.
class EvidenceProvider {
public:
    virtual ~EvidenceProvider() = default;
    virtual Platform platform() const = 0;
    virtual std::vector<ResultLink> search(const BuiltQuery& query) = 0;
};

// Fetches the search results page, then every result page, and keeps each page's <title>.
class GoogleProvider final : public EvidenceProvider {
public:
    GoogleProvider(std::shared_ptr<HttpClient> client, HttpOptions options);
    Platform platform() const override { return Platform::Google; }
    std::vector<ResultLink> search(const BuiltQuery& query) override;

private:
    std::shared_ptr<HttpClient> client_;
    HttpOptions options_;
};

// Reads "video-title" anchors from the results page, falling back to the embedded initial data.
class YouTubeProvider final : public EvidenceProvider {
public:
    YouTubeProvider(std::shared_ptr<HttpClient> client, HttpOptions options);
    Platform platform() const override { return Platform::YouTube; }
    std::vector<ResultLink> search(const BuiltQuery& query) override;

private:
    std::shared_ptr<HttpClient> client_;
    HttpOptions options_;
};

class EvidenceCollector {
public:
    using Clock = std::function<Timestamp()>;

    // store may be null when only live mode is used.
    explicit EvidenceCollector(std::shared_ptr<FixtureStore> store, Clock clock = {});

    void register_provider(std::unique_ptr<EvidenceProvider> provider);
    bool has_provider(Platform p) const { return providers_.count(p) > 0; }

    /// live: search and rank the results; record: live, then persist; replay: the stored bundle
    /// unchanged (MissingFixture if absent). An empty result is returned as an empty bundle.
    EvidenceBundle collect(const BuiltQuery& query, Platform platform, EvidenceMode mode) const;

private:
    EvidenceBundle fetch_live(const BuiltQuery& query, Platform platform) const;

    std::shared_ptr<FixtureStore> store_;
    Clock clock_;
    std::map<Platform, std::unique_ptr<EvidenceProvider>> providers_;
};

}  // namespace mwv::evidence
