#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mwv/querybuild.hpp"

namespace mwv::evidence {

enum class Platform { Google, YouTube };

inline constexpr std::size_t kMaxTitles = 10;

std::string_view to_string(Platform p) noexcept;
std::optional<Platform> parse_platform(std::string_view s) noexcept;
// Comma-separated list such as "google,youtube"; Usage error on unknown names.
std::vector<Platform> parse_platform_list(std::string_view s);

using Timestamp = std::chrono::sys_seconds;

std::string format_rfc3339(Timestamp t);
// Accepts "YYYY-MM-DDTHH:MM:SS" followed by optional fraction and "Z" or "+HH:MM"/"-HH:MM".
std::optional<Timestamp> parse_rfc3339(std::string_view s);

struct EvidenceTitle {
    Platform platform = Platform::Google;
    int rank = 1;
    std::string title;
    std::string url;
    Timestamp fetched_at{};

    friend bool operator==(const EvidenceTitle&, const EvidenceTitle&) = default;
};

struct EvidenceBundle {
    BuiltQuery query;
    Platform platform = Platform::Google;
    std::vector<EvidenceTitle> titles;  // rank 1..n, n <= 10

    // Zero parsed titles is reported, not raised.
    bool empty_evidence() const noexcept { return titles.empty(); }
};

// Lowercased, trimmed, whitespace-collapsed query text; the fixture key is derived from it.
std::string canonical_query(std::string_view text);

// A title together with the query (by index) that retrieved it.
struct SourcedTitle {
    std::size_t query_index = 0;
    EvidenceTitle title;
};

struct MergedEvidence {
    Platform platform = Platform::Google;
    std::vector<SourcedTitle> titles;
};

/// Concatenates bundles in query order and keeps the first `cap` titles, re-ranked 1..n.
MergedEvidence merge_bundles(std::span<const EvidenceBundle> bundles, std::size_t cap = kMaxTitles);

}  // namespace mwv::evidence
