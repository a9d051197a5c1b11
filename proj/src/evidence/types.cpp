#include "mwv/evidence/types.hpp"

#include <algorithm>
#include <cstdio>

#include "mwv/error.hpp"
#include "mwv/util.hpp"

namespace mwv::evidence {

std::string_view to_string(Platform p) noexcept { return p == Platform::Google ? "google" : "youtube"; }

std::optional<Platform> parse_platform(std::string_view s) noexcept {
    const std::string v = to_lower_ascii(trim(s));
    if (v == "google") return Platform::Google;
    if (v == "youtube") return Platform::YouTube;
    return std::nullopt;
}

std::vector<Platform> parse_platform_list(std::string_view s) {
    std::vector<Platform> out;
    for (const auto& part : split(s, ',')) {
        if (trim(part).empty()) continue;
        const auto p = parse_platform(part);
        if (!p) throw Error(ErrorCode::Usage, "unknown platform '" + part + "'");
        if (std::find(out.begin(), out.end(), *p) == out.end()) out.push_back(*p);
    }
    return out;
}

std::string format_rfc3339(Timestamp t) {
    using namespace std::chrono;
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss hms{t - day};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long>(hms.seconds().count()));
    return buf;
}

std::optional<Timestamp> parse_rfc3339(std::string_view s) {
    using namespace std::chrono;
    if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != 't' && s[10] != ' ') ||
        s[13] != ':' || s[16] != ':') {
        return std::nullopt;
    }
    const auto Y = parse_int(s.substr(0, 4));
    const auto M = parse_int(s.substr(5, 2));
    const auto D = parse_int(s.substr(8, 2));
    const auto h = parse_int(s.substr(11, 2));
    const auto m = parse_int(s.substr(14, 2));
    const auto sec = parse_int(s.substr(17, 2));
    if (!Y || !M || !D || !h || !m || !sec || *h > 23 || *m > 59 || *sec > 60) return std::nullopt;
    const year_month_day ymd{year{static_cast<int>(*Y)}, month{static_cast<unsigned>(*M)},
                             day{static_cast<unsigned>(*D)}};
    if (!ymd.ok()) return std::nullopt;

    std::size_t i = 19;
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
    }
    long offset_minutes = 0;
    if (i < s.size() && (s[i] == 'Z' || s[i] == 'z')) {
        ++i;
    } else if (i + 6 == s.size() && (s[i] == '+' || s[i] == '-') && s[i + 3] == ':') {
        const auto oh = parse_int(s.substr(i + 1, 2));
        const auto om = parse_int(s.substr(i + 4, 2));
        if (!oh || !om) return std::nullopt;
        offset_minutes = (*oh * 60 + *om) * (s[i] == '-' ? -1 : 1);
        i += 6;
    } else {
        return std::nullopt;
    }
    if (i != s.size()) return std::nullopt;
    return sys_days{ymd} + hours{*h} + minutes{*m} + seconds{*sec} - minutes{offset_minutes};
}

std::string canonical_query(std::string_view text) {
    std::string lowered = to_lower_ascii(text);
    std::replace_if(lowered.begin(), lowered.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
    std::string out;
    for (const auto& w : split(lowered, ' ')) {
        const std::string t = trim(w);
        if (t.empty()) continue;
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

MergedEvidence merge_bundles(std::span<const EvidenceBundle> bundles, std::size_t cap) {
    MergedEvidence merged;
    if (!bundles.empty()) merged.platform = bundles.front().platform;
    for (std::size_t qi = 0; qi < bundles.size(); ++qi) {
        for (const auto& t : bundles[qi].titles) {
            if (merged.titles.size() >= cap) return merged;
            SourcedTitle st{qi, t};
            st.title.rank = static_cast<int>(merged.titles.size()) + 1;
            merged.titles.push_back(std::move(st));
        }
    }
    return merged;
}

}  // namespace mwv::evidence
