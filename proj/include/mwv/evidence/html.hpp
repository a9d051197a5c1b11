#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mwv::evidence {

// Named (&amp; &lt; &gt; &quot; &apos; &nbsp;) and numeric (&#NN; &#xHH;) references.
// Unknown references are left as written.
std::string decode_entities(std::string_view s);

struct HtmlTag {
    std::string name;                          // lowercase
    std::map<std::string, std::string> attrs;  // lowercase names, decoded values
    std::size_t begin = 0;                     // offset of '<'
    std::size_t end = 0;                       // offset one past '>'
    bool closing = false;
};

// Best-effort tag scanner: never throws, skips comments, tolerates unterminated markup.
std::vector<HtmlTag> scan_tags(std::string_view html);

// Decoded, normalized <title> text of a page; nullopt when absent or empty.
std::optional<std::string> parse_page_title(std::string_view html);

struct ResultLink {
    std::string url;
    std::string title;

    friend bool operator==(const ResultLink&, const ResultLink&) = default;
};

struct FetchedPage {
    std::string url;
    std::string html;
};

/// Result URLs from a web search results page: "/url?q=<target>&..." redirect anchors and direct
/// absolute links outside the search engine's own domains, first occurrence order, unique.
std::vector<std::string> extract_result_links(std::string_view serp_html, std::size_t limit = 10);

/// (url, title) for each fetched result page that carries a <title>; pages without one are skipped.
std::vector<ResultLink> parse_google_results(std::span<const FetchedPage> pages);

/// (href, title) for every anchor whose id is "video-title", in document order. The title comes
/// from the title attribute, or the anchor text when the attribute is missing. Relative hrefs are
/// resolved against https://www.youtube.com; a missing href yields an empty url.
std::vector<ResultLink> parse_youtube_results(std::string_view html);

/// Fallback for script-rendered result pages: videoRenderer entries of the embedded initial data.
std::vector<ResultLink> parse_youtube_initial_data(std::string_view html);

}  // namespace mwv::evidence
