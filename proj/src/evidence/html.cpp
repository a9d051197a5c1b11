#include "mwv/evidence/html.hpp"

#include <algorithm>
#include <unordered_set>

#include "mwv/text/normalize.hpp"
#include "mwv/util.hpp"

namespace mwv::evidence {

namespace {

void append_utf8(std::string& out, unsigned long cp) {
    if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

bool is_name_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
           c == ':' || c == '.';
}

std::size_t find_ci(std::string_view hay, std::string_view needle, std::size_t from) {
    if (needle.empty()) return from;
    for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
        bool ok = true;
        for (std::size_t k = 0; k < needle.size(); ++k) {
            char c = hay[i + k];
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
            if (c != needle[k]) {
                ok = false;
                break;
            }
        }
        if (ok) return i;
    }
    return std::string_view::npos;
}

std::string strip_tags(std::string_view s) {
    std::string out;
    bool in_tag = false;
    for (char c : s) {
        if (c == '<') {
            in_tag = true;
        } else if (c == '>') {
            in_tag = false;
            out += ' ';
        } else if (!in_tag) {
            out += c;
        }
    }
    return out;
}

std::optional<std::string> clean_title(std::string_view raw) {
    std::string t = text::normalize_text(decode_entities(raw));
    if (t.empty()) return std::nullopt;
    return t;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::string percent_decode(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size()) {
            const int hi = hex_value(s[i + 1]);
            const int lo = hex_value(s[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out += static_cast<char>(hi * 16 + lo);
                i += 2;
                continue;
            }
        }
        out += s[i] == '+' ? ' ' : s[i];
    }
    return out;
}

std::string host_of(std::string_view url) {
    auto pos = url.find("://");
    if (pos == std::string_view::npos) return {};
    url.remove_prefix(pos + 3);
    const auto end = url.find_first_of("/?#:");
    return to_lower_ascii(url.substr(0, end));
}

bool is_search_engine_host(const std::string& host) {
    for (std::string_view own : {"google.", "gstatic.com", "googleusercontent.com", "youtube.com", "schema.org",
                                 "w3.org", "blogger.com"}) {
        if (host.find(own) != std::string::npos) return true;
    }
    return false;
}

// JSON string literal body starting after the opening quote; returns decoded text.
std::string read_json_string(std::string_view s, std::size_t& i) {
    std::string out;
    while (i < s.size() && s[i] != '"') {
        if (s[i] == '\\' && i + 1 < s.size()) {
            const char e = s[i + 1];
            if (e == 'u' && i + 5 < s.size()) {
                unsigned long cp = 0;
                bool ok = true;
                for (int k = 0; k < 4; ++k) {
                    const int v = hex_value(s[i + 2 + static_cast<std::size_t>(k)]);
                    if (v < 0) ok = false;
                    cp = cp * 16 + static_cast<unsigned long>(std::max(v, 0));
                }
                if (ok) {
                    append_utf8(out, cp);
                    i += 6;
                    continue;
                }
            }
            switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                default: out += e; break;
            }
            i += 2;
            continue;
        }
        out += s[i++];
    }
    return out;
}

}  // namespace

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out += s[i++];
            continue;
        }
        const auto semi = s.find(';', i);
        if (semi == std::string_view::npos || semi - i > 10) {
            out += s[i++];
            continue;
        }
        const std::string_view ent = s.substr(i + 1, semi - i - 1);
        bool handled = true;
        if (ent == "amp") {
            out += '&';
        } else if (ent == "lt") {
            out += '<';
        } else if (ent == "gt") {
            out += '>';
        } else if (ent == "quot") {
            out += '"';
        } else if (ent == "apos") {
            out += '\'';
        } else if (ent == "nbsp") {
            append_utf8(out, 0xA0);
        } else if (ent.size() > 1 && ent[0] == '#') {
            unsigned long cp = 0;
            bool ok = true;
            if (ent[1] == 'x' || ent[1] == 'X') {
                if (ent.size() == 2) ok = false;
                for (std::size_t k = 2; k < ent.size() && ok; ++k) {
                    const int v = hex_value(ent[k]);
                    if (v < 0) ok = false;
                    cp = cp * 16 + static_cast<unsigned long>(std::max(v, 0));
                    if (cp > 0x10FFFF) ok = false;
                }
            } else {
                for (std::size_t k = 1; k < ent.size() && ok; ++k) {
                    if (ent[k] < '0' || ent[k] > '9') ok = false;
                    cp = cp * 10 + static_cast<unsigned long>(ent[k] - '0');
                    if (cp > 0x10FFFF) ok = false;
                }
            }
            if (ok) {
                append_utf8(out, cp);
            } else {
                handled = false;
            }
        } else {
            handled = false;
        }
        if (handled) {
            i = semi + 1;
        } else {
            out += s[i++];
        }
    }
    return out;
}

std::vector<HtmlTag> scan_tags(std::string_view html) {
    std::vector<HtmlTag> tags;
    std::size_t i = 0;
    while (i < html.size()) {
        const auto lt = html.find('<', i);
        if (lt == std::string_view::npos) break;
        if (html.substr(lt, 4) == "<!--") {
            const auto close = html.find("-->", lt + 4);
            if (close == std::string_view::npos) break;
            i = close + 3;
            continue;
        }
        std::size_t p = lt + 1;
        HtmlTag tag;
        tag.begin = lt;
        if (p < html.size() && html[p] == '/') {
            tag.closing = true;
            ++p;
        }
        const std::size_t name_start = p;
        while (p < html.size() && is_name_char(html[p])) ++p;
        if (p == name_start) {
            i = lt + 1;
            continue;
        }
        tag.name = to_lower_ascii(html.substr(name_start, p - name_start));

        // Attributes until '>' (quoted values may contain '>').
        for (;;) {
            while (p < html.size() && (is_space(html[p]) || html[p] == '/')) ++p;
            if (p >= html.size() || html[p] == '>') break;
            const std::size_t an = p;
            while (p < html.size() && !is_space(html[p]) && html[p] != '=' && html[p] != '>' && html[p] != '/') ++p;
            std::string attr = to_lower_ascii(html.substr(an, p - an));
            while (p < html.size() && is_space(html[p])) ++p;
            std::string value;
            if (p < html.size() && html[p] == '=') {
                ++p;
                while (p < html.size() && is_space(html[p])) ++p;
                if (p < html.size() && (html[p] == '"' || html[p] == '\'')) {
                    const char q = html[p++];
                    const auto close = html.find(q, p);
                    const std::size_t stop = close == std::string_view::npos ? html.size() : close;
                    value = decode_entities(html.substr(p, stop - p));
                    p = close == std::string_view::npos ? html.size() : close + 1;
                } else {
                    const std::size_t vs = p;
                    while (p < html.size() && !is_space(html[p]) && html[p] != '>') ++p;
                    value = decode_entities(html.substr(vs, p - vs));
                }
            }
            if (attr.empty()) {
                ++p;
                continue;
            }
            tag.attrs.emplace(std::move(attr), std::move(value));
        }
        tag.end = std::min(p + 1, html.size());
        i = tag.end;
        tags.push_back(std::move(tag));

        // Raw-text elements: skip their bodies so markup inside scripts is not scanned.
        const auto& last = tags.back();
        if (!last.closing && (last.name == "script" || last.name == "style")) {
            const auto close = find_ci(html, "</" + last.name, i);
            i = close == std::string_view::npos ? html.size() : close;
        }
    }
    return tags;
}

std::optional<std::string> parse_page_title(std::string_view html) {
    const auto open = find_ci(html, "<title", 0);
    if (open == std::string_view::npos) return std::nullopt;
    const auto gt = html.find('>', open);
    if (gt == std::string_view::npos) return std::nullopt;
    const auto close = find_ci(html, "</title", gt + 1);
    const std::size_t stop = close == std::string_view::npos ? html.size() : close;
    return clean_title(html.substr(gt + 1, stop - gt - 1));
}

std::vector<std::string> extract_result_links(std::string_view serp_html, std::size_t limit) {
    std::vector<std::string> links;
    std::unordered_set<std::string> seen;
    for (const auto& tag : scan_tags(serp_html)) {
        if (links.size() >= limit) break;
        if (tag.closing || tag.name != "a") continue;
        auto it = tag.attrs.find("href");
        if (it == tag.attrs.end()) continue;
        std::string_view href = it->second;
        std::string target;
        if (href.rfind("/url?", 0) == 0) {
            const auto q = href.find("q=");
            if (q == std::string_view::npos) continue;
            auto rest = href.substr(q + 2);
            target = percent_decode(rest.substr(0, rest.find('&')));
        } else if (href.rfind("http://", 0) == 0 || href.rfind("https://", 0) == 0) {
            target = std::string(href);
        } else {
            continue;
        }
        if (target.rfind("http", 0) != 0 || is_search_engine_host(host_of(target))) continue;
        if (seen.insert(target).second) links.push_back(std::move(target));
    }
    return links;
}

std::vector<ResultLink> parse_google_results(std::span<const FetchedPage> pages) {
    std::vector<ResultLink> out;
    for (const auto& page : pages) {
        if (auto title = parse_page_title(page.html)) out.push_back({page.url, std::move(*title)});
    }
    return out;
}

std::vector<ResultLink> parse_youtube_results(std::string_view html) {
    std::vector<ResultLink> out;
    const auto tags = scan_tags(html);
    for (std::size_t i = 0; i < tags.size(); ++i) {
        const auto& tag = tags[i];
        if (tag.closing || tag.name != "a") continue;
        auto id = tag.attrs.find("id");
        if (id == tag.attrs.end() || id->second != "video-title") continue;

        std::optional<std::string> title;
        if (auto t = tag.attrs.find("title"); t != tag.attrs.end()) title = clean_title(t->second);
        if (!title) {
            std::size_t stop = html.size();
            for (std::size_t k = i + 1; k < tags.size(); ++k) {
                if (tags[k].closing && tags[k].name == "a") {
                    stop = tags[k].begin;
                    break;
                }
            }
            title = clean_title(strip_tags(html.substr(tag.end, stop - tag.end)));
        }
        if (!title) continue;

        std::string url;
        if (auto h = tag.attrs.find("href"); h != tag.attrs.end()) {
            url = h->second;
            if (!url.empty() && url[0] == '/') url = "https://www.youtube.com" + url;
        }
        out.push_back({std::move(url), std::move(*title)});
    }
    return out;
}

std::vector<ResultLink> parse_youtube_initial_data(std::string_view html) {
    std::vector<ResultLink> out;
    constexpr std::string_view kRenderer = "\"videoRenderer\":{\"videoId\":\"";
    constexpr std::string_view kTitle = "\"title\":{\"runs\":[{\"text\":\"";
    std::size_t pos = 0;
    while ((pos = html.find(kRenderer, pos)) != std::string_view::npos) {
        std::size_t i = pos + kRenderer.size();
        const std::string video_id = read_json_string(html, i);
        const auto next = html.find(kRenderer, i);
        const auto t = html.find(kTitle, i);
        pos = i;
        if (t == std::string_view::npos || (next != std::string_view::npos && t > next)) continue;
        std::size_t ti = t + kTitle.size();
        std::string raw = read_json_string(html, ti);
        // Further runs: ,{"text":"..."} until the array closes.
        constexpr std::string_view kRun = "\"},{\"text\":\"";
        while (html.substr(ti, kRun.size()) == kRun) {
            ti += kRun.size();
            raw += read_json_string(html, ti);
        }
        if (auto title = clean_title(raw)) {
            out.push_back({"https://www.youtube.com/watch?v=" + video_id, std::move(*title)});
        }
    }
    return out;
}

}  // namespace mwv::evidence
