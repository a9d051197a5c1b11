#include "mwv/text/normalize.hpp"

#include <algorithm>
#include <array>
#include <cstdint>

#include "mwv/error.hpp"

namespace mwv::text {

Token::Token(std::string surface) : surface_(std::move(surface)) {
    if (surface_.empty()) {
        throw Error(ErrorCode::ParseError, "empty token");
    }
    for (unsigned char c : surface_) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
            throw Error(ErrorCode::ParseError, "token contains whitespace: '" + surface_ + "'");
        }
    }
}

TokenList make_tokens(std::initializer_list<std::string_view> words) {
    TokenList out;
    out.reserve(words.size());
    for (auto w : words) out.emplace_back(std::string(w));
    return out;
}

std::string join(const TokenList& tokens, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += sep;
        out += tokens[i].str();
    }
    return out;
}

namespace {

bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) {
    if (s.size() - pos < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        char c = s[pos + i];
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (c != prefix[i]) return false;
    }
    return true;
}

std::string strip_urls(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    std::size_t i = 0;
    while (i < raw.size()) {
        if (starts_with_ci(raw, i, "http://") || starts_with_ci(raw, i, "https://") ||
            starts_with_ci(raw, i, "www.")) {
            while (i < raw.size() && !is_ascii_space(raw[i])) ++i;
            out += ' ';
            continue;
        }
        out += raw[i++];
    }
    return out;
}

// Decodes one UTF-8 sequence at s[i]; returns the codepoint and advances i.
// Invalid or truncated sequences yield U+FFFD and consume one byte.
char32_t next_codepoint(std::string_view s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    if (i + len > s.size()) {
        ++i;
        return 0xFFFD;
    }
    for (int k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    i += len;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
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

bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == U'`' || cp == 0x2018 || cp == 0x2019; }

bool is_latin1_letter(char32_t cp) { return cp >= 0xC0 && cp <= 0xFF && cp != 0xD7 && cp != 0xF7; }

char32_t to_lower(char32_t cp) {
    if (cp >= U'A' && cp <= U'Z') return cp + 32;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
    return cp;
}

// Character-level cleaning shared by normalize_text and tokenize_source.
// Never collapses whitespace; callers split or collapse.
std::string clean_chars(std::string_view text, bool lowercase) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const char32_t cp = next_codepoint(text, i);
        if ((cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z') || is_latin1_letter(cp)) {
            append_utf8(out, lowercase ? to_lower(cp) : cp);
        } else if ((cp >= U'0' && cp <= U'9') || cp == U'?') {
            out += static_cast<char>(cp);
        } else if (is_apostrophe(cp)) {
            // deleted
        } else {
            out += ' ';
        }
    }
    return out;
}

std::vector<std::string> split_words(std::string_view s) {
    std::vector<std::string> words;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_ascii_space(s[i])) ++i;
        const std::size_t start = i;
        while (i < s.size() && !is_ascii_space(s[i])) ++i;
        if (i > start) words.emplace_back(s.substr(start, i - start));
    }
    return words;
}

// Splits a whitespace-free chunk into words and standalone '?' marks.
void split_question_marks(const std::string& chunk, std::vector<std::string>& out) {
    std::string cur;
    for (char c : chunk) {
        if (c == '?') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
            out.emplace_back("?");
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
}

bool ends_sentence(std::string_view raw_chunk) {
    std::size_t n = raw_chunk.size();
    while (n > 0) {
        const char c = raw_chunk[n - 1];
        if (c == '"' || c == '\'' || c == ')' || c == ']') {
            --n;
            continue;
        }
        return c == '.' || c == '!' || c == '?';
    }
    return false;
}

std::string ascii_latin1_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) append_utf8(out, to_lower(next_codepoint(s, i)));
    return out;
}

}  // namespace

std::string normalize_text(std::string_view raw) {
    const std::string cleaned = clean_chars(strip_urls(raw), true);
    std::string out;
    out.reserve(cleaned.size());
    for (const auto& w : split_words(cleaned)) {
        if (!out.empty()) out += ' ';
        out += w;
    }
    return out;
}

TokenList tokenize(std::string_view text) {
    TokenList tokens;
    std::vector<std::string> parts;
    for (const auto& w : split_words(text)) split_question_marks(w, parts);
    tokens.reserve(parts.size());
    for (auto& p : parts) tokens.emplace_back(std::move(p));
    return tokens;
}

std::vector<SourceToken> tokenize_source(std::string_view raw) {
    std::vector<SourceToken> out;
    const std::string no_urls = strip_urls(raw);
    bool next_initial = true;
    for (const auto& chunk : split_words(no_urls)) {
        std::vector<std::string> parts;
        for (const auto& w : split_words(clean_chars(chunk, false))) split_question_marks(w, parts);
        for (auto& p : parts) {
            SourceToken st{Token(ascii_latin1_lower(p)), p, next_initial};
            next_initial = (p == "?");
            out.push_back(std::move(st));
        }
        if (ends_sentence(chunk)) next_initial = true;
    }
    return out;
}

std::vector<TokenList> ngrams(const TokenList& tokens, std::size_t n) {
    std::vector<TokenList> grams;
    if (n == 0 || tokens.size() < n) return grams;
    grams.reserve(tokens.size() - n + 1);
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        grams.emplace_back(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                           tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
    }
    return grams;
}

}  // namespace mwv::text
