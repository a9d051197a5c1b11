#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "mwv/text/token.hpp"

namespace mwv::text {

/// Cleans raw claim or title text into the canonical form every later stage expects.
///
/// Rules, applied in order:
///  - substrings starting with "http://", "https://" or "www." are removed up to the next whitespace;
///  - ASCII letters and Latin-1 letters (U+00C0..U+00FF minus U+00D7, U+00F7) are kept and lowercased;
///  - ASCII digits and '?' are kept;
///  - apostrophes (' ` U+2018 U+2019) are deleted so "won't" becomes "wont";
///  - every other codepoint (punctuation, symbols, emoji, controls, invalid UTF-8) becomes a space;
///  - whitespace runs collapse to one space and the result is trimmed.
///
/// Total and idempotent.
std::string normalize_text(std::string_view raw);

/// Splits normalized text on whitespace; every '?' becomes a token of its own.
TokenList tokenize(std::string_view text);

/// A token with the casing it had in the raw text, for rules that need capitalization.
struct SourceToken {
    Token token;
    std::string original;
    bool sentence_initial = false;
};

/// Tokenizes raw text while keeping the original casing of every token.
/// The lowercase tokens equal tokenize(normalize_text(raw)).
std::vector<SourceToken> tokenize_source(std::string_view raw);

/// All contiguous windows of length n; empty when n == 0 or tokens.size() < n.
std::vector<TokenList> ngrams(const TokenList& tokens, std::size_t n);

}  // namespace mwv::text
