#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mwv/text/normalize.hpp"
#include "mwv/text/token.hpp"

namespace mwv::text {

// Reduced Penn-style tag set. Only the category mapping below is consumed downstream.
enum class PosTag {
    NN,     // common noun
    NNS,    // plural noun
    NNP,    // proper noun
    VB,     // verb, base form
    VBD,    // verb, past tense
    VBG,    // verb, gerund
    VBN,    // verb, past participle
    VBZ,    // verb, 3rd person singular
    JJ,     // adjective
    RB,     // adverb
    DT,     // determiner
    IN,     // preposition / subordinating conjunction
    PRP,    // pronoun
    CC,     // coordinating conjunction
    MD,     // modal
    CD,     // number
    TO,     // "to"
    WH,     // wh-word
    UH,     // interjection
    PUNCT,  // '?'
};

enum class WordCategory { Noun, Verb, Adjective, Adverb, Other };

// Category mapping table:
//   NN NNS NNP            -> Noun
//   VB VBD VBG VBN VBZ    -> Verb
//   JJ                    -> Adjective
//   RB                    -> Adverb
//   everything else       -> Other
WordCategory category_of(PosTag tag) noexcept;

std::string_view to_string(PosTag tag) noexcept;
std::optional<PosTag> parse_pos_tag(std::string_view s) noexcept;

// Lexical-database category letter: n, v, a, r. Other has none.
std::optional<char> category_letter(WordCategory c) noexcept;

struct TaggedToken {
    Token token;
    PosTag tag;
    WordCategory category;
};

class PosTagger {
public:
    PosTagger() = default;

    // "word<TAB>TAG" per line; '#' comments allowed.
    static PosTagger load(std::istream& in);
    static PosTagger load_file(const std::filesystem::path& path);

    void add(std::string_view word, PosTag tag);
    std::optional<PosTag> lookup(std::string_view word) const;
    std::size_t size() const noexcept { return lexicon_.size(); }

    /// Tags lowercase tokens. Resolution per token:
    ///  1. '?' -> PUNCT, all-digit -> CD;
    ///  2. closed-class lexicon entries (DT IN PRP CC MD TO WH UH);
    ///  3. capitalization from the sidecar: a capitalized non-sentence-initial word is NNP, and a
    ///     capitalized sentence-initial word is NNP when the next word is an NNP by this rule;
    ///  4. remaining lexicon entries;
    ///  5. suffix rules: -ly RB, -ing VBG, -ed VBD, -ous/-ful/-able/-ive JJ;
    ///  6. NN.
    /// Without a sidecar step 3 never fires.
    std::vector<TaggedToken> tag(const TokenList& tokens) const;
    std::vector<TaggedToken> tag(std::span<const SourceToken> tokens) const;

private:
    std::vector<TaggedToken> tag_impl(const TokenList& tokens, const std::vector<bool>& proper) const;

    std::unordered_map<std::string, PosTag> lexicon_;
};

}  // namespace mwv::text
