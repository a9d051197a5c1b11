#include "mwv/text/pos.hpp"

#include <array>
#include <fstream>

#include "mwv/error.hpp"

namespace mwv::text {

namespace {

constexpr std::array<std::pair<PosTag, std::string_view>, 20> kTagNames{{
    {PosTag::NN, "NN"},   {PosTag::NNS, "NNS"}, {PosTag::NNP, "NNP"}, {PosTag::VB, "VB"},
    {PosTag::VBD, "VBD"}, {PosTag::VBG, "VBG"}, {PosTag::VBN, "VBN"}, {PosTag::VBZ, "VBZ"},
    {PosTag::JJ, "JJ"},   {PosTag::RB, "RB"},   {PosTag::DT, "DT"},   {PosTag::IN, "IN"},
    {PosTag::PRP, "PRP"}, {PosTag::CC, "CC"},   {PosTag::MD, "MD"},   {PosTag::CD, "CD"},
    {PosTag::TO, "TO"},   {PosTag::WH, "WH"},   {PosTag::UH, "UH"},   {PosTag::PUNCT, "PUNCT"},
}};

bool is_closed_class(PosTag t) {
    switch (t) {
        case PosTag::DT: case PosTag::IN: case PosTag::PRP: case PosTag::CC:
        case PosTag::MD: case PosTag::TO: case PosTag::WH: case PosTag::UH:
            return true;
        default:
            return false;
    }
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Suffix must leave at least two letters of stem ("bed", "fly" stay nouns).
bool has_suffix(std::string_view w, std::string_view suffix) {
    return w.size() >= suffix.size() + 2 && ends_with(w, suffix);
}

std::optional<PosTag> suffix_tag(std::string_view w) {
    if (has_suffix(w, "ly")) return PosTag::RB;
    if (has_suffix(w, "ing")) return PosTag::VBG;
    if (has_suffix(w, "ed")) return PosTag::VBD;
    for (auto s : {"ous", "ful", "able", "ive"}) {
        if (has_suffix(w, s)) return PosTag::JJ;
    }
    return std::nullopt;
}

bool all_digits(std::string_view w) {
    for (char c : w) {
        if (c < '0' || c > '9') return false;
    }
    return !w.empty();
}

bool starts_upper(std::string_view original) {
    if (original.empty()) return false;
    const auto c = static_cast<unsigned char>(original[0]);
    if (c >= 'A' && c <= 'Z') return true;
    // Latin-1 capitals U+00C0..U+00DE encode as C3 80..C3 9E.
    return c == 0xC3 && original.size() > 1 && static_cast<unsigned char>(original[1]) >= 0x80 &&
           static_cast<unsigned char>(original[1]) <= 0x9E && static_cast<unsigned char>(original[1]) != 0x97;
}

}  // namespace

WordCategory category_of(PosTag tag) noexcept {
    switch (tag) {
        case PosTag::NN: case PosTag::NNS: case PosTag::NNP:
            return WordCategory::Noun;
        case PosTag::VB: case PosTag::VBD: case PosTag::VBG: case PosTag::VBN: case PosTag::VBZ:
            return WordCategory::Verb;
        case PosTag::JJ:
            return WordCategory::Adjective;
        case PosTag::RB:
            return WordCategory::Adverb;
        default:
            return WordCategory::Other;
    }
}

std::string_view to_string(PosTag tag) noexcept {
    for (const auto& [t, name] : kTagNames) {
        if (t == tag) return name;
    }
    return "?";
}

std::optional<PosTag> parse_pos_tag(std::string_view s) noexcept {
    for (const auto& [t, name] : kTagNames) {
        if (name == s) return t;
    }
    return std::nullopt;
}

std::optional<char> category_letter(WordCategory c) noexcept {
    switch (c) {
        case WordCategory::Noun: return 'n';
        case WordCategory::Verb: return 'v';
        case WordCategory::Adjective: return 'a';
        case WordCategory::Adverb: return 'r';
        case WordCategory::Other: return std::nullopt;
    }
    return std::nullopt;
}

void PosTagger::add(std::string_view word, PosTag tag) { lexicon_[std::string(word)] = tag; }

std::optional<PosTag> PosTagger::lookup(std::string_view word) const {
    auto it = lexicon_.find(std::string(word));
    if (it == lexicon_.end()) return std::nullopt;
    return it->second;
}

PosTagger PosTagger::load(std::istream& in) {
    PosTagger tagger;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw Error(ErrorCode::ParseError, "tag lexicon line " + std::to_string(lineno) + ": missing tab");
        }
        const auto tag = parse_pos_tag(std::string_view(line).substr(tab + 1));
        if (!tag) {
            throw Error(ErrorCode::ParseError, "tag lexicon line " + std::to_string(lineno) + ": unknown tag");
        }
        tagger.add(line.substr(0, tab), *tag);
    }
    return tagger;
}

PosTagger PosTagger::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open tag lexicon " + path.string());
    return load(in);
}

std::vector<TaggedToken> PosTagger::tag(const TokenList& tokens) const {
    return tag_impl(tokens, std::vector<bool>(tokens.size(), false));
}

std::vector<TaggedToken> PosTagger::tag(std::span<const SourceToken> tokens) const {
    TokenList plain;
    plain.reserve(tokens.size());
    for (const auto& st : tokens) plain.push_back(st.token);

    auto closed = [&](std::size_t i) {
        const auto t = lookup(plain[i].view());
        return t && is_closed_class(*t);
    };

    std::vector<bool> proper(tokens.size(), false);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!tokens[i].sentence_initial && starts_upper(tokens[i].original) && !closed(i)) proper[i] = true;
    }
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        if (tokens[i].sentence_initial && starts_upper(tokens[i].original) && !closed(i) && proper[i + 1]) {
            proper[i] = true;
        }
    }
    return tag_impl(plain, proper);
}

std::vector<TaggedToken> PosTagger::tag_impl(const TokenList& tokens, const std::vector<bool>& proper) const {
    std::vector<TaggedToken> out;
    out.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string_view w = tokens[i].view();
        PosTag tag = PosTag::NN;
        const auto lex = lookup(w);
        if (w == "?") {
            tag = PosTag::PUNCT;
        } else if (all_digits(w)) {
            tag = PosTag::CD;
        } else if (lex && is_closed_class(*lex)) {
            tag = *lex;
        } else if (proper[i]) {
            tag = PosTag::NNP;
        } else if (lex) {
            tag = *lex;
        } else if (auto s = suffix_tag(w)) {
            tag = *s;
        }
        out.push_back({tokens[i], tag, category_of(tag)});
    }
    return out;
}

}  // namespace mwv::text
