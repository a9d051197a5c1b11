#include "mwv/querybuild.hpp"

#include "mwv/error.hpp"
#include "mwv/text/normalize.hpp"
#include "mwv/util.hpp"

namespace mwv {

std::string_view to_string(Label l) noexcept { return l == Label::Misleading ? "fake" : "real"; }

std::string_view short_name(Label l) noexcept { return l == Label::Misleading ? "M" : "R"; }

std::optional<Label> parse_label(std::string_view s) noexcept {
    const std::string v = to_lower_ascii(trim(s));
    if (v == "real" || v == "r" || v == "0") return Label::Real;
    if (v == "fake" || v == "m" || v == "misleading" || v == "1") return Label::Misleading;
    return std::nullopt;
}

BuildStrategy BuildStrategy::ngrams(std::size_t n) {
    if (n == 0) throw Error(ErrorCode::BadConfig, "n-gram size must be >= 1");
    return {Kind::Ngrams, n};
}

BuildStrategy BuildStrategy::parse(std::string_view spec) {
    const std::string s = trim(spec);
    if (s == "1") return stopword_removal();
    if (s == "3") return proper_nouns();
    if (s.rfind("2:", 0) == 0) {
        const auto n = parse_int(std::string_view(s).substr(2));
        if (n && *n >= 1) return ngrams(static_cast<std::size_t>(*n));
    }
    throw Error(ErrorCode::Usage, "bad build case '" + s + "' (expected 1, 2:<n> or 3)");
}

std::string BuildStrategy::to_string() const {
    switch (kind) {
        case Kind::StopwordRemoval: return "1";
        case Kind::Ngrams: return "2:" + std::to_string(n);
        case Kind::ProperNouns: return "3";
    }
    return "1";
}

namespace {

BuiltQuery make_query(const Claim& claim, const BuildStrategy& strategy, std::string content) {
    BuiltQuery q;
    q.claim_id = claim.id;
    q.strategy = strategy;
    q.text = content + " " + std::string(kQuerySuffix);
    q.content = std::move(content);
    return q;
}

text::TokenList content_tokens(const std::vector<text::SourceToken>& source, const text::StopwordList& sw) {
    text::TokenList out;
    for (const auto& st : source) {
        if (st.token.str() == "?" || sw.contains(st.token)) continue;
        out.push_back(st.token);
    }
    return out;
}

}  // namespace

std::vector<BuiltQuery> build_queries(const Claim& claim, const BuildStrategy& strategy,
                                      const text::StopwordList& sw, const text::PosTagger& tagger) {
    const auto source = text::tokenize_source(claim.text);
    const text::TokenList content = content_tokens(source, sw);
    if (content.empty()) throw Error(ErrorCode::EmptyQuery, "claim '" + claim.id + "' is empty after preprocessing");

    std::vector<BuiltQuery> queries;
    switch (strategy.kind) {
        case BuildStrategy::Kind::StopwordRemoval:
            queries.push_back(make_query(claim, strategy, text::join(content)));
            break;
        case BuildStrategy::Kind::Ngrams:
            for (const auto& gram : text::ngrams(content, strategy.n)) {
                queries.push_back(make_query(claim, strategy, text::join(gram)));
            }
            break;
        case BuildStrategy::Kind::ProperNouns: {
            const auto tagged = tagger.tag(std::span<const text::SourceToken>(source));
            text::TokenList span;
            auto flush = [&] {
                if (!span.empty()) queries.push_back(make_query(claim, strategy, text::join(span)));
                span.clear();
            };
            for (const auto& t : tagged) {
                if (t.tag == text::PosTag::NNP) {
                    span.push_back(t.token);
                } else {
                    flush();
                }
            }
            flush();
            if (queries.empty()) {
                auto q = make_query(claim, strategy, text::join(content));
                q.fallback = true;
                queries.push_back(std::move(q));
            }
            break;
        }
    }
    return queries;
}

}  // namespace mwv
