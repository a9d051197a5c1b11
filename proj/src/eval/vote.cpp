#include <cstdlib>

#include "mwv/error.hpp"
#include "mwv/eval.hpp"
#include "mwv/util.hpp"

namespace mwv::eval {

std::string_view to_string(VoteRule r) noexcept {
    return r == VoteRule::Majority ? "majority" : "hybrid-only";
}

std::optional<VoteRule> parse_vote_rule(std::string_view s) noexcept {
    const std::string v = to_lower_ascii(trim(s));
    if (v == "majority") return VoteRule::Majority;
    if (v == "hybrid-only" || v == "hybrid_only" || v == "hybrid") return VoteRule::HybridOnly;
    return std::nullopt;
}

VoteResult platform_vote(std::optional<Label> google, std::optional<Label> youtube, std::optional<Label> hybrid,
                         VoteRule rule, Label two_voter_tie) {
    VoteResult r;
    for (const auto& l : {google, youtube, hybrid}) {
        if (!l) continue;
        ++r.voters;
        (*l == Label::Misleading ? r.votes_misleading : r.votes_real) += 1;
    }
    if (r.voters == 0) throw Error(ErrorCode::NoVotes, "no platform produced a label");
    r.support = static_cast<double>(std::abs(r.votes_misleading - r.votes_real)) / static_cast<double>(r.voters);

    if (rule == VoteRule::HybridOnly) {
        if (!hybrid) throw Error(ErrorCode::NoVotes, "hybrid-only rule without a hybrid label");
        r.final = *hybrid;
        return r;
    }
    if (r.votes_misleading != r.votes_real) {
        r.final = r.votes_misleading > r.votes_real ? Label::Misleading : Label::Real;
        return r;
    }
    // Only two voters can tie.
    r.tie_broken = true;
    r.final = hybrid ? *hybrid : two_voter_tie;
    return r;
}

}  // namespace mwv::eval
