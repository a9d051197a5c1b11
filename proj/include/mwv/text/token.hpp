#pragma once

#include <compare>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace mwv::text {

// A non-empty, whitespace-free lowercase word or the literal "?".
class Token {
public:
    explicit Token(std::string surface);

    const std::string& str() const noexcept { return surface_; }
    std::string_view view() const noexcept { return surface_; }

    friend bool operator==(const Token&, const Token&) = default;
    friend auto operator<=>(const Token&, const Token&) = default;

private:
    std::string surface_;
};

using TokenList = std::vector<Token>;

// Convenience for tests and literals; every element must satisfy Token's invariant.
TokenList make_tokens(std::initializer_list<std::string_view> words);

std::string join(const TokenList& tokens, std::string_view sep = " ");

}  // namespace mwv::text

template <>
struct std::hash<mwv::text::Token> {
    std::size_t operator()(const mwv::text::Token& t) const noexcept {
        return std::hash<std::string>{}(t.str());
    }
};
