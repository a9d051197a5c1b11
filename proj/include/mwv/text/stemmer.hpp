#pragma once

#include <string>
#include <string_view>

#include "mwv/text/token.hpp"

namespace mwv::text {

// Porter (1980) suffix-stripping stemmer, following the reference C implementation
// (including its "bli" -> "ble" and "logi" -> "log" departures from the published rules).
// Words that are not pure a-z, or shorter than three letters, are returned unchanged.
std::string porter_stem(std::string_view word);

inline Token stem(const Token& token) { return Token(porter_stem(token.view())); }

}  // namespace mwv::text
