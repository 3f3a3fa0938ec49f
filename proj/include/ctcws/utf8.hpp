#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ctcws {

// Byte offsets of every code point start, followed by text.size().
// Malformed lead bytes are treated as single-byte code points.
std::vector<std::size_t> Utf8Boundaries(std::string_view text);

std::size_t Utf8Length(std::string_view text);

std::vector<std::string> Utf8Chars(std::string_view text);

// Trim, ASCII-lowercase and collapse inner whitespace to single spaces.
std::string NormalizeCanonical(std::string_view text);

}  // namespace ctcws
