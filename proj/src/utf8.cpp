#include "ctcws/utf8.hpp"

#include "ctcws/core_types.hpp"

namespace ctcws {

namespace {

std::size_t SequenceLength(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

}  // namespace

std::vector<std::size_t> Utf8Boundaries(std::string_view text) {
  std::vector<std::size_t> bounds;
  std::size_t i = 0;
  while (i < text.size()) {
    bounds.push_back(i);
    std::size_t len = SequenceLength(static_cast<unsigned char>(text[i]));
    if (i + len > text.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    i += len;
  }
  bounds.push_back(text.size());
  return bounds;
}

std::size_t Utf8Length(std::string_view text) {
  return Utf8Boundaries(text).size() - 1;
}

std::vector<std::string> Utf8Chars(std::string_view text) {
  const auto b = Utf8Boundaries(text);
  std::vector<std::string> out;
  out.reserve(b.size() - 1);
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    out.emplace_back(text.substr(b[i], b[i + 1] - b[i]));
  }
  return out;
}

std::string NormalizeCanonical(std::string_view text) {
  std::string joined = JoinWords(SplitWords(text));
  for (char& c : joined) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return joined;
}

}  // namespace ctcws
