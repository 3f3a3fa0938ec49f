#include "ctcws/alt_transcripts.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "ctcws/utf8.hpp"

namespace ctcws {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t tab = line.find('\t', pos);
    out.push_back(line.substr(pos, tab == std::string::npos ? std::string::npos
                                                            : tab - pos));
    if (tab == std::string::npos) break;
    pos = tab + 1;
  }
  return out;
}

template <typename Fn>
void ForEachContentLine(std::istream& in, Fn&& fn) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    fn(line);
  }
}

}  // namespace

WordCostDictionary::WordCostDictionary(std::vector<std::string> ranked_words)
    : words_(std::move(ranked_words)) {
  const double log_n =
      std::log(static_cast<double>(std::max<std::size_t>(words_.size(), 2)));
  for (std::size_t rank = 0; rank < words_.size(); ++rank) {
    const double c = std::log(static_cast<double>(rank + 1) * log_n);
    if (costs_.emplace(words_[rank], c).second) {
      max_len_ = std::max(max_len_, Utf8Length(words_[rank]));
    }
  }
}

double WordCostDictionary::cost(std::string_view word) const {
  auto it = costs_.find(std::string(word));
  return it == costs_.end() ? kInf : it->second;
}

WordCostDictionary LoadWordList(std::istream& in) {
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto w = NormalizeCanonical(line);
    if (!w.empty()) words.push_back(std::move(w));
  }
  return WordCostDictionary(std::move(words));
}

WordCostDictionary LoadWordListFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return LoadWordList(in);
}

std::optional<std::string> AbbreviationVariant(std::string_view word) {
  const auto chars = Utf8Chars(word);
  // A single character spelled out is itself.
  if (chars.size() < 2 || chars.size() > kMaxAbbreviationLength) return std::nullopt;
  if (std::find(chars.begin(), chars.end(), " ") != chars.end()) return std::nullopt;
  return JoinWords(chars);
}

std::optional<std::string> CompoundSplit(std::string_view word,
                                         const WordCostDictionary& dict) {
  const auto b = Utf8Boundaries(word);
  const std::size_t n = b.size() - 1;
  if (n < kMinCompoundLength || word.find(' ') != std::string_view::npos) {
    return std::nullopt;
  }
  auto piece = [&](std::size_t i, std::size_t j) {
    return word.substr(b[i], b[j] - b[i]);
  };
  // best[i]: cheapest segmentation of the first i characters.
  std::vector<double> best(n + 1, kInf);
  std::vector<std::size_t> back(n + 1, 0);
  best[0] = 0.0;
  for (std::size_t j = kMinCompoundPiece; j <= n; ++j) {
    for (std::size_t i = 0; i + kMinCompoundPiece <= j; ++i) {
      if (std::isinf(best[i])) continue;
      if (i == 0 && j == n) continue;  // whole word is not a split
      const double c = best[i] + dict.cost(piece(i, j));
      if (c < best[j]) {
        best[j] = c;
        back[j] = i;
      }
    }
  }
  if (std::isinf(best[n]) || !(best[n] < dict.cost(word))) return std::nullopt;
  std::vector<std::string> pieces;
  for (std::size_t j = n; j > 0; j = back[j]) {
    pieces.emplace_back(piece(back[j], j));
  }
  std::reverse(pieces.begin(), pieces.end());
  return JoinWords(pieces);
}

ManualAlternatives LoadManualAlternatives(std::istream& in) {
  ManualAlternatives alts;
  ForEachContentLine(in, [&](const std::string& line) {
    auto cols = SplitTabs(line);
    const std::string word = NormalizeCanonical(cols[0]);
    if (word.empty()) return;
    auto& list = alts[word];
    for (std::size_t i = 1; i < cols.size(); ++i) {
      std::string alt = NormalizeCanonical(cols[i]);
      if (!alt.empty()) list.push_back(std::move(alt));
    }
  });
  return alts;
}

ManualAlternatives LoadManualAlternativesFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return LoadManualAlternatives(in);
}

std::vector<ContextListItem> LoadContextList(std::istream& in) {
  std::vector<ContextListItem> items;
  ForEachContentLine(in, [&](const std::string& line) {
    auto cols = SplitTabs(line);
    ContextListItem item;
    item.canonical = NormalizeCanonical(cols[0]);
    if (item.canonical.empty()) return;
    for (std::size_t i = 1; i < cols.size(); ++i) {
      std::string alt = NormalizeCanonical(cols[i]);
      if (!alt.empty()) item.spellings.push_back(std::move(alt));
    }
    items.push_back(std::move(item));
  });
  return items;
}

std::vector<ContextListItem> LoadContextListFile(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return LoadContextList(in);
}

ExpandedEntries ExpandEntries(const std::vector<ContextListItem>& items,
                              const Vocabulary& vocab,
                              const WordCostDictionary& dict,
                              const ManualAlternatives& manual,
                              const ExpandOptions& opts) {
  ExpandedEntries out;
  for (const auto& item : items) {
    const std::string canonical = NormalizeCanonical(item.canonical);
    if (canonical.empty()) continue;

    BiasingEntry entry;
    entry.canonical = canonical;
    std::vector<std::string> surfaces;
    auto add = [&](const std::string& surface, bool primary) {
      if (std::find(surfaces.begin(), surfaces.end(), surface) != surfaces.end()) {
        return true;
      }
      TokenSequence tokens;
      try {
        tokens = Tokenize(surface, vocab);
      } catch (const Error& e) {
        out.warnings.push_back({canonical, surface, e.what(), primary});
        return false;
      }
      if (std::find(entry.transcriptions.begin(), entry.transcriptions.end(),
                    tokens) == entry.transcriptions.end()) {
        entry.transcriptions.push_back(std::move(tokens));
        surfaces.push_back(surface);
      }
      return true;
    };

    if (!add(canonical, true)) continue;
    for (const auto& s : item.spellings) add(s, false);
    if (opts.auto_alternatives) {
      if (auto abbr = AbbreviationVariant(canonical)) add(*abbr, false);
      if (auto split = CompoundSplit(canonical, dict)) add(*split, false);
    }
    if (auto it = manual.find(canonical); it != manual.end()) {
      for (const auto& alt : it->second) add(alt, false);
    }
    out.entries.push_back(std::move(entry));
    out.surfaces.push_back(std::move(surfaces));
  }
  return out;
}

}  // namespace ctcws
