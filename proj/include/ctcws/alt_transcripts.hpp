#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctcws/context_graph.hpp"

namespace ctcws {

// Frequency-ranked word list with Zipf costs: cost(rank) = ln((rank + 1) * ln N).
// N is clamped to at least 2 so a one-word list still has finite cost.
class WordCostDictionary {
 public:
  WordCostDictionary() = default;
  explicit WordCostDictionary(std::vector<std::string> ranked_words);

  std::size_t size() const { return words_.size(); }
  // +infinity for unknown words.
  double cost(std::string_view word) const;
  std::size_t max_word_length() const { return max_len_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, double> costs_;
  std::size_t max_len_ = 0;
};

WordCostDictionary LoadWordList(std::istream& in);
WordCostDictionary LoadWordListFile(const std::filesystem::path& path);

inline constexpr std::size_t kMaxAbbreviationLength = 4;
inline constexpr std::size_t kMinCompoundLength = 3;
inline constexpr std::size_t kMinCompoundPiece = 2;

// "gpu" -> "g p u" for words of at most four characters.
std::optional<std::string> AbbreviationVariant(std::string_view word);

// Minimum-cost split into two or more known pieces of length >= 2. Returned
// only when it is strictly cheaper than keeping the word whole.
std::optional<std::string> CompoundSplit(std::string_view word,
                                         const WordCostDictionary& dict);

using ManualAlternatives = std::map<std::string, std::vector<std::string>>;

// `word<TAB>alt[<TAB>alt]*` lines; '#' starts a comment line.
ManualAlternatives LoadManualAlternatives(std::istream& in);
ManualAlternatives LoadManualAlternativesFile(const std::filesystem::path& path);

struct ContextListItem {
  std::string canonical;
  std::vector<std::string> spellings;  // extra surface forms
};

// Context list lines: `canonical[<TAB>alt_spelling]*`, '#' comment lines.
std::vector<ContextListItem> LoadContextList(std::istream& in);
std::vector<ContextListItem> LoadContextListFile(
    const std::filesystem::path& path);

struct ExpandOptions {
  bool auto_alternatives = true;
};

struct ExpandWarning {
  std::string canonical;
  std::string surface;
  std::string message;
  bool entry_dropped = false;
};

struct ExpandedEntries {
  std::vector<BiasingEntry> entries;
  // Surface strings behind each entry's transcriptions, index-aligned.
  std::vector<std::vector<std::string>> surfaces;
  std::vector<ExpandWarning> warnings;
};

// Each item becomes one entry whose transcriptions are the tokenized primary
// form, the abbreviation and compound variants (when auto_alternatives), the
// list's own alternate spellings and any manual alternatives. Unsegmentable
// alternatives are skipped with a warning; the entry is dropped only when its
// primary form cannot be tokenized.
ExpandedEntries ExpandEntries(const std::vector<ContextListItem>& items,
                              const Vocabulary& vocab,
                              const WordCostDictionary& dict,
                              const ManualAlternatives& manual,
                              const ExpandOptions& opts = {});

}  // namespace ctcws
