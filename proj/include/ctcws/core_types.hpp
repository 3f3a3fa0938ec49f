#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctcws/error.hpp"

namespace ctcws {

using TokenId = std::int32_t;

// "▁" (U+2581), the SentencePiece start-of-word marker.
inline constexpr std::string_view kDefaultBoundaryMarker = "\xE2\x96\x81";

// Token table of the acoustic model. A token equal to the boundary marker is a
// pure word separator; a token that starts with it opens a new word. Setting
// the marker to the space token gives the char-level mode.
class Vocabulary {
 public:
  Vocabulary() = default;
  // blank_id < 0 selects the last index.
  Vocabulary(std::vector<std::string> tokens, TokenId blank_id = -1,
             std::string boundary_marker = std::string(kDefaultBoundaryMarker));

  std::size_t size() const { return tokens_.size(); }
  TokenId blank_id() const { return blank_id_; }
  const std::string& boundary_marker() const { return marker_; }
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::optional<TokenId> find(std::string_view token) const;

  bool is_separator(TokenId id) const;
  bool starts_word(TokenId id) const;
  // Token text with a leading boundary marker removed.
  std::string_view surface(TokenId id) const;

  // FNV-1a over tokens, blank id and marker; used to pin serialized graphs to
  // the vocabulary they were built with.
  std::uint64_t fingerprint() const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  TokenId blank_id_ = 0;
  std::string marker_;
};

Vocabulary LoadVocabulary(std::istream& in, TokenId blank_id = -1,
                          std::string boundary_marker =
                              std::string(kDefaultBoundaryMarker));
Vocabulary LoadVocabularyFile(const std::filesystem::path& path,
                              TokenId blank_id = -1,
                              std::string boundary_marker =
                                  std::string(kDefaultBoundaryMarker));

// T x V row-major matrix of natural-log token probabilities.
class LogProbMatrix {
 public:
  LogProbMatrix() = default;
  LogProbMatrix(std::size_t frames, std::size_t vocab_size,
                std::vector<float> values, bool normalized);

  std::size_t frames() const { return frames_; }
  std::size_t vocab_size() const { return vocab_size_; }
  bool normalized() const { return normalized_; }

  float at(std::size_t t, TokenId token) const {
    return values_[t * vocab_size_ + static_cast<std::size_t>(token)];
  }
  std::span<const float> row(std::size_t t) const {
    return {values_.data() + t * vocab_size_, vocab_size_};
  }
  std::span<const float> values() const { return values_; }

  // log-sum-exp of row t.
  double row_logsumexp(std::size_t t) const;

 private:
  std::size_t frames_ = 0;
  std::size_t vocab_size_ = 0;
  std::vector<float> values_;
  bool normalized_ = false;
};

inline constexpr double kNormalizationTolerance = 1e-3;

// Binary "CTCL" container; see README for the byte layout.
LogProbMatrix LoadLogProbs(std::istream& in);
void WriteLogProbs(std::ostream& out, const LogProbMatrix& m);
// T lines of V tab-separated floats. The normalized flag is inferred.
LogProbMatrix LoadLogProbsTsv(std::istream& in);
// Dispatches on extension: ".tsv"/".txt" is text, anything else binary.
LogProbMatrix LoadLogProbsFile(const std::filesystem::path& path);

struct SpotterConfig {
  double cb_w = 3.0;
  double ctc_w = 0.5;
  double beta_thr = std::log(0.80);
  double gamma_thr = std::log(0.001);
  double beam_thr = 7.0;
  bool pruning_enabled = true;

  void validate() const;
};

struct UtteranceRecord {
  std::string id;
  std::filesystem::path logprob_source;
  std::optional<std::string> reference_text;
  std::optional<std::filesystem::path> transducer_alignment_source;
};

// JSON-lines manifest. Relative paths resolve against base_dir.
std::vector<UtteranceRecord> LoadManifest(
    std::istream& in, const std::filesystem::path& base_dir = {});
std::vector<UtteranceRecord> LoadManifestFile(
    const std::filesystem::path& path);

// Splits on runs of ASCII whitespace.
std::vector<std::string> SplitWords(std::string_view text);
std::string JoinWords(std::span<const std::string> words);

}  // namespace ctcws
