#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "ctcws/core_types.hpp"

namespace ctcws {

struct AlignedWord {
  std::string word;
  std::int32_t start_frame = 0;
  std::int32_t end_frame = 0;  // inclusive
  double score = 0.0;
};

struct WordAlignment {
  std::vector<AlignedWord> words;
  std::size_t frames = 0;

  std::string text() const;
};

// Argmax per frame (lowest id on ties), collapse repeats, drop blanks, and
// group tokens into words at boundary-marker tokens. A word spans the first
// frame of its first token run to the last frame of its final run; its score
// is ctc_w times the sum of argmax log-probs over all frames of its runs.
WordAlignment GreedyCtcAlign(const LogProbMatrix& logprobs,
                             const Vocabulary& vocab, double ctc_w);

// JSON-lines {"word", "start_frame", "end_frame", "score"?}. Missing scores
// become -infinity.
WordAlignment LoadTransducerAlignment(std::istream& in);
WordAlignment LoadTransducerAlignmentFile(const std::filesystem::path& path);

}  // namespace ctcws
