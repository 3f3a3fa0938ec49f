#pragma once

#include <string>
#include <vector>

#include "ctcws/core_types.hpp"
#include "ctcws/greedy_align.hpp"
#include "ctcws/spotter.hpp"

namespace ctcws {

struct MergeDecision {
  SpottedCandidate candidate;
  std::vector<AlignedWord> overlapped_words;
  // Sum of overlapped word scores, or the weighted blank mass of the
  // candidate's interval when it overlaps no word.
  double greedy_score_sum = 0.0;
  bool accepted = false;
};

struct MergeResult {
  std::string text;
  WordAlignment words;  // merged alignment; accepted words carry their score
  std::vector<MergeDecision> decisions;
};

// Supplies the "silence" reference for candidates that overlap no word:
// ctc_w times the blank log-probs summed over the candidate interval.
struct BlankReference {
  const LogProbMatrix* logprobs = nullptr;
  TokenId blank_id = 0;
  double ctc_w = 0.0;

  double score(std::int32_t start, std::int32_t end) const;
};

// Candidates must be pairwise non-overlapping (FindBestHyps output). They are
// taken left to right; an accepted candidate replaces every overlapped word.
MergeResult MergeCtc(const WordAlignment& alignment,
                     const std::vector<SpottedCandidate>& candidates,
                     const BlankReference& blank_ref);

// Decides acceptance against the CTC alignment, then splices the accepted
// candidates into the transducer alignment, dropping whatever transducer words
// they overlap.
MergeResult MergeTransducer(const WordAlignment& transducer_alignment,
                            const WordAlignment& ctc_alignment,
                            const std::vector<SpottedCandidate>& candidates,
                            const BlankReference& blank_ref);

}  // namespace ctcws
