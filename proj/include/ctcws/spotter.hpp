#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctcws/context_graph.hpp"
#include "ctcws/core_types.hpp"

namespace ctcws {

// In-flight search state. A hypothesis sitting at the root has emitted
// nothing yet ("empty"); it is re-seeded on every frame.
struct Hypothesis {
  ContextGraph::NodeIndex node = ContextGraph::kRoot;
  double score = 0.0;
  std::int32_t start_frame = 0;
  bool blank_seen = false;

  bool empty() const { return node == ContextGraph::kRoot; }
};

struct SpottedCandidate {
  std::int32_t entry_id = ContextGraph::kNoEntry;
  std::string word;
  std::int32_t start_frame = 0;
  std::int32_t end_frame = 0;  // inclusive, frame of the last non-blank emission
  double score = 0.0;
};

bool Overlaps(std::int32_t s1, std::int32_t e1, std::int32_t s2,
              std::int32_t e2);

// Frame-synchronous word spotting over the context graph.
//
// Per frame every active hypothesis may re-emit its own token (self-loop),
// emit blank, or advance to a child. Re-emitting after a blank is only
// possible as a move to a child carrying the same token. Non-blank emissions
// earn cb_w on top of the token log-probability, blanks earn nothing.
// Reaching an end-of-word node with a non-blank emission reports a candidate.
//
// With pruning enabled: empty hypotheses are not expanded on frames whose
// blank log-prob exceeds beta_thr, may only enter first tokens scoring at
// least gamma_thr, hypotheses trailing the best of the frame by more than
// beam_thr are dropped, and one hypothesis survives per (node, blank_seen)
// state. Candidates are reported as they are reached, before the frame is
// pruned. With pruning disabled nothing is gated and
// recombination is exact per (node, blank_seen, start_frame), so every
// (entry, start, end) gets its best score.
//
// The result holds one candidate per (entry, start, end) with its best score,
// ordered by (end_frame, start_frame, entry_id).
std::vector<SpottedCandidate> Spot(const LogProbMatrix& logprobs,
                                   const ContextGraph& graph,
                                   const Vocabulary& vocab,
                                   const SpotterConfig& cfg);

// Clusters candidates by transitive interval overlap and keeps the best of each
// cluster: highest score, then longer interval, then smaller word. Sorted by
// start_frame.
std::vector<SpottedCandidate> FindBestHyps(
    std::vector<SpottedCandidate> candidates);

}  // namespace ctcws
