#include "ctcws/merge.hpp"

#include <algorithm>

namespace ctcws {

double BlankReference::score(std::int32_t start, std::int32_t end) const {
  if (logprobs == nullptr) return 0.0;
  double sum = 0.0;
  const auto frames = static_cast<std::int32_t>(logprobs->frames());
  for (std::int32_t t = std::max(start, 0); t <= end && t < frames; ++t) {
    sum += logprobs->at(static_cast<std::size_t>(t), blank_id);
  }
  return ctc_w * sum;
}

namespace {

std::vector<SpottedCandidate> ByStart(std::vector<SpottedCandidate> c) {
  std::stable_sort(c.begin(), c.end(),
                   [](const SpottedCandidate& a, const SpottedCandidate& b) {
                     return a.start_frame < b.start_frame;
                   });
  return c;
}

// Replaces the words overlapping `cand` with a single word carrying the
// candidate's canonical form and score.
void Splice(std::vector<AlignedWord>& words, const SpottedCandidate& cand) {
  auto first = std::find_if(words.begin(), words.end(), [&](const AlignedWord& w) {
    return w.end_frame >= cand.start_frame;
  });
  auto last = std::find_if(first, words.end(), [&](const AlignedWord& w) {
    return w.start_frame > cand.end_frame;
  });
  auto pos = words.erase(first, last);
  words.insert(pos, AlignedWord{cand.word, cand.start_frame, cand.end_frame,
                                cand.score});
}

}  // namespace

MergeResult MergeCtc(const WordAlignment& alignment,
                     const std::vector<SpottedCandidate>& candidates,
                     const BlankReference& blank_ref) {
  MergeResult result;
  result.words = alignment;
  for (const auto& cand : ByStart(candidates)) {
    MergeDecision d;
    d.candidate = cand;
    for (const auto& w : result.words.words) {
      if (Overlaps(w.start_frame, w.end_frame, cand.start_frame, cand.end_frame)) {
        d.overlapped_words.push_back(w);
        d.greedy_score_sum += w.score;
      }
    }
    if (d.overlapped_words.empty()) {
      d.greedy_score_sum = blank_ref.score(cand.start_frame, cand.end_frame);
    }
    d.accepted = cand.score > d.greedy_score_sum;
    if (d.accepted) Splice(result.words.words, cand);
    result.decisions.push_back(std::move(d));
  }
  result.text = result.words.text();
  return result;
}

MergeResult MergeTransducer(const WordAlignment& transducer_alignment,
                            const WordAlignment& ctc_alignment,
                            const std::vector<SpottedCandidate>& candidates,
                            const BlankReference& blank_ref) {
  MergeResult filtered = MergeCtc(ctc_alignment, candidates, blank_ref);
  MergeResult result;
  result.words = transducer_alignment;
  for (const auto& d : filtered.decisions) {
    if (d.accepted) Splice(result.words.words, d.candidate);
  }
  result.decisions = std::move(filtered.decisions);
  result.text = result.words.text();
  return result;
}

}  // namespace ctcws
