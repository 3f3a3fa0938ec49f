#include "ctcws/spotter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>
#include <unordered_map>

namespace ctcws {

bool Overlaps(std::int32_t s1, std::int32_t e1, std::int32_t s2,
              std::int32_t e2) {
  return s1 <= e2 && s2 <= e1;
}

namespace {

// Collects the hypotheses created on one frame and recombines those sharing a
// state. The state key is (node, blank_seen) when pruning, or
// (node, blank_seen, start_frame) for the exact search.
class FrameHyps {
 public:
  FrameHyps(std::size_t num_nodes, bool exact)
      : exact_(exact), slots_(exact ? 0 : 2 * num_nodes, -1) {}

  void clear() {
    for (const auto& h : hyps_) {
      if (!exact_) slots_[SlotOf(h)] = -1;
    }
    if (exact_) index_.clear();
    hyps_.clear();
  }

  void add(const Hypothesis& h) {
    std::int32_t* slot = nullptr;
    if (exact_) {
      const std::uint64_t key =
          (static_cast<std::uint64_t>(h.node) << 33) |
          (static_cast<std::uint64_t>(h.blank_seen) << 32) |
          static_cast<std::uint32_t>(h.start_frame);
      slot = &index_.try_emplace(key, -1).first->second;
    } else {
      slot = &slots_[SlotOf(h)];
    }
    if (*slot < 0) {
      *slot = static_cast<std::int32_t>(hyps_.size());
      hyps_.push_back(h);
      return;
    }
    Hypothesis& old = hyps_[static_cast<std::size_t>(*slot)];
    if (h.score > old.score ||
        (h.score == old.score && h.start_frame < old.start_frame)) {
      old = h;
    }
  }

  const std::vector<Hypothesis>& hyps() const { return hyps_; }

 private:
  static std::size_t SlotOf(const Hypothesis& h) {
    return 2 * static_cast<std::size_t>(h.node) + (h.blank_seen ? 1 : 0);
  }

  bool exact_;
  std::vector<std::int32_t> slots_;
  std::unordered_map<std::uint64_t, std::int32_t> index_;
  std::vector<Hypothesis> hyps_;
};

}  // namespace

std::vector<SpottedCandidate> Spot(const LogProbMatrix& logprobs,
                                   const ContextGraph& graph,
                                   const Vocabulary& vocab,
                                   const SpotterConfig& cfg) {
  if (logprobs.vocab_size() != vocab.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "logprob matrix has " + std::to_string(logprobs.vocab_size()) +
                    " columns, vocabulary has " + std::to_string(vocab.size()));
  }
  std::vector<SpottedCandidate> out;
  if (graph.num_nodes() <= 1 || logprobs.frames() == 0) return out;

  const bool prune = cfg.pruning_enabled;
  const TokenId blank = vocab.blank_id();
  FrameHyps next(graph.num_nodes(), !prune);
  std::vector<Hypothesis> active;
  // (start_frame, entry_id) -> best score for candidates ending this frame.
  std::map<std::pair<std::int32_t, std::int32_t>, double> ended;

  auto emit = [&](const Hypothesis& h) {
    const auto entry = graph.node(h.node).entry_id;
    if (entry == ContextGraph::kNoEntry) return;
    auto [it, fresh] = ended.try_emplace({h.start_frame, entry}, h.score);
    if (!fresh && h.score > it->second) it->second = h.score;
  };

  for (std::size_t ft = 0; ft < logprobs.frames(); ++ft) {
    const auto t = static_cast<std::int32_t>(ft);
    const auto row = logprobs.row(ft);
    const double blank_lp = row[static_cast<std::size_t>(blank)];
    next.clear();
    ended.clear();

    // Fresh empty hypothesis for this frame.
    if (!(prune && blank_lp > cfg.beta_thr)) {
      for (auto c : graph.children(ContextGraph::kRoot)) {
        const double lp = row[static_cast<std::size_t>(graph.node(c).token)];
        if (std::isinf(lp)) continue;
        if (prune && lp < cfg.gamma_thr) continue;
        Hypothesis h{c, lp + cfg.cb_w, t, false};
        emit(h);
        next.add(h);
      }
    }

    for (const Hypothesis& h : active) {
      const auto& node = graph.node(h.node);
      const TokenId own = node.token;
      if (!h.blank_seen) {
        const double lp = row[static_cast<std::size_t>(own)];
        if (!std::isinf(lp)) {
          Hypothesis loop{h.node, h.score + lp + cfg.cb_w, h.start_frame, false};
          emit(loop);
          next.add(loop);
        }
      }
      if (!std::isinf(blank_lp)) {
        next.add({h.node, h.score + blank_lp, h.start_frame, true});
      }
      for (auto c : graph.children(h.node)) {
        const TokenId tok = graph.node(c).token;
        if (tok == own && !h.blank_seen) continue;
        const double lp = row[static_cast<std::size_t>(tok)];
        if (std::isinf(lp)) continue;
        Hypothesis adv{c, h.score + lp + cfg.cb_w, h.start_frame, false};
        emit(adv);
        next.add(adv);
      }
    }

    for (const auto& [key, score] : ended) {
      out.push_back({key.second, graph.canonical(key.second), key.first, t,
                     score});
    }

    active.clear();
    if (prune) {
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& h : next.hyps()) best = std::max(best, h.score);
      const double floor = best - cfg.beam_thr;
      for (const auto& h : next.hyps()) {
        if (h.score >= floor) active.push_back(h);
      }
    } else {
      active = next.hyps();
    }
  }
  return out;
}

std::vector<SpottedCandidate> FindBestHyps(
    std::vector<SpottedCandidate> candidates) {
  std::sort(candidates.begin(), candidates.end(),
            [](const SpottedCandidate& a, const SpottedCandidate& b) {
              return std::tie(a.start_frame, a.end_frame) <
                     std::tie(b.start_frame, b.end_frame);
            });
  auto better = [](const SpottedCandidate& a, const SpottedCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    const auto la = a.end_frame - a.start_frame;
    const auto lb = b.end_frame - b.start_frame;
    if (la != lb) return la > lb;
    return a.word < b.word;
  };
  std::vector<SpottedCandidate> best;
  std::int32_t cluster_end = -1;
  for (auto& c : candidates) {
    // Sorted by start, so a candidate joins the open cluster iff it starts
    // before the cluster's furthest end.
    if (!best.empty() && c.start_frame <= cluster_end) {
      cluster_end = std::max(cluster_end, c.end_frame);
      if (better(c, best.back())) best.back() = std::move(c);
    } else {
      cluster_end = c.end_frame;
      best.push_back(std::move(c));
    }
  }
  return best;
}

}  // namespace ctcws
