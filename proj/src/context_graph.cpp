#include "ctcws/context_graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

#include "ctcws/utf8.hpp"

namespace ctcws {

namespace {

// Longest-first depth-first segmentation of one word. Returns false when no
// segmentation exists; dead positions are memoized so the search is O(n^2).
bool SegmentWord(std::string_view word, const Vocabulary& vocab,
                 const std::vector<std::size_t>& bounds, std::size_t at,
                 std::vector<char>& dead, TokenSequence& out) {
  if (bounds[at] == word.size()) return true;
  if (dead[at]) return false;
  const std::string& marker = vocab.boundary_marker();
  for (std::size_t end = bounds.size() - 1; end > at; --end) {
    const std::string_view piece =
        word.substr(bounds[at], bounds[end] - bounds[at]);
    std::optional<TokenId> id;
    if (at == 0 && !marker.empty()) {
      id = vocab.find(marker + std::string(piece));
    }
    if (!id) id = vocab.find(piece);
    if (!id || *id == vocab.blank_id()) continue;
    out.push_back(*id);
    if (SegmentWord(word, vocab, bounds, end, dead, out)) return true;
    out.pop_back();
  }
  dead[at] = 1;
  return false;
}

}  // namespace

TokenSequence Tokenize(std::string_view text, const Vocabulary& vocab) {
  const auto words = SplitWords(text);
  if (words.empty()) throw Error(ErrorCode::kUnsegmentable, "empty word");
  const std::string& marker = vocab.boundary_marker();
  const auto separator = marker.empty() ? std::nullopt : vocab.find(marker);
  TokenSequence tokens;
  for (std::size_t w = 0; w < words.size(); ++w) {
    const std::string& word = words[w];
    std::vector<std::size_t> bounds = Utf8Boundaries(word);
    std::vector<char> dead(bounds.size(), 0);
    TokenSequence pieces;
    if (!SegmentWord(word, vocab, bounds, 0, dead, pieces)) {
      throw Error(ErrorCode::kUnsegmentable,
                  "no token covers '" + word + "' in '" + std::string(text) +
                      "'");
    }
    if (w > 0 && separator && *separator != vocab.blank_id() &&
        !vocab.starts_word(pieces.front())) {
      tokens.push_back(*separator);
    }
    tokens.insert(tokens.end(), pieces.begin(), pieces.end());
  }
  return tokens;
}

ContextGraph::ContextGraph() { nodes_.push_back(Node{}); }

ContextGraph::NodeIndex ContextGraph::child(NodeIndex i, TokenId token) const {
  const auto kids = children(i);
  auto it = std::lower_bound(kids.begin(), kids.end(), token,
                             [this](NodeIndex c, TokenId t) {
                               return nodes_[c].token < t;
                             });
  if (it != kids.end() && nodes_[*it].token == token) return *it;
  return kRoot;
}

ContextGraph BuildGraph(std::vector<BiasingEntry> entries,
                        const Vocabulary& vocab) {
  // Build a pointer trie first, then renumber breadth-first.
  struct Draft {
    TokenId token = -1;
    std::map<TokenId, std::size_t> kids;
    std::int32_t entry = ContextGraph::kNoEntry;
  };
  std::vector<Draft> draft(1);
  ContextGraph graph;

  for (std::size_t e = 0; e < entries.size(); ++e) {
    BiasingEntry& entry = entries[e];
    entry.canonical = NormalizeCanonical(entry.canonical);
    if (entry.canonical.empty()) {
      throw Error(ErrorCode::kInvalidValue,
                  "entry " + std::to_string(e) + " has empty canonical form");
    }
    std::vector<TokenSequence> kept;
    for (const TokenSequence& seq : entry.transcriptions) {
      if (seq.empty()) {
        throw Error(ErrorCode::kInvalidValue,
                    "empty transcription for '" + entry.canonical + "'");
      }
      for (TokenId id : seq) {
        if (id < 0 || static_cast<std::size_t>(id) >= vocab.size() ||
            id == vocab.blank_id()) {
          throw Error(ErrorCode::kInvalidValue,
                      "bad token id " + std::to_string(id) + " in '" +
                          entry.canonical + "'");
        }
      }
      if (std::find(kept.begin(), kept.end(), seq) != kept.end()) continue;

      std::size_t cur = 0;
      for (TokenId id : seq) {
        auto it = draft[cur].kids.find(id);
        if (it == draft[cur].kids.end()) {
          draft.push_back(Draft{id, {}, ContextGraph::kNoEntry});
          it = draft[cur].kids.emplace(id, draft.size() - 1).first;
        }
        cur = it->second;
      }
      if (draft[cur].entry != ContextGraph::kNoEntry) {
        graph.duplicates_.push_back(
            {draft[cur].entry, static_cast<std::int32_t>(e), seq});
        continue;
      }
      draft[cur].entry = static_cast<std::int32_t>(e);
      kept.push_back(seq);
    }
    graph.num_transcriptions_ += kept.size();
    entry.transcriptions = std::move(kept);
  }

  graph.nodes_.clear();
  graph.nodes_.reserve(draft.size());
  graph.children_.reserve(draft.size());
  std::deque<std::pair<std::size_t, ContextGraph::NodeIndex>> queue;
  graph.nodes_.push_back({-1, 0, 0, 0, draft[0].entry});
  queue.emplace_back(0, 0);
  while (!queue.empty()) {
    auto [d, idx] = queue.front();
    queue.pop_front();
    graph.nodes_[idx].first_child =
        static_cast<std::uint32_t>(graph.children_.size());
    graph.nodes_[idx].num_children =
        static_cast<std::uint32_t>(draft[d].kids.size());
    for (const auto& [token, kid] : draft[d].kids) {
      const auto kid_idx =
          static_cast<ContextGraph::NodeIndex>(graph.nodes_.size());
      graph.nodes_.push_back({token, idx, 0, 0, draft[kid].entry});
      graph.children_.push_back(kid_idx);
      queue.emplace_back(kid, kid_idx);
    }
  }
  graph.entries_ = std::move(entries);
  return graph;
}

namespace {

std::string DotEscape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string ExportDot(const ContextGraph& graph, const Vocabulary& vocab) {
  std::ostringstream os;
  os << "digraph context_graph {\n  rankdir=LR;\n";
  os << "  n0 [label=\"root\", shape=circle];\n";
  for (ContextGraph::NodeIndex i = 1; i < graph.num_nodes(); ++i) {
    const auto& n = graph.node(i);
    os << "  n" << i << " [label=\"" << DotEscape(vocab.token(n.token));
    if (n.is_end_of_word()) {
      os << "\\n" << DotEscape(graph.canonical(n.entry_id))
         << "\", shape=doublecircle];\n";
    } else {
      os << "\", shape=circle];\n";
    }
  }
  for (ContextGraph::NodeIndex i = 0; i < graph.num_nodes(); ++i) {
    for (auto c : graph.children(i)) {
      os << "  n" << i << " -> n" << c << " [label=\""
         << DotEscape(vocab.token(graph.node(c).token)) << "\"];\n";
    }
    if (i != ContextGraph::kRoot) {
      os << "  n" << i << " -> n" << i << " [color=green];\n";
      os << "  n" << i << " -> n" << i << " [color=blue, label=\"blank\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace ctcws
