#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctcws/core_types.hpp"

namespace ctcws {

using TokenSequence = std::vector<TokenId>;

struct BiasingEntry {
  std::string canonical;
  std::vector<TokenSequence> transcriptions;
};

// Greedy longest-match segmentation of a word or space-separated phrase.
// The first piece of every word may also match with the boundary marker
// prepended (marker form wins ties). When the vocabulary has a bare marker
// token and a non-initial word does not open with a marker piece, the bare
// marker is inserted as separator. Throws kUnsegmentable.
TokenSequence Tokenize(std::string_view text, const Vocabulary& vocab);

// Prefix tree over token sequences. CTC self-loops and blank arcs are implied
// for every node and handled by the spotter, so only trie edges are stored.
// Nodes are numbered in BFS order with children sorted by token id.
class ContextGraph {
 public:
  using NodeIndex = std::uint32_t;
  static constexpr NodeIndex kRoot = 0;
  static constexpr std::int32_t kNoEntry = -1;

  struct Node {
    TokenId token = -1;  // -1 for the root
    NodeIndex parent = 0;
    std::uint32_t first_child = 0;
    std::uint32_t num_children = 0;
    std::int32_t entry_id = kNoEntry;

    bool is_end_of_word() const { return entry_id != kNoEntry; }
  };

  struct DuplicateTranscription {
    std::int32_t kept_entry;
    std::int32_t dropped_entry;
    TokenSequence tokens;
  };

  ContextGraph();

  std::size_t num_nodes() const { return nodes_.size(); }
  const Node& node(NodeIndex i) const { return nodes_[i]; }
  std::span<const NodeIndex> children(NodeIndex i) const {
    const Node& n = nodes_[i];
    return {children_.data() + n.first_child, n.num_children};
  }
  // Child reached by token, or kRoot when there is none.
  NodeIndex child(NodeIndex i, TokenId token) const;

  const std::vector<BiasingEntry>& entries() const { return entries_; }
  const std::string& canonical(std::int32_t entry_id) const {
    return entries_[static_cast<std::size_t>(entry_id)].canonical;
  }
  std::size_t num_transcriptions() const { return num_transcriptions_; }
  const std::vector<DuplicateTranscription>& duplicates() const {
    return duplicates_;
  }

  friend ContextGraph BuildGraph(std::vector<BiasingEntry> entries,
                                 const Vocabulary& vocab);

 private:
  std::vector<Node> nodes_;
  std::vector<NodeIndex> children_;
  std::vector<BiasingEntry> entries_;
  std::size_t num_transcriptions_ = 0;
  std::vector<DuplicateTranscription> duplicates_;
};

// Validates entries against vocab (non-empty transcriptions, no blank, ids in
// range) and builds the trie. Repeated transcriptions within one entry are
// collapsed; a transcription claimed by two entries stays with the first and is
// recorded in duplicates().
ContextGraph BuildGraph(std::vector<BiasingEntry> entries,
                        const Vocabulary& vocab);

// Graphviz rendering. Node ids follow the BFS numbering, so output is stable.
std::string ExportDot(const ContextGraph& graph, const Vocabulary& vocab);

}  // namespace ctcws
