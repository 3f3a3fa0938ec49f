#pragma once

#include <filesystem>
#include <istream>
#include <ostream>

#include "ctcws/context_graph.hpp"

namespace ctcws {

// Versioned binary graph file pinned to a vocabulary fingerprint. The entries
// are stored and the trie is rebuilt on load, which is deterministic.
void WriteGraph(std::ostream& out, const ContextGraph& graph,
                const Vocabulary& vocab);
// Throws kVocabularyMismatch if the file was built against another vocabulary.
ContextGraph ReadGraph(std::istream& in, const Vocabulary& vocab);

void WriteGraphFile(const std::filesystem::path& path, const ContextGraph& graph,
                    const Vocabulary& vocab);
ContextGraph ReadGraphFile(const std::filesystem::path& path,
                           const Vocabulary& vocab);

}  // namespace ctcws
