#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctcws/context_graph.hpp"
#include "ctcws/core_types.hpp"
#include "ctcws/greedy_align.hpp"
#include "ctcws/merge.hpp"
#include "ctcws/spotter.hpp"
#include "json.hpp"

namespace ctcws {

enum class DecodeMode { kCtc, kTransducer };

// One utterance ready for decoding. Loading failures are carried in
// load_error so the batch keeps going.
struct Utterance {
  std::string id;
  LogProbMatrix logprobs;
  std::optional<WordAlignment> transducer_alignment;
  std::optional<std::string> reference;
  std::optional<std::string> load_error;
};

struct UtteranceResult {
  std::string id;
  std::string greedy_text;
  std::optional<std::string> reference;
  MergeResult merge;
  std::optional<std::string> error;
};

// Greedy alignment, spotting, overlap resolution and merge for one utterance.
UtteranceResult DecodeUtterance(const Utterance& utt, const Vocabulary& vocab,
                                const ContextGraph& graph,
                                const SpotterConfig& cfg, DecodeMode mode);

// Worker-pool decode over utterances (OpenMP, one utterance per task).
// Results keep input order, so the output does not depend on `workers`.
std::vector<UtteranceResult> DecodeBatch(const std::vector<Utterance>& utts,
                                         const Vocabulary& vocab,
                                         const ContextGraph& graph,
                                         const SpotterConfig& cfg,
                                         DecodeMode mode, int workers);

// Plain loop over DecodeUtterance; reference for the parallel path.
std::vector<UtteranceResult> DecodeBatchSerial(
    const std::vector<Utterance>& utts, const Vocabulary& vocab,
    const ContextGraph& graph, const SpotterConfig& cfg, DecodeMode mode);

// Loads matrices (and transducer alignments in transducer mode) for every
// record. Per-record failures go to Utterance::load_error.
std::vector<Utterance> LoadUtterances(const std::vector<UtteranceRecord>& records,
                                      DecodeMode mode, int workers = 1);

nlohmann::json ResultToJson(const UtteranceResult& r);
// One JSON document per line, in input order.
std::string ResultsToJsonl(const std::vector<UtteranceResult>& results);

}  // namespace ctcws
