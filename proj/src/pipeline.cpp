#include "ctcws/pipeline.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ctcws {

UtteranceResult DecodeUtterance(const Utterance& utt, const Vocabulary& vocab,
                                const ContextGraph& graph,
                                const SpotterConfig& cfg, DecodeMode mode) {
  UtteranceResult r;
  r.id = utt.id;
  r.reference = utt.reference;
  if (utt.load_error) {
    r.error = *utt.load_error;
    return r;
  }
  try {
    const WordAlignment ctc = GreedyCtcAlign(utt.logprobs, vocab, cfg.ctc_w);
    auto candidates = FindBestHyps(Spot(utt.logprobs, graph, vocab, cfg));
    const BlankReference blank_ref{&utt.logprobs, vocab.blank_id(), cfg.ctc_w};
    if (mode == DecodeMode::kTransducer) {
      if (!utt.transducer_alignment) {
        throw Error(ErrorCode::kInvalidValue,
                    "transducer mode needs a transducer alignment for " + utt.id);
      }
      r.greedy_text = utt.transducer_alignment->text();
      r.merge = MergeTransducer(*utt.transducer_alignment, ctc, candidates,
                                blank_ref);
    } else {
      r.greedy_text = ctc.text();
      r.merge = MergeCtc(ctc, candidates, blank_ref);
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

std::vector<UtteranceResult> DecodeBatch(const std::vector<Utterance>& utts,
                                         const Vocabulary& vocab,
                                         const ContextGraph& graph,
                                         const SpotterConfig& cfg,
                                         DecodeMode mode, int workers) {
  std::vector<UtteranceResult> results(utts.size());
  const auto n = static_cast<std::ptrdiff_t>(utts.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers > 0 ? workers : 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    results[static_cast<std::size_t>(i)] =
        DecodeUtterance(utts[static_cast<std::size_t>(i)], vocab, graph, cfg, mode);
  }
  return results;
}

std::vector<UtteranceResult> DecodeBatchSerial(
    const std::vector<Utterance>& utts, const Vocabulary& vocab,
    const ContextGraph& graph, const SpotterConfig& cfg, DecodeMode mode) {
  std::vector<UtteranceResult> results;
  results.reserve(utts.size());
  for (const auto& u : utts) {
    results.push_back(DecodeUtterance(u, vocab, graph, cfg, mode));
  }
  return results;
}

std::vector<Utterance> LoadUtterances(const std::vector<UtteranceRecord>& records,
                                      DecodeMode mode, int workers) {
  std::vector<Utterance> utts(records.size());
  const auto n = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers > 0 ? workers : 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& rec = records[static_cast<std::size_t>(i)];
    Utterance& u = utts[static_cast<std::size_t>(i)];
    u.id = rec.id;
    u.reference = rec.reference_text;
    try {
      u.logprobs = LoadLogProbsFile(rec.logprob_source);
      if (mode == DecodeMode::kTransducer) {
        if (!rec.transducer_alignment_source) {
          throw Error(ErrorCode::kInvalidValue,
                      "record " + rec.id + " has no transducer_alignment");
        }
        u.transducer_alignment =
            LoadTransducerAlignmentFile(*rec.transducer_alignment_source);
      }
    } catch (const std::exception& e) {
      u.load_error = e.what();
    }
  }
  return utts;
}

namespace {

nlohmann::json ScoreJson(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

nlohmann::json WordJson(const AlignedWord& w) {
  return {{"word", w.word},
          {"start_frame", w.start_frame},
          {"end_frame", w.end_frame},
          {"score", ScoreJson(w.score)}};
}

}  // namespace

nlohmann::json ResultToJson(const UtteranceResult& r) {
  nlohmann::json j;
  j["id"] = r.id;
  if (r.error) {
    j["error"] = *r.error;
    return j;
  }
  j["greedy_text"] = r.greedy_text;
  j["text"] = r.merge.text;
  if (r.reference) j["reference"] = *r.reference;
  nlohmann::json decisions = nlohmann::json::array();
  for (const auto& d : r.merge.decisions) {
    nlohmann::json overlapped = nlohmann::json::array();
    for (const auto& w : d.overlapped_words) overlapped.push_back(WordJson(w));
    decisions.push_back({{"word", d.candidate.word},
                         {"start_frame", d.candidate.start_frame},
                         {"end_frame", d.candidate.end_frame},
                         {"score", ScoreJson(d.candidate.score)},
                         {"greedy_score", ScoreJson(d.greedy_score_sum)},
                         {"overlapped", std::move(overlapped)},
                         {"accepted", d.accepted}});
  }
  j["candidates"] = std::move(decisions);
  return j;
}

std::string ResultsToJsonl(const std::vector<UtteranceResult>& results) {
  std::string out;
  for (const auto& r : results) {
    out += ResultToJson(r).dump();
    out.push_back('\n');
  }
  return out;
}

}  // namespace ctcws
