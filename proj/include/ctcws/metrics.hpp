#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace ctcws {

enum class EditOp { kMatch, kSubstitution, kDeletion, kInsertion };

struct EditPair {
  EditOp op;
  int ref = -1;  // index into reference, -1 for insertions
  int hyp = -1;  // index into hypothesis, -1 for deletions
};

using EditScript = std::vector<EditPair>;

// Minimal Levenshtein alignment. Among equal-cost alignments the first
// differing step prefers match, then substitution, deletion, insertion.
EditScript AlignWords(const std::vector<std::string>& ref,
                      const std::vector<std::string>& hyp);

struct ErrorCounts {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t ref_words = 0;

  std::size_t errors() const { return substitutions + deletions + insertions; }
  ErrorCounts& operator+=(const ErrorCounts& o);
};

ErrorCounts CountErrors(const EditScript& script, std::size_t ref_words);

struct WerResult {
  double percent = 0.0;
  // Set when the reference is empty but the hypothesis is not; percent is
  // then 100 * insertions.
  bool empty_reference = false;
};

WerResult ComputeWer(const ErrorCounts& counts);
double Wer(const std::vector<std::string>& ref,
           const std::vector<std::string>& hyp);

struct WordCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  WordCounts& operator+=(const WordCounts& o);
};

using PerWordCounts = std::map<std::string, WordCounts>;

// Fuses every occurrence of a multi-word phrase from `phrases` into a single
// space-joined token, longest phrase first, scanning left to right.
std::vector<std::string> FusePhrases(const std::vector<std::string>& words,
                                     const std::set<std::string>& phrases);

PerWordCounts ScoreContextWords(const EditScript& script,
                                const std::vector<std::string>& ref,
                                const std::vector<std::string>& hyp,
                                const std::set<std::string>& biasing_words);

struct PrfScore {
  double precision = 0.0;
  double recall = 0.0;
  double fscore = 0.0;
};

double FScore(double precision, double recall);
PrfScore ComputePrf(const WordCounts& totals);

struct EvalReport {
  ErrorCounts errors;
  WordCounts totals;
  PerWordCounts per_word;
  std::size_t utterances = 0;
  std::size_t empty_reference_utterances = 0;
  double decode_seconds = 0.0;

  double wer() const { return ComputeWer(errors).percent; }
  PrfScore prf() const { return ComputePrf(totals); }

  // Adds one utterance. Phrases in biasing_words are fused on both sides
  // before alignment.
  void add(const std::string& reference, const std::string& hypothesis,
           const std::set<std::string>& biasing_words);
  EvalReport& operator+=(const EvalReport& o);

  nlohmann::json to_json() const;
};

struct MinedEntry {
  std::string text;
  std::size_t frequency = 0;
  std::size_t recognized = 0;
  double accuracy() const {
    return frequency ? static_cast<double>(recognized) / frequency : 0.0;
  }
};

// Unigram and adjacent-bigram recognition statistics over reference/hypothesis
// pairs. Keeps items with accuracy <= max_accuracy and at least min_len
// characters, most frequent first (ties alphabetical).
std::vector<MinedEntry> MineBiasingList(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    std::size_t min_len = 3, double max_accuracy = 0.5);

}  // namespace ctcws
