#pragma once

// Synthetic vocabularies and log-probability matrices for tests and benches.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ctcws/context_graph.hpp"
#include "ctcws/core_types.hpp"
#include "ctcws/greedy_align.hpp"

namespace ctcws::fixtures {

// Builds normalized matrices frame by frame. Probability mass not assigned
// explicitly is spread evenly over the remaining tokens.
class MatrixBuilder {
 public:
  explicit MatrixBuilder(std::size_t vocab_size) : vocab_size_(vocab_size) {}

  MatrixBuilder& frame(const std::vector<std::pair<TokenId, double>>& probs);
  MatrixBuilder& repeat(const std::vector<std::pair<TokenId, double>>& probs,
                        int count);
  // Row given directly in log domain (not renormalized).
  MatrixBuilder& raw(std::vector<float> logprobs);

  std::size_t frames() const { return rows_.size() / vocab_size_; }
  LogProbMatrix build(bool normalized = true) const;

 private:
  std::size_t vocab_size_;
  std::vector<float> rows_;
};

// Random row-normalized log-probabilities.
LogProbMatrix RandomMatrix(std::mt19937& rng, std::size_t frames,
                           std::size_t vocab_size, double peakiness = 1.0);

// Rows where `path[t]` has log-prob ~0 and every other token -margin
// (unnormalized).
LogProbMatrix OneHotMatrix(const std::vector<TokenId>& path,
                           std::size_t vocab_size, double margin);

// Small SentencePiece-style vocabulary covering the hand-built scenarios.
Vocabulary ScenarioVocab();
TokenId Tok(const Vocabulary& vocab, const std::string& token);

struct Scenario {
  Vocabulary vocab;
  LogProbMatrix logprobs;
  std::vector<std::string> context;  // biasing words
  std::string reference;
  std::optional<WordAlignment> transducer;
};

// "the new gpu is fast" where the greedy decode splits gpu into g p u.
Scenario GpuScenario();
// "cloud" decoded confidently; only "cuda" is in the list.
Scenario CloudScenario();
// Transducer output says "invidia" while CTC evidence favors "nvidia".
Scenario NvidiaTransducerScenario();

// Twenty utterances mixing planted "gpu" of graded strength and "cloud"
// decoys of graded "cuda" confusability. Reference texts are exact.
std::vector<Scenario> SweepSuite();

// 1024-token synthetic BPE vocabulary: blank last, letters and marker-letters
// first so every lowercase word is segmentable.
Vocabulary SyntheticVocab(std::uint32_t seed = 7, std::size_t size = 1024);

std::string RandomWord(std::mt19937& rng, int min_len = 3, int max_len = 10);

struct SyntheticUtterance {
  std::vector<std::string> words;
  LogProbMatrix logprobs;
};

// Peaky CTC-like matrix rendering `words` over roughly `frames` frames.
SyntheticUtterance SyntheticSpeech(std::mt19937& rng, const Vocabulary& vocab,
                                   const std::vector<std::string>& words,
                                   std::size_t frames);

// Random sentence of vocabulary-segmentable words, some drawn from `planted`.
SyntheticUtterance SyntheticUtteranceFor(std::mt19937& rng,
                                         const Vocabulary& vocab,
                                         const std::vector<std::string>& planted,
                                         std::size_t frames);

std::vector<BiasingEntry> TokenizeEntries(const std::vector<std::string>& words,
                                          const Vocabulary& vocab);

}  // namespace ctcws::fixtures
