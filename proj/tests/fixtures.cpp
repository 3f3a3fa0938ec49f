#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace ctcws::fixtures {

MatrixBuilder& MatrixBuilder::frame(
    const std::vector<std::pair<TokenId, double>>& probs) {
  std::vector<double> row(vocab_size_, -1.0);
  double assigned = 0.0;
  for (const auto& [tok, p] : probs) {
    row.at(static_cast<std::size_t>(tok)) = p;
    assigned += p;
  }
  const std::size_t rest = vocab_size_ - probs.size();
  if (assigned > 1.0 + 1e-12 || (rest > 0 && assigned >= 1.0)) {
    throw std::invalid_argument("frame probabilities leave no remainder");
  }
  const double fill = rest ? (1.0 - assigned) / static_cast<double>(rest) : 0.0;
  for (double& p : row) {
    if (p < 0.0) p = fill;
  }
  // Renormalize in double, then store as float.
  double total = 0.0;
  for (double p : row) total += p;
  for (double p : row) rows_.push_back(static_cast<float>(std::log(p / total)));
  return *this;
}

MatrixBuilder& MatrixBuilder::repeat(
    const std::vector<std::pair<TokenId, double>>& probs, int count) {
  for (int i = 0; i < count; ++i) frame(probs);
  return *this;
}

MatrixBuilder& MatrixBuilder::raw(std::vector<float> logprobs) {
  if (logprobs.size() != vocab_size_) throw std::invalid_argument("row size");
  rows_.insert(rows_.end(), logprobs.begin(), logprobs.end());
  return *this;
}

LogProbMatrix MatrixBuilder::build(bool normalized) const {
  return LogProbMatrix(frames(), vocab_size_, rows_, normalized);
}

LogProbMatrix RandomMatrix(std::mt19937& rng, std::size_t frames,
                           std::size_t vocab_size, double peakiness) {
  std::gamma_distribution<double> gamma(1.0 / peakiness, 1.0);
  std::vector<float> values;
  values.reserve(frames * vocab_size);
  for (std::size_t t = 0; t < frames; ++t) {
    std::vector<double> w(vocab_size);
    double total = 0.0;
    for (double& x : w) {
      x = gamma(rng) + 1e-9;
      total += x;
    }
    for (double x : w) values.push_back(static_cast<float>(std::log(x / total)));
  }
  // Re-check normalization after float rounding; never fails for these sizes.
  return LogProbMatrix(frames, vocab_size, std::move(values), true);
}

LogProbMatrix OneHotMatrix(const std::vector<TokenId>& path,
                           std::size_t vocab_size, double margin) {
  std::vector<float> values(path.size() * vocab_size,
                            static_cast<float>(-margin));
  for (std::size_t t = 0; t < path.size(); ++t) {
    values[t * vocab_size + static_cast<std::size_t>(path[t])] = 0.0f;
  }
  return LogProbMatrix(path.size(), vocab_size, std::move(values), false);
}

Vocabulary ScenarioVocab() {
  const std::string m(kDefaultBoundaryMarker);
  std::vector<std::string> tokens = {
      m + "the", m + "new", m + "is", m + "fast", m + "g",  m + "p",
      m + "u",   "p",       "u",      m + "cl",   "ou",     "d",
      m + "c",   "da",      m + "runs", m + "on", m + "in", "vid",
      "ia",      m + "n",   m + "it", m + "a",    "e",      "o",
      "<blank>"};
  return Vocabulary(std::move(tokens));
}

TokenId Tok(const Vocabulary& vocab, const std::string& token) {
  const auto id = vocab.find(token);
  if (!id) throw std::invalid_argument("no token " + token);
  return *id;
}

namespace {

std::string W(const std::string& s) {
  return std::string(kDefaultBoundaryMarker) + s;
}

}  // namespace

Scenario GpuScenario() {
  Scenario s{ScenarioVocab(), {}, {"gpu"}, "the new gpu is fast", std::nullopt};
  const auto& v = s.vocab;
  const TokenId b = v.blank_id();
  MatrixBuilder mb(v.size());
  mb.repeat({{b, 0.95}}, 3)
      .repeat({{Tok(v, W("the")), 0.9}}, 3)
      .repeat({{b, 0.95}}, 2)
      .repeat({{Tok(v, W("new")), 0.9}}, 3)
      .repeat({{b, 0.95}}, 2)
      .repeat({{Tok(v, W("g")), 0.6}, {b, 0.3}}, 2)
      .repeat({{b, 0.9}}, 1)
      .repeat({{Tok(v, W("p")), 0.5}, {Tok(v, "p"), 0.4}}, 2)
      .repeat({{b, 0.9}}, 1)
      .repeat({{Tok(v, W("u")), 0.5}, {Tok(v, "u"), 0.4}}, 2)
      .repeat({{b, 0.95}}, 3)
      .repeat({{Tok(v, W("is")), 0.9}}, 3)
      .repeat({{b, 0.95}}, 2)
      .repeat({{Tok(v, W("fast")), 0.9}}, 4)
      .repeat({{b, 0.95}}, 7);
  s.logprobs = mb.build();
  return s;
}

Scenario CloudScenario() {
  Scenario s{ScenarioVocab(), {}, {"cuda"}, "it runs on cloud", std::nullopt};
  const auto& v = s.vocab;
  const TokenId b = v.blank_id();
  MatrixBuilder mb(v.size());
  mb.repeat({{b, 0.95}}, 2)
      .repeat({{Tok(v, W("it")), 0.9}}, 2)
      .repeat({{b, 0.95}}, 1)
      .repeat({{Tok(v, W("runs")), 0.9}}, 2)
      .repeat({{b, 0.95}}, 1)
      .repeat({{Tok(v, W("on")), 0.9}}, 2)
      .repeat({{b, 0.95}}, 1)
      .repeat({{Tok(v, W("cl")), 0.85}, {Tok(v, W("c")), 0.03}}, 2)
      .repeat({{b, 0.9}}, 1)
      .repeat({{Tok(v, "ou"), 0.85}, {Tok(v, "u"), 0.03}}, 2)
      .repeat({{Tok(v, "d"), 0.85}, {Tok(v, "da"), 0.03}}, 2)
      .repeat({{b, 0.95}}, 4);
  s.logprobs = mb.build();
  return s;
}

Scenario NvidiaTransducerScenario() {
  Scenario s{ScenarioVocab(), {}, {"nvidia"}, "it nvidia is", std::nullopt};
  const auto& v = s.vocab;
  const TokenId b = v.blank_id();
  MatrixBuilder mb(v.size());
  mb.repeat({{b, 0.95}}, 2)
      .repeat({{Tok(v, W("it")), 0.9}}, 2)
      .repeat({{b, 0.95}}, 1)
      .repeat({{Tok(v, W("in")), 0.5}, {Tok(v, W("n")), 0.4}}, 2)
      .repeat({{b, 0.9}}, 1)
      .repeat({{Tok(v, "vid"), 0.9}}, 2)
      .repeat({{Tok(v, "ia"), 0.9}}, 2)
      .repeat({{b, 0.95}}, 2)
      .repeat({{Tok(v, W("is")), 0.9}}, 2)
      .repeat({{b, 0.95}}, 2);
  s.logprobs = mb.build();
  WordAlignment t;
  t.frames = s.logprobs.frames();
  t.words = {{"it", 2, 3, -0.1}, {"invidia", 5, 11, -1.0}, {"is", 14, 15, -0.1}};
  s.transducer = t;
  return s;
}

std::vector<Scenario> SweepSuite() {
  // In-word piece probability for planted "gpu" (>= 0.5 decodes correctly).
  const std::vector<double> gpu_strength = {0.62, 0.55, 0.40, 0.30, 0.20,
                                            0.12, 0.07, 0.04, 0.025, 0.015};
  // "cuda" piece probability inside a confidently decoded "cloud".
  const std::vector<double> decoy_strength = {0.022, 0.017, 0.013, 0.010, 0.008,
                                              0.006, 0.004, 0.003, 0.002, 0.001};
  const std::vector<std::pair<std::string, std::string>> fillers = {
      {"the", "is"}, {"new", "fast"}, {"it", "runs"}, {"on", "the"},
      {"runs", "new"}};
  std::vector<Scenario> suite;
  const Vocabulary vocab = ScenarioVocab();
  const TokenId b = vocab.blank_id();
  for (std::size_t i = 0; i < gpu_strength.size() + decoy_strength.size(); ++i) {
    const bool planted = i % 2 == 0;
    const double q = planted ? gpu_strength[i / 2] : decoy_strength[i / 2];
    const auto& [left, right] = fillers[i % fillers.size()];
    MatrixBuilder mb(vocab.size());
    mb.repeat({{b, 0.95}}, 3)
        .repeat({{Tok(vocab, W(left)), 0.9}}, 2)
        .repeat({{b, 0.95}}, 2);
    std::string middle;
    if (planted) {
      mb.repeat({{Tok(vocab, W("g")), 0.6}, {b, 0.3}}, 2)
          .repeat({{b, 0.9}}, 1)
          .repeat({{Tok(vocab, W("p")), 0.9 - q}, {Tok(vocab, "p"), q}}, 2)
          .repeat({{b, 0.9}}, 1)
          .repeat({{Tok(vocab, W("u")), 0.9 - q}, {Tok(vocab, "u"), q}}, 2);
      middle = "gpu";
    } else {
      mb.repeat({{Tok(vocab, W("cl")), 0.9 - q}, {Tok(vocab, W("c")), q}}, 2)
          .repeat({{b, 0.9}}, 1)
          .repeat({{Tok(vocab, "ou"), 0.9 - q}, {Tok(vocab, "u"), q}}, 2)
          .repeat({{Tok(vocab, "d"), 0.9 - q}, {Tok(vocab, "da"), q}}, 2);
      middle = "cloud";
    }
    mb.repeat({{b, 0.95}}, 2)
        .repeat({{Tok(vocab, W(right)), 0.9}}, 2)
        .repeat({{b, 0.95}}, 3);
    suite.push_back({vocab, mb.build(), {"gpu", "cuda"},
                     left + " " + middle + " " + right, std::nullopt});
  }
  return suite;
}

Vocabulary SyntheticVocab(std::uint32_t seed, std::size_t size) {
  std::vector<std::string> tokens;
  std::set<std::string> seen;
  auto add = [&](std::string t) {
    if (seen.insert(t).second) tokens.push_back(std::move(t));
  };
  for (char c = 'a'; c <= 'z'; ++c) add(std::string(1, c));
  for (char c = 'a'; c <= 'z'; ++c) add(W(std::string(1, c)));
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> letter(0, 25);
  std::uniform_int_distribution<int> len(2, 4);
  std::bernoulli_distribution marked(0.5);
  while (tokens.size() + 1 < size) {
    std::string piece;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) piece.push_back(static_cast<char>('a' + letter(rng)));
    add(marked(rng) ? W(piece) : piece);
  }
  tokens.push_back("<blank>");
  return Vocabulary(std::move(tokens));
}

std::string RandomWord(std::mt19937& rng, int min_len, int max_len) {
  std::uniform_int_distribution<int> len(min_len, max_len);
  std::uniform_int_distribution<int> letter(0, 25);
  std::string w;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) w.push_back(static_cast<char>('a' + letter(rng)));
  return w;
}

namespace {

void PushRow(std::vector<float>& out, std::size_t vocab_size,
             const std::vector<std::pair<TokenId, double>>& probs) {
  double assigned = 0.0;
  for (const auto& pr : probs) assigned += pr.second;
  const double fill =
      (1.0 - assigned) / static_cast<double>(vocab_size - probs.size());
  const std::size_t base = out.size();
  out.resize(base + vocab_size, static_cast<float>(std::log(fill)));
  for (const auto& [tok, p] : probs) {
    out[base + static_cast<std::size_t>(tok)] = static_cast<float>(std::log(p));
  }
}

}  // namespace

SyntheticUtterance SyntheticSpeech(std::mt19937& rng, const Vocabulary& vocab,
                                   const std::vector<std::string>& words,
                                   std::size_t frames) {
  const std::size_t V = vocab.size();
  const TokenId blank = vocab.blank_id();
  std::uniform_real_distribution<double> top(0.55, 0.93);
  std::uniform_real_distribution<double> blank_p(0.85, 0.97);
  std::uniform_int_distribution<int> dur(1, 3);
  std::uniform_int_distribution<int> gap(1, 3);
  std::uniform_int_distribution<TokenId> any(0, static_cast<TokenId>(V) - 2);
  std::vector<float> values;
  auto blank_frames = [&](int n) {
    for (int i = 0; i < n; ++i) {
      const double pb = blank_p(rng);
      PushRow(values, V, {{blank, pb}, {any(rng), (1.0 - pb) * 0.5}});
    }
  };
  blank_frames(gap(rng));
  for (const auto& w : words) {
    const auto toks = Tokenize(w, vocab);
    for (std::size_t k = 0; k < toks.size(); ++k) {
      const int d = dur(rng);
      const double p = top(rng);
      TokenId confuser = any(rng);
      while (confuser == toks[k]) confuser = any(rng);
      for (int i = 0; i < d; ++i) {
        PushRow(values, V, {{toks[k], p}, {confuser, (1.0 - p) * 0.5},
                            {blank, (1.0 - p) * 0.3}});
      }
      if (k + 1 < toks.size() && toks[k + 1] == toks[k]) blank_frames(1);
    }
    blank_frames(gap(rng));
  }
  while (values.size() / V < frames) blank_frames(1);
  const std::size_t t = values.size() / V;
  return {words, LogProbMatrix(t, V, std::move(values), true)};
}

SyntheticUtterance SyntheticUtteranceFor(std::mt19937& rng,
                                         const Vocabulary& vocab,
                                         const std::vector<std::string>& planted,
                                         std::size_t frames) {
  std::vector<std::string> words;
  std::bernoulli_distribution pick_planted(0.15);
  // About 9 frames per word on average; stop a little short and pad.
  const std::size_t budget = frames > 12 ? (frames - 12) / 9 : 0;
  for (std::size_t i = 0; i < budget; ++i) {
    if (!planted.empty() && pick_planted(rng)) {
      std::uniform_int_distribution<std::size_t> which(0, planted.size() - 1);
      words.push_back(planted[which(rng)]);
    } else {
      words.push_back(RandomWord(rng, 2, 7));
    }
  }
  auto utt = SyntheticSpeech(rng, vocab, words, frames);
  if (utt.logprobs.frames() > frames) {
    // Trim to the requested length at a frame boundary.
    std::vector<float> v(utt.logprobs.values().begin(),
                         utt.logprobs.values().begin() +
                             static_cast<std::ptrdiff_t>(frames * vocab.size()));
    utt.logprobs = LogProbMatrix(frames, vocab.size(), std::move(v), true);
  }
  return utt;
}

std::vector<BiasingEntry> TokenizeEntries(const std::vector<std::string>& words,
                                          const Vocabulary& vocab) {
  std::vector<BiasingEntry> entries;
  for (const auto& w : words) entries.push_back({w, {Tokenize(w, vocab)}});
  return entries;
}

}  // namespace ctcws::fixtures
