#include "ctcws/merge.hpp"

#include <random>

#include "ctcws/pipeline.hpp"
#include "fixtures.hpp"
#include "gtest/gtest.h"
#include "oracle.hpp"

namespace ctcws {
namespace {

WordAlignment Ali(std::vector<AlignedWord> words, std::size_t frames = 20) {
  WordAlignment a;
  a.words = std::move(words);
  a.frames = frames;
  return a;
}

TEST(MergeCtcTest, NoCandidatesIsIdentity) {
  const auto ali = Ali({{"it", 0, 1, -1.0}, {"runs", 3, 5, -2.0}});
  const auto r = MergeCtc(ali, {}, {});
  EXPECT_EQ(r.text, "it runs");
  EXPECT_TRUE(r.decisions.empty());
}

TEST(MergeCtcTest, CloudKeptOverCuda) {
  const auto ali = Ali({{"cloud", 2, 6, -4.0}});
  const auto r = MergeCtc(ali, {{0, "cuda", 2, 6, -6.0}}, {});
  EXPECT_EQ(r.text, "cloud");
  ASSERT_EQ(r.decisions.size(), 1u);
  EXPECT_FALSE(r.decisions[0].accepted);
  EXPECT_DOUBLE_EQ(r.decisions[0].greedy_score_sum, -4.0);
}

TEST(MergeCtcTest, SplitPiecesReplacedByWord) {
  const auto ali = Ali({{"the", 0, 0, -0.1}, {"g", 1, 2, -1.0}, {"p", 3, 4, -1.2},
                        {"u", 5, 6, -1.1}, {"is", 8, 9, -0.2}});
  const auto r = MergeCtc(ali, {{0, "gpu", 1, 6, -2.0}}, {});
  EXPECT_EQ(r.text, "the gpu is");
  ASSERT_EQ(r.decisions.size(), 1u);
  EXPECT_TRUE(r.decisions[0].accepted);
  EXPECT_EQ(r.decisions[0].overlapped_words.size(), 3u);
  EXPECT_NEAR(r.decisions[0].greedy_score_sum, -3.3, 1e-12);
  EXPECT_EQ(r.words.words.size(), 3u);
  EXPECT_DOUBLE_EQ(r.words.words[1].score, -2.0);
}

TEST(MergeCtcTest, EqualScoreIsRejected) {
  const auto r = MergeCtc(Ali({{"x", 0, 3, -2.0}}), {{0, "y", 0, 3, -2.0}}, {});
  EXPECT_FALSE(r.decisions[0].accepted);
}

TEST(MergeCtcTest, SilenceReferenceUsesBlankMass) {
  const Vocabulary v({"a", "<b>"});
  fixtures::MatrixBuilder mb(2);
  mb.repeat({{1, 0.9}}, 6);
  const auto m = mb.build();
  const BlankReference ref{&m, 1, 0.5};
  const double silence = 0.5 * 4 * static_cast<double>(m.at(0, 1));
  EXPECT_NEAR(ref.score(1, 4), silence, 1e-9);
  const auto ali = Ali({}, 6);
  auto r = MergeCtc(ali, {{0, "a", 1, 4, silence - 0.01}}, ref);
  EXPECT_FALSE(r.decisions[0].accepted);
  r = MergeCtc(ali, {{0, "a", 1, 4, silence + 0.01}}, ref);
  EXPECT_TRUE(r.decisions[0].accepted);
  EXPECT_EQ(r.text, "a");
}

TEST(MergeCtcTest, WordCountFormula) {
  std::mt19937 rng(12);
  std::uniform_int_distribution<int> len(1, 4);
  std::uniform_real_distribution<double> score(-6.0, 0.0);
  for (int trial = 0; trial < 200; ++trial) {
    // Non-overlapping greedy words and non-overlapping candidates on a line.
    std::vector<AlignedWord> words;
    int t = 0;
    while (t < 60) {
      const int s = t + len(rng) - 1;
      const int e = s + len(rng) - 1;
      words.push_back({"w" + std::to_string(words.size()), s, e, score(rng)});
      t = e + 1;
    }
    std::vector<SpottedCandidate> cands;
    t = 0;
    while (t < 60) {
      const int s = t + len(rng) * 2;
      const int e = s + len(rng) * 2;
      cands.push_back({0, "c", s, e, score(rng)});
      t = e + 1;
    }
    const auto ali = Ali(words, 80);
    const auto r = MergeCtc(ali, cands, {});
    std::size_t expected = words.size();
    for (const auto& d : r.decisions) {
      if (d.accepted) expected = expected + 1 - d.overlapped_words.size();
    }
    EXPECT_EQ(r.words.words.size(), expected);
    for (std::size_t i = 1; i < r.words.words.size(); ++i) {
      EXPECT_LT(r.words.words[i - 1].end_frame, r.words.words[i].start_frame);
    }
    // Merging the same candidates again changes nothing.
    const auto again = MergeCtc(r.words, cands, {});
    EXPECT_EQ(again.text, r.text);
  }
}

TEST(MergeTransducerTest, NoCandidatesIsIdentity) {
  const auto t = Ali({{"it", 0, 1, -1}, {"invidia", 3, 8, -1}});
  EXPECT_EQ(MergeTransducer(t, Ali({}), {}, {}).text, "it invidia");
}

TEST(MergeTransducerTest, CtcRejectionLeavesTransducerAlone) {
  const auto t = Ali({{"it", 0, 1, -1}, {"invidia", 3, 8, -1}});
  const auto c = Ali({{"in", 3, 4, -0.5}, {"video", 5, 8, -0.5}});
  const auto r = MergeTransducer(t, c, {{0, "nvidia", 3, 8, -1.5}}, {});
  EXPECT_FALSE(r.decisions[0].accepted);
  EXPECT_EQ(r.text, "it invidia");
}

TEST(MergeTransducerTest, AcceptedCandidateReplacesTransducerWord) {
  const auto s = fixtures::NvidiaTransducerScenario();
  const auto& v = s.vocab;
  const auto ctc = GreedyCtcAlign(s.logprobs, v, 0.5);
  const auto g = BuildGraph(fixtures::TokenizeEntries(s.context, v), v);
  const auto cands = FindBestHyps(Spot(s.logprobs, g, v, SpotterConfig{}));
  ASSERT_EQ(cands.size(), 1u);
  EXPECT_EQ(cands[0].word, "nvidia");
  // The spotted score is the best anchored path for the transcription.
  const auto want = oracle::BestPathScore(s.logprobs, cands[0].start_frame,
                                          cands[0].end_frame,
                                          Tokenize("nvidia", v), v.blank_id(), 3.0);
  ASSERT_TRUE(want);
  EXPECT_NEAR(cands[0].score, *want, 1e-5);
  const auto r = MergeTransducer(*s.transducer, ctc, cands,
                                 {&s.logprobs, v.blank_id(), 0.5});
  EXPECT_TRUE(r.decisions[0].accepted);
  EXPECT_EQ(r.text, "it nvidia is");
}

}  // namespace
}  // namespace ctcws
