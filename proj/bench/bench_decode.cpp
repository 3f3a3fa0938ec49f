// Batch decode throughput: serial reference against the parallel path, and
// spotting cost as the biasing list grows.

#include <random>
#include <string>
#include <vector>

#include "benchmark/benchmark.h"
#include "ctcws/context_graph.hpp"
#include "ctcws/pipeline.hpp"
#include "ctcws/spotter.hpp"
#include "fixtures.hpp"

namespace {

using namespace ctcws;

struct Workload {
  Vocabulary vocab;
  ContextGraph graph;
  std::vector<Utterance> utts;
};

// `words` biasing entries, `count` utterances of about ten seconds.
Workload MakeWorkload(std::size_t words, std::size_t count) {
  Workload w{fixtures::SyntheticVocab(), {}, {}};
  std::mt19937 rng(3);
  std::vector<std::string> list;
  while (list.size() < words) list.push_back(fixtures::RandomWord(rng, 5, 12));
  w.graph = BuildGraph(fixtures::TokenizeEntries(list, w.vocab), w.vocab);
  for (std::size_t i = 0; i < count; ++i) {
    Utterance u;
    u.id = "utt" + std::to_string(i);
    u.logprobs = fixtures::SyntheticUtteranceFor(rng, w.vocab, list, 250).logprobs;
    w.utts.push_back(std::move(u));
  }
  return w;
}

const Workload& Batch() {
  static const Workload w = MakeWorkload(1000, 64);
  return w;
}

void BM_DecodeBatchSerial(benchmark::State& state) {
  const auto& w = Batch();
  for (auto _ : state) {
    auto r = DecodeBatchSerial(w.utts, w.vocab, w.graph, SpotterConfig{},
                               DecodeMode::kCtc);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.utts.size()));
}
BENCHMARK(BM_DecodeBatchSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_DecodeBatch(benchmark::State& state) {
  const auto& w = Batch();
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto r = DecodeBatch(w.utts, w.vocab, w.graph, SpotterConfig{}, DecodeMode::kCtc,
                         workers);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.utts.size()));
}
BENCHMARK(BM_DecodeBatch)->Arg(1)->Arg(2)->Arg(4)->Arg(8)
    ->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_SpotListSize(benchmark::State& state) {
  const auto w = MakeWorkload(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    auto c = Spot(w.utts[0].logprobs, w.graph, w.vocab, SpotterConfig{});
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_SpotListSize)->Arg(10)->Arg(100)->Arg(1000)->Arg(5000)
    ->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
