// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

// Serial reference vs OpenMP kernels over a synthetic corpus.
// Run with --benchmark_filter=... to pick a kernel; the thread count for the
// parallel variants is the benchmark argument.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "gmner/batch.hpp"

using namespace gmner;

namespace {

const std::vector<std::string> kWords = {"Kevin", "Durant", "Golden", "State", "Warriors", "New",
                                         "York", "Spurs",  "Tony",   "Parker", "Paris",    "Lakers"};

struct Corpus {
  std::vector<GmnerSample> samples;
  std::vector<CompletionGroup> groups;
  std::vector<SamplePrediction> predictions;
};

std::vector<EntityTriple> random_triples(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(0, 5), len(1, 3), word(0, int(kWords.size()) - 1), kind(0, 3);
  std::uniform_real_distribution<double> c(0, 400);
  std::vector<EntityTriple> out(static_cast<std::size_t>(count(rng)));
  for (auto& t : out) {
    const int n = len(rng);
    for (int i = 0; i < n; ++i) t.entity += (i ? " " : "") + kWords[static_cast<std::size_t>(word(rng))];
    t.etype = EntityType(static_cast<EntityType::Kind>(kind(rng)));
    if (rng() % 3) {
      const double x = c(rng), y = c(rng);
      t.loc = BBox{x, y, x + 1 + c(rng), y + 1 + c(rng)};
    }
  }
  return out;
}

const Corpus& corpus() {
  static const Corpus c = [] {
    std::mt19937_64 rng(2026);
    Corpus out;
    for (int i = 0; i < 2000; ++i) {
      GmnerSample s;
      s.id = "b" + std::to_string(i);
      s.sentence = "synthetic sentence";
      s.image_width = 800;
      s.image_height = 800;
      s.gold = random_triples(rng);
      CompletionGroup g{s.id, {}};
      for (int k = 0; k < 8; ++k) g.completions.push_back(wrap_in_answer(serialize_answer(random_triples(rng))));
      out.groups.push_back(std::move(g));
      out.predictions.push_back({s.id, random_triples(rng)});
      out.samples.push_back(std::move(s));
    }
    return out;
  }();
  return c;
}

void BM_ScoreGroupsSerial(benchmark::State& state) {
  const auto& c = corpus();
  const SampleIndex index(c.samples);
  for (auto _ : state) {
    benchmark::DoNotOptimize(serial::score_groups(c.groups, index, ReasoningStyle::Formal, RewardConfig{}));
  }
}

void BM_ScoreGroupsParallel(benchmark::State& state) {
  const auto& c = corpus();
  const SampleIndex index(c.samples);
  set_thread_count(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_groups(c.groups, index, ReasoningStyle::Formal, RewardConfig{}));
  }
}

void BM_EvaluateSerial(benchmark::State& state) {
  const auto& c = corpus();
  for (auto _ : state) benchmark::DoNotOptimize(serial::evaluate_all(c.predictions, c.samples, TaskMode::GMNER));
}

void BM_EvaluateParallel(benchmark::State& state) {
  const auto& c = corpus();
  set_thread_count(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_all(c.predictions, c.samples, TaskMode::GMNER));
}

void BM_MatchEntities(benchmark::State& state) {
  std::mt19937_64 rng(9);
  std::vector<std::pair<std::vector<EntityTriple>, std::vector<EntityTriple>>> cases;
  for (int i = 0; i < 256; ++i) cases.emplace_back(random_triples(rng), random_triples(rng));
  for (auto _ : state) {
    for (const auto& [p, g] : cases) benchmark::DoNotOptimize(match_entities(p, g));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cases.size()));
}

}  // namespace

BENCHMARK(BM_ScoreGroupsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreGroupsParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EvaluateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MatchEntities)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
