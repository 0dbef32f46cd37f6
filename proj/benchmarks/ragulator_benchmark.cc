#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "ragulator/datagen/simulate.h"
#include "ragulator/ensemble/train.h"
#include "ragulator/eval/metrics.h"
#include "ragulator/features/featurize.h"
#include "ragulator/features/providers.h"
#include "ragulator/window/tokenizer.h"
#include "ragulator/window/windows.h"
#include "testing/fixture.h"

namespace ragulator {
namespace {

const std::vector<datagen::SentenceContextPair>& Pairs() {
  static const auto* pairs = [] {
    const auto corpus = testing_util::MakeSeparableCorpus();
    auto sim = datagen::SimulateFromSummaries(corpus, 11, 0.5);
    return new std::vector<datagen::SentenceContextPair>(std::move(sim->pairs));
  }();
  return *pairs;
}

const std::vector<ensemble::TrainingRow>& Rows() {
  static const auto* rows = [] {
    features::HashedEmbeddingProvider embed;
    features::OverlapRerankerProvider rerank;
    auto featurized = features::FeaturizeAll(Pairs(), embed, rerank);
    return new std::vector<ensemble::TrainingRow>(ensemble::ToTrainingRows(*featurized));
  }();
  return *rows;
}

void BM_FeaturizePair(benchmark::State& state) {
  features::HashedEmbeddingProvider embed;
  features::OverlapRerankerProvider rerank;
  const auto& pairs = Pairs();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(features::Featurize(pairs[i++ % pairs.size()], embed, rerank));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FeaturizePair);

void BM_BuildWindows(benchmark::State& state) {
  window::WhitespaceTokenizer tokenizer;
  const auto& pairs = Pairs();
  const int limit = static_cast<int>(state.range(0));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(window::BuildWindows(pairs[i++ % pairs.size()], tokenizer, limit));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BuildWindows)->Arg(64)->Arg(512);

void BM_TrainRandomForest(benchmark::State& state) {
  ensemble::Hyperparams params;
  params.max_depth = 3;
  params.n_estimators = static_cast<int>(state.range(0));
  const auto& rows = Rows();
  for (auto _ : state) {
    benchmark::DoNotOptimize(ensemble::TrainRandomForest(rows, params, 1, 1));
  }
}
BENCHMARK(BM_TrainRandomForest)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_RandomForestPredict(benchmark::State& state) {
  ensemble::Hyperparams params;
  params.max_depth = 5;
  params.n_estimators = static_cast<int>(state.range(0));
  const auto model = ensemble::TrainRandomForest(Rows(), params, 1, 1);
  const auto& rows = Rows();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model->PredictUnchecked(rows[i++ % rows.size()].x));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RandomForestPredict)->Arg(100)->Arg(1000);

void BM_Auroc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> scores(n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = u(rng);
    labels[i] = static_cast<int>(i % 2);
  }
  for (auto _ : state) benchmark::DoNotOptimize(eval::Auroc(scores, labels));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}
BENCHMARK(BM_Auroc)->Arg(1000)->Arg(100000);

}  // namespace
}  // namespace ragulator

BENCHMARK_MAIN();
