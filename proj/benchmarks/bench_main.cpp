#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "fewshot/adaptation.hpp"
#include "fewshot/evaluation.hpp"
#include "fewshot/kernel_svm.hpp"
#include "fewshot/synth_bench.hpp"

using namespace fewshot;

namespace {

std::vector<LabeledSample> blobs(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<LabeledSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = i % 2 ? 1 : -1;
    std::vector<double> x(d);
    for (auto& v : x) v = normal(rng) + 0.4 * y;
    out.push_back({std::move(x), y});
  }
  return out;
}

void BM_TrainLinear(benchmark::State& state) {
  const auto samples = blobs(static_cast<std::size_t>(state.range(0)), 32, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_svm(samples));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TrainLinear)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

void BM_TrainGaussian(benchmark::State& state) {
  const auto samples = blobs(static_cast<std::size_t>(state.range(0)), 32, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_svm(samples, {}, KernelSpec::gaussian(1.0 / 32)));
  }
}
BENCHMARK(BM_TrainGaussian)->RangeMultiplier(2)->Range(64, 512);

void BM_AveragePrecision(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  RankedResult r;
  for (int64_t i = 0; i < state.range(0); ++i) {
    r.scores.push_back(normal(rng));
    r.relevance.push_back(i % 10 == 0 ? 1 : 0);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(average_precision(r));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AveragePrecision)->Range(1 << 10, 1 << 18);

void BM_GramMatrix(benchmark::State& state) {
  const auto samples = blobs(static_cast<std::size_t>(state.range(0)), 64, 4);
  std::vector<std::vector<double>> points;
  for (const auto& s : samples) points.push_back(s.features);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gram_matrix(KernelSpec::gaussian(0.1), points));
  }
}
BENCHMARK(BM_GramMatrix)->Range(64, 1024);

void BM_DefaultSweepOneReplicate(benchmark::State& state) {
  const auto world = generate_world(SyntheticWorldSpec{});
  const std::vector<std::size_t> ns{1, 5, 100};
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_sweep(world, ns, 1));
  }
}
BENCHMARK(BM_DefaultSweepOneReplicate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
