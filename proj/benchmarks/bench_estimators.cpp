#include <benchmark/benchmark.h>

#include "kdebench/dm_kde.hpp"
#include "kdebench/exact_kde.hpp"
#include "kdebench/spatial_tree.hpp"
#include "kdebench/synthetic.hpp"

using namespace kdebench;

namespace {

const SyntheticSpec& mixture_spec() {
  static const SyntheticSpec spec = make_spec("mixture2d");
  return spec;
}

PointSet queries(std::int64_t m) { return sample_dataset(mixture_spec(), m, 99); }

}  // namespace

static void BM_ExactPredict(benchmark::State& state) {
  const PointSet X = sample_dataset(mixture_spec(), state.range(0), 1);
  const PointSet Q = queries(1000);
  const ExactKdeModel model = fit_exact(X, Bandwidth(1.0, 2));
  for (auto _ : state) {
    Vector out = estimate_exact_batch(model, Q, ExactStrategy::kVectorized, 1);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ExactPredict)->RangeMultiplier(10)->Range(100, 100000)->Complexity();

static void BM_TreePredict(benchmark::State& state) {
  const PointSet X = sample_dataset(mixture_spec(), state.range(0), 1);
  const PointSet Q = queries(1000);
  const SpatialTree tree = build_kd_tree(X, 40, Bandwidth(1.0, 2));
  for (auto _ : state) {
    Vector out = estimate_tree_batch(tree, Q, 0.0, 1e-8, 1);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TreePredict)->RangeMultiplier(10)->Range(100, 100000)->Complexity();

static void BM_DmkdePredict(benchmark::State& state) {
  const PointSet X = sample_dataset(mixture_spec(), state.range(0), 1);
  const PointSet Q = queries(1000);
  const RffMap map = sample_rff_map(2, 500, 1.0, 7);
  const DensityMatrixModel model = fit_dmkde(X, map, 2);
  for (auto _ : state) {
    Vector out = estimate_dm_batch(model, Q, 1);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DmkdePredict)->RangeMultiplier(10)->Range(100, 100000)->Complexity();

static void BM_DmkdeLowrankPredict(benchmark::State& state) {
  const PointSet X = sample_dataset(mixture_spec(), 100000, 1);
  const PointSet Q = queries(1000);
  const RffMap map = sample_rff_map(2, 500, 1.0, 7);
  const DensityMatrixModel model = factorize(fit_dmkde(X, map, 2), kAutoRank);
  for (auto _ : state) {
    Vector out = estimate_dm_lowrank_batch(model, Q, 1);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_DmkdeLowrankPredict);

static void BM_TreeBuild(benchmark::State& state) {
  const PointSet X = sample_dataset(mixture_spec(), state.range(0), 1);
  for (auto _ : state) {
    SpatialTree tree = build_kd_tree(X, 40, Bandwidth(1.0, 2));
    benchmark::DoNotOptimize(tree.nodes.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TreeBuild)->RangeMultiplier(10)->Range(1000, 100000)->Complexity();

BENCHMARK_MAIN();
