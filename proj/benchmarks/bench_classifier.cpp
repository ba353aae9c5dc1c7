#include <benchmark/benchmark.h>

#include <set>

#include "cxgdial/classify.hpp"
#include "cxgdial/rng.hpp"

using namespace cxgdial;

namespace {

FeatureMatrix synthetic_counts(size_t rows_per_region, size_t n_features) {
  Rng rng(777);
  FeatureMatrix m;
  m.regions = {"A", "B", "C", "D"};
  m.n_features = n_features;
  for (size_t r = 0; r < 4; ++r) {
    for (size_t i = 0; i < rows_per_region; ++i) {
      m.sample_ids.push_back(m.regions[r] + "_" + std::to_string(i));
      m.labels.push_back(m.regions[r]);
      for (size_t j = 0; j < n_features; ++j) {
        double boost = (j % 4 == r) ? 2.0 : 0.0;
        m.x.push_back(static_cast<double>(rng.index(4)) + boost);
      }
    }
  }
  return m;
}

void BM_TrainLinearSvm(benchmark::State& state) {
  auto m = synthetic_counts(static_cast<size_t>(state.range(0)), 200);
  for (auto _ : state) {
    auto model = train_linear_svm(m, 1.0, 9);
    benchmark::DoNotOptimize(model);
  }
}
BENCHMARK(BM_TrainLinearSvm)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_CrossValidate(benchmark::State& state) {
  auto m = synthetic_counts(100, 200);
  auto plan = make_folds(m.sample_ids, m.labels, 10, 4);
  for (auto _ : state) {
    auto report = cross_validate(m, plan, 1.0, Normalization::kL2);
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_CrossValidate)->Unit(benchmark::kMillisecond);

void BM_Vectorize(benchmark::State& state) {
  // vectorize throughput on pre-annotated tokens is dominated by scan();
  // measured separately in bench_matcher. Here: normalization cost.
  auto m = synthetic_counts(200, 500);
  for (auto _ : state) {
    auto view = normalized_view(m, Normalization::kL2);
    benchmark::DoNotOptimize(view);
  }
}
BENCHMARK(BM_Vectorize);

}  // namespace

BENCHMARK_MAIN();
