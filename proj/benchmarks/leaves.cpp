#include <benchmark/benchmark.h>

#include "bspn/leaves.hpp"

namespace {

using namespace bspn;

void BM_GaussianPredictive(benchmark::State& st) {
  const Hyperparams h = GaussianPrior{0.0, 1.0, 2.0, 1.5};
  SuffStats s = SuffStats::empty(FamilySpec{Family::Gaussian, 0});
  for (int i = 0; i < 50; ++i) add_point(s, 0.1 * i);
  double x = 0.0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(log_predictive(h, s, x));
    x += 1e-3;
  }
}
BENCHMARK(BM_GaussianPredictive);

void BM_StatsAddRemove(benchmark::State& st) {
  SuffStats s = SuffStats::empty(FamilySpec{Family::Gaussian, 0});
  double x = 0.5;
  for (auto _ : st) {
    add_point(s, x);
    remove_point(s, x);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_StatsAddRemove);

}  // namespace
