#include <benchmark/benchmark.h>

#include <random>

#include "bspn/bottomup.hpp"
#include "bspn/evaluate.hpp"
#include "bspn/inference.hpp"
#include "bspn/topdown.hpp"
#include "bspn/tuning.hpp"

namespace {

using namespace bspn;

DataMatrix clusters(std::size_t n, std::size_t dims, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<double> centres(4 * dims);
  for (double& c : centres) c = 4.0 * unit(rng);
  DataMatrix x(n, dims);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < dims; ++d) x(i, d) = centres[(i % 4) * dims + d] + unit(rng);
  return x;
}

Model fitted(std::size_t dims, std::size_t cs, const DataMatrix& x) {
  Model m{build_balanced(dims, cs, 2), {}, 1.0};
  Rng rng = make_rng(3);
  m.leaf_hyper = assign_leaf_hyperparams(m.graph, x, SubsampleRatios::ones(dims), {}, rng);
  return m;
}

// Args: sum outdegree, number of points. D = 9 throughout.
template <class S>
void sweep(benchmark::State& st) {
  const auto cs = static_cast<std::size_t>(st.range(0));
  const auto n = static_cast<std::size_t>(st.range(1));
  const DataMatrix x = clusters(n, 9, 1);
  const Model m = fitted(9, cs, x);
  Rng rng = make_rng(2);
  S sampler(LatentState::random(m, x, rng));
  std::uint64_t touches = 0;
  for (auto _ : st) touches += sampler.sweep(rng).node_touches;
  st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * n));
  st.counters["touches/point"] =
      benchmark::Counter(static_cast<double>(touches) / static_cast<double>(st.iterations() * n));
}

void BM_TopDownSweep(benchmark::State& st) { sweep<TopDownSampler>(st); }
void BM_BottomUpSweep(benchmark::State& st) { sweep<BottomUpSampler>(st); }

BENCHMARK(BM_TopDownSweep)->Args({2, 1000})->Args({4, 1000})->Args({8, 200})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BottomUpSweep)->Args({2, 1000})->Args({4, 1000})->Args({8, 200})->Unit(benchmark::kMillisecond);

void BM_EvalLogDensity(benchmark::State& st) {
  const auto cs = static_cast<std::size_t>(st.range(0));
  const DataMatrix x = clusters(200, 9, 4);
  const Model m = fitted(9, cs, x);
  Rng rng = make_rng(5);
  const auto state = LatentState::random(m, x, rng);
  const auto params = materialize(state, rng);
  std::size_t row = 0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(eval_log_density(m.graph, params, x.row(row)));
    row = (row + 1) % x.rows();
  }
  st.counters["nodes"] = static_cast<double>(m.graph.node_count());
}
BENCHMARK(BM_EvalLogDensity)->Arg(2)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
