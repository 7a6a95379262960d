#include <algorithm>
#include <cmath>

#include "bspn/bottomup.hpp"
#include "bspn/chain.hpp"
#include "bspn/diagnostics.hpp"
#include "bspn/errors.hpp"
#include "bspn/inference.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace bspn;

namespace {

std::vector<double> ar1(std::size_t n, double phi, Rng& rng) {
  std::normal_distribution<double> e(0.0, 1.0);
  std::vector<double> out(n);
  double v = e(rng) / std::sqrt(1 - phi * phi);
  for (auto& o : out) {
    v = phi * v + e(rng);
    o = v;
  }
  return out;
}

}  // namespace

TEST_CASE("ESS of independent draws") {
  double total = 0.0;
  const int reps = 400;
  for (int seed = 0; seed < reps; ++seed) {
    Rng rng = make_rng(static_cast<std::uint64_t>(seed), 1);
    const auto t = ar1(50, 0.0, rng);
    const auto r = effective_sample_size(t);
    CHECK(r.ess > 0.0);
    CHECK(r.ess <= 50.0);
    total += r.ess;
  }
  const double mean = total / reps;
  CHECK(mean >= 35.0);
  CHECK(mean <= 65.0);
}

TEST_CASE("ESS of an AR(1) chain") {
  Rng rng = make_rng(4);
  const std::size_t n = 200000;
  const auto r = effective_sample_size(ar1(n, 0.9, rng));
  const double target = 0.1 / 1.9;
  CHECK(std::abs(r.ess / static_cast<double>(n) - target) < 0.2 * target);
  CHECK_FALSE(r.negative_correlation);
  CHECK(r.lags > 10);
}

TEST_CASE("ESS edge cases") {
  std::vector<double> alt(50);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 ? -1.0 : 1.0;
  const auto a = effective_sample_size(alt);
  CHECK(a.ess == 50.0);
  CHECK(a.negative_correlation);

  const std::vector<double> flat(20, 3.0);
  const auto f = effective_sample_size(flat);
  CHECK(f.degenerate);
  CHECK(f.ess == 20.0);

  CHECK_THROWS_AS(effective_sample_size(std::vector<double>{1, 2, 3}), ConfigError);
}

TEST_CASE("ESS is affine invariant") {
  Rng rng = make_rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    const auto t = ar1(300, 0.6, rng);
    std::vector<double> u(t.size());
    std::transform(t.begin(), t.end(), u.begin(), [](double v) { return -3.5 * v + 120.0; });
    CHECK(effective_sample_size(u).ess == doctest::Approx(effective_sample_size(t).ess).epsilon(1e-9));
  }
}

TEST_CASE("timing harness") {
  const Model m = Model::with_defaults(build_balanced(3, 2, 2));
  const DataMatrix x = fixture::gaussian_clusters(40, 3, 2, 1);
  Rng rng = make_rng(1);
  BottomUpSampler bu(LatentState::random(m, x, rng));
  const auto rep = timing_harness(bu, rng, 5);
  CHECK(rep.seconds.size() == 5);
  CHECK(rep.points == 40);
  for (auto t : rep.touches) CHECK(t == 40 * m.graph.node_count());
  CHECK(rep.touches_per_point() == doctest::Approx(static_cast<double>(m.graph.node_count())));
  double mean = 0.0;
  for (double s : rep.seconds) mean += s / 5;
  CHECK(rep.mean == doctest::Approx(mean));
  CHECK(rep.stddev >= 0.0);

  TimingReport slow, fast;
  slow.mean = 3.0;
  fast.mean = 0.5;
  CHECK(speedup(slow, fast) == doctest::Approx(6.0));
}

TEST_CASE("trace statistics") {
  const Model m = fixture::toy_model();
  const DataMatrix x = fixture::toy_data();
  const DataMatrix held(2, 2, {0.5, -0.5, -1.0, 1.0});
  RunConfig cfg;
  cfg.iterations = 12;
  cfg.seed = 4;
  const auto res = run(SamplerKind::TopDown, m, x, cfg);
  const auto joint = trace_statistic(TraceStatistic::TrainJointLL, m, x, res.samples);
  REQUIRE(joint.size() == res.samples.size());
  for (std::size_t k = 0; k < joint.size(); ++k) {
    CHECK(joint[k] == doctest::Approx(res.trace[k].log_joint).epsilon(1e-12));
    CHECK(joint[k] == LatentState::from_assignments(m, x, res.samples[k].z).log_joint());
  }
  const auto a = trace_statistic(TraceStatistic::HeldoutLL, m, x, res.samples, &held, 9);
  const auto b = trace_statistic(TraceStatistic::HeldoutLL, m, x, res.samples, &held, 9);
  CHECK(a == b);
  const auto ll = test_log_likelihood(m, x, res.samples, held, 9);
  REQUIRE(a.size() == ll.per_sample.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == doctest::Approx(ll.per_sample[k]).epsilon(1e-14));
  CHECK_THROWS_AS(trace_statistic(TraceStatistic::HeldoutLL, m, x, res.samples, nullptr, 9), ConfigError);
}
