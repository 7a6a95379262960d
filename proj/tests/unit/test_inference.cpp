#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "bspn/chain.hpp"
#include "bspn/errors.hpp"
#include "bspn/evaluate.hpp"
#include "bspn/inference.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace bspn;

namespace {

std::vector<StoredSample> short_chain(const Model& m, const DataMatrix& x, std::uint64_t seed) {
  RunConfig cfg;
  cfg.iterations = 20;
  cfg.burn_in = 5;
  cfg.thin = 3;
  cfg.seed = seed;
  return run(SamplerKind::TopDown, m, x, cfg).samples;
}

}  // namespace

TEST_CASE("materialized weights lie on the simplex and are reproducible") {
  const Model m = fixture::toy_model();
  const DataMatrix x = fixture::toy_data();
  const auto samples = short_chain(m, x, 3);
  Rng a = make_rng(5), b = make_rng(5);
  const auto pa = materialize(m, x, samples[0].z, a);
  const auto pb = materialize(m, x, samples[0].z, b);
  CHECK(pa.weights == pb.weights);
  for (std::uint32_t s = 0; s < m.graph.sum_count(); ++s) {
    double t = 0.0;
    for (double w : pa.weights_of(s)) {
      CHECK(w >= 0.0);
      t += w;
    }
    CHECK(std::abs(t - 1.0) <= 1e-12);
  }
}

TEST_CASE("test likelihood aggregation") {
  const Model m = fixture::toy_model();
  const DataMatrix x = fixture::toy_data();
  const DataMatrix test(3, 2, {0.0, 0.0, -1.2, 1.0, 1.0, -1.0});
  const auto samples = short_chain(m, x, 7);
  REQUIRE(samples.size() == 5);

  SUBCASE("one sample") {
    const auto r = test_log_likelihood(m, x, std::span(samples).first(1), test, 11);
    CHECK(r.per_sample.size() == 1);
    CHECK(r.posterior_mean == doctest::Approx(r.per_sample[0]).epsilon(1e-12));
    CHECK(r.final_sample == r.per_sample[0]);
  }
  SUBCASE("duplicated samples") {
    std::vector<StoredSample> twice{samples[1], samples[1]};
    const auto one = test_log_likelihood(m, x, std::span(samples).subspan(1, 1), test, 11);
    const auto two = test_log_likelihood(m, x, twice, test, 11);
    CHECK(two.posterior_mean == doctest::Approx(one.posterior_mean).epsilon(1e-12));
  }
  SUBCASE("order") {
    std::vector<StoredSample> rev(samples.rbegin(), samples.rend());
    const auto fwd = test_log_likelihood(m, x, samples, test, 11);
    const auto back = test_log_likelihood(m, x, rev, test, 11);
    CHECK(back.posterior_mean == doctest::Approx(fwd.posterior_mean).epsilon(1e-12));
    for (std::size_t i = 0; i < fwd.per_point.size(); ++i)
      CHECK(back.per_point[i] == doctest::Approx(fwd.per_point[i]).epsilon(1e-12));
    CHECK(back.per_sample.front() == fwd.per_sample.back());
  }
  SUBCASE("posterior mean is a log-mean-exp of per-sample densities") {
    const auto r = test_log_likelihood(m, x, samples, test, 11);
    std::vector<MaterializedParams> params;
    for (const auto& s : samples) {
      Rng rng = make_rng(sample_seed(11, s));
      params.push_back(materialize(m, x, s.z, rng));
    }
    const auto direct = test_log_likelihood(m.graph, params, test);
    CHECK(direct.posterior_mean == doctest::Approx(r.posterior_mean).epsilon(1e-12));
    double total = 0.0;
    for (std::size_t t = 0; t < test.rows(); ++t) {
      double acc = 0.0;
      for (const auto& p : params) acc += std::exp(eval_log_density(m.graph, p, test.row(t)));
      total += std::log(acc / static_cast<double>(params.size()));
    }
    CHECK(r.posterior_mean == doctest::Approx(total / 3.0).epsilon(1e-10));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(test_log_likelihood(m, x, samples, DataMatrix(0, 2), 1), ConfigError);
    CHECK_THROWS_AS(test_log_likelihood(m, x, std::span<const StoredSample>{}, test, 1), ConfigError);
  }
}

TEST_CASE("averaging over parameter draws approaches the collapsed predictive") {
  // Fixed Z, many draws of (W, Theta): the average density converges to the
  // mixture of leaf Student-t predictives with Dirichlet-mean weights.
  Model m = Model::with_defaults(build_balanced(1, 2, 2), 1.0);
  m.leaf_hyper = {GaussianPrior{-1.0, 1.0, 2.0, 1.0}, GaussianPrior{2.0, 0.5, 3.0, 2.0}};
  const DataMatrix x(6, 1, {-1.5, -0.4, -1.1, 2.4, 1.8, 3.1});
  AssignmentMatrix z(6, 1, 2);
  for (std::size_t n = 3; n < 6; ++n) z.set(n, 0, 1);
  std::vector<StoredSample> samples;
  for (std::uint64_t k = 0; k < 4000; ++k) samples.push_back({k, 0.0, z});
  const DataMatrix test(3, 1, {-1.0, 0.5, 2.5});
  const auto r = test_log_likelihood(m, x, samples, test, 5);

  auto st = LatentState::from_assignments(m, x, z);
  for (std::size_t t = 0; t < 3; ++t) {
    double p = 0.0;
    for (std::uint32_t c = 0; c < 2; ++c) {
      const double w = (3.0 + 1.0) / (6.0 + 2.0);
      const std::vector<double> xs = c == 0 ? std::vector<double>{-1.5, -0.4, -1.1} : std::vector<double>{2.4, 1.8, 3.1};
      p += w * oracle::predictive_by_quadrature(m.leaf_hyper[c], xs, test(t, 0));
    }
    CAPTURE(t);
    CHECK(std::abs(r.per_point[t] - std::log(p)) < 0.03);
  }
}

TEST_CASE("marginal and conditional queries") {
  const SpnGraph g = build_balanced(2, 3, 2);
  std::vector<LeafParams> leaves;
  for (std::uint32_t j = 0; j < g.leaf_count(); ++j)
    leaves.push_back(GaussianParams{static_cast<double>(j % 4) - 1.5, 0.5 + 0.25 * (j % 3)});
  std::vector<double> w;
  for (std::uint32_t s = 0; s < g.sum_count(); ++s) w.insert(w.end(), {0.2, 0.5, 0.3});
  const auto p = MaterializedParams::from_weights(3, w, leaves);

  const std::vector<double> full{0.3, -0.8};
  const std::vector<double> only0{0.3, kMissing};
  const std::vector<double> only1{kMissing, -0.8};
  const std::vector<double> none{kMissing, kMissing};
  CHECK(query_conditional(g, p, only0, none) == doctest::Approx(query_marginal(g, p, only0)).epsilon(1e-14));
  CHECK(query_conditional(g, p, only0, only1) ==
        doctest::Approx(eval_log_density(g, p, full) - query_marginal(g, p, only1)).epsilon(1e-14));
  CHECK_THROWS_AS(query_conditional(g, p, full, only1), ConfigError);

  // Marginal against numeric integration of the joint over the other dimension.
  boost::math::quadrature::gauss_kronrod<double, 61> gk;
  const double integral = gk.integrate(
      [&](double v) {
        const std::vector<double> pt{0.3, v};
        return std::exp(eval_log_density(g, p, pt));
      },
      -30.0, 30.0, 15, 1e-12);
  CHECK(std::abs(integral - std::exp(query_marginal(g, p, only0))) < 1e-6);

  // Discrete target conditionals sum to one.
  const SpnGraph gc = build_balanced(2, 2, 2, LeafPolicy::uniform(2, {Family::Multinomial, 3}));
  std::vector<LeafParams> cl;
  for (std::uint32_t j = 0; j < gc.leaf_count(); ++j) {
    const double a = 0.1 + 0.1 * j;
    cl.push_back(MultinomialParams{{a, 0.5 - a / 2, 0.5 - a / 2}});
  }
  std::vector<double> cw;
  for (std::uint32_t s = 0; s < gc.sum_count(); ++s) cw.insert(cw.end(), {0.35, 0.65});
  const auto pc = MaterializedParams::from_weights(2, cw, cl);
  double total = 0.0;
  for (int k = 1; k <= 3; ++k) {
    const std::vector<double> tgt{static_cast<double>(k), kMissing};
    const std::vector<double> ev{kMissing, 2.0};
    total += std::exp(query_conditional(gc, pc, tgt, ev));
  }
  CHECK(std::abs(total - 1.0) < 1e-9);
}
