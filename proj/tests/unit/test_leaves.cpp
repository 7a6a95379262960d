#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <cmath>
#include <numeric>

#include "bspn/errors.hpp"
#include "bspn/leaves.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bspn;

namespace {

double predictive(const Hyperparams& h, const std::vector<double>& xs, double x, const FamilySpec& spec) {
  auto st = SuffStats::empty(spec);
  for (double v : xs) add_point(st, v);
  return std::exp(log_predictive(h, st, x));
}

const FamilySpec kGauss{Family::Gaussian, 0};
const FamilySpec kExp{Family::Exponential, 0};
const FamilySpec kPois{Family::Poisson, 0};

}  // namespace

TEST_CASE("sufficient statistic updates") {
  auto st = SuffStats::empty(kGauss);
  add_point(st, 2.0);
  CHECK(st.n == 1);
  CHECK(st.sum == 2.0);
  CHECK(st.sum_sq == 4.0);
  remove_point(st, 2.0);
  CHECK(st == SuffStats::empty(kGauss));
  CHECK_THROWS_AS(remove_point(st, 2.0), BookkeepingError);

  auto cat = SuffStats::empty({Family::Multinomial, 4});
  add_point(cat, 3.0);
  CHECK(cat.counts == std::vector<std::int64_t>{0, 0, 1, 0});
  CHECK_THROWS_AS(remove_point(cat, 1.0), BookkeepingError);
}

TEST_CASE("predictive examples with no data") {
  CHECK(predictive(GaussianPrior{0, 1, 1, 1}, {}, 0.0, kGauss) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(predictive(ExponentialPrior{1, 1}, {}, 0.0, kExp) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(predictive(PoissonPrior{1, 1}, {}, 0.0, kPois) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(predictive(MultinomialPrior{{1, 1}}, {1, 1, 1, 2}, 1.0, {Family::Multinomial, 2}) ==
        doctest::Approx(4.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("predictive agrees with quadrature over the posterior") {
  const std::vector<Hyperparams> priors{GaussianPrior{0, 1, 1, 1}, GaussianPrior{1.5, 0.5, 2, 3},
                                        ExponentialPrior{1, 1},    ExponentialPrior{2.5, 4},
                                        PoissonPrior{1, 1},        PoissonPrior{3, 0.5},
                                        MultinomialPrior{{1, 1, 1}}, MultinomialPrior{{0.5, 2, 3}}};
  const std::vector<FamilySpec> specs{kGauss, kGauss, kExp, kExp, kPois, kPois, {Family::Multinomial, 3},
                                      {Family::Multinomial, 3}};
  const std::vector<std::vector<double>> data_g{{}, {0.3, -1.2, 2.2}};
  const std::vector<std::vector<double>> data_e{{}, {0.5, 3.0}};
  const std::vector<std::vector<double>> data_p{{}, {0, 4, 2}};
  const std::vector<std::vector<double>> data_m{{}, {1, 3, 3}};
  for (std::size_t i = 0; i < priors.size(); ++i) {
    const auto& datasets = specs[i].family == Family::Gaussian      ? data_g
                           : specs[i].family == Family::Exponential ? data_e
                           : specs[i].family == Family::Poisson     ? data_p
                                                                    : data_m;
    const std::vector<double> points = specs[i].family == Family::Gaussian      ? std::vector<double>{-0.7, 0.0, 2.5}
                                       : specs[i].family == Family::Exponential ? std::vector<double>{0.0, 0.4, 2.0}
                                       : specs[i].family == Family::Poisson     ? std::vector<double>{0, 1, 5}
                                                                                : std::vector<double>{1, 2, 3};
    for (const auto& xs : datasets)
      for (double x : points) {
        CAPTURE(i);
        CAPTURE(x);
        const double exact = predictive(priors[i], xs, x, specs[i]);
        const double quad = oracle::predictive_by_quadrature(priors[i], xs, x);
        CHECK(std::abs(exact - quad) <= 1e-6 * std::abs(quad));
      }
  }
}

TEST_CASE("marginal likelihood agrees with the independent formulas") {
  const std::vector<double> g{0.1, -0.4, 1.3, 2.0};
  const std::vector<double> e{0.2, 1.7, 0.9};
  const std::vector<double> p{0, 3, 1, 1};
  const std::vector<double> m{2, 2, 1, 3};
  auto stats = [](const FamilySpec& s, const std::vector<double>& xs) {
    auto st = SuffStats::empty(s);
    for (double v : xs) add_point(st, v);
    return st;
  };
  const Hyperparams hg = GaussianPrior{0.5, 2, 1.5, 0.7};
  const Hyperparams he = ExponentialPrior{2, 3};
  const Hyperparams hp = PoissonPrior{1.5, 0.5};
  const Hyperparams hm = MultinomialPrior{{1, 0.5, 2}};
  CHECK(log_marginal_likelihood(hg, stats(kGauss, g)) == doctest::Approx(oracle::log_marginal(hg, g)).epsilon(1e-10));
  CHECK(log_marginal_likelihood(he, stats(kExp, e)) == doctest::Approx(oracle::log_marginal(he, e)).epsilon(1e-10));
  CHECK(log_marginal_likelihood(hp, stats(kPois, p)) == doctest::Approx(oracle::log_marginal(hp, p)).epsilon(1e-10));
  CHECK(log_marginal_likelihood(hm, stats({Family::Multinomial, 3}, m)) ==
        doctest::Approx(oracle::log_marginal(hm, m)).epsilon(1e-10));
  // Chain rule: the marginal is the product of sequential predictives.
  auto st = SuffStats::empty(kGauss);
  double chain = 0.0;
  for (double v : g) {
    chain += log_predictive(hg, st, v);
    add_point(st, v);
  }
  CHECK(chain == doctest::Approx(log_marginal_likelihood(hg, st)).epsilon(1e-12));
}

TEST_CASE("predictives are normalized") {
  using boost::math::quadrature::exp_sinh;
  using boost::math::quadrature::sinh_sinh;
  auto st_g = SuffStats::empty(kGauss);
  for (double v : {0.5, 1.5, -0.2}) add_point(st_g, v);
  const Hyperparams hg = GaussianPrior{0.0, 1.0, 1.5, 2.0};
  sinh_sinh<double> ss;
  CHECK(ss.integrate([&](double x) { return std::exp(log_predictive(hg, st_g, x)); }) ==
        doctest::Approx(1.0).epsilon(1e-6));

  auto st_e = SuffStats::empty(kExp);
  add_point(st_e, 2.0);
  const Hyperparams he = ExponentialPrior{2.0, 1.0};
  exp_sinh<double> es;
  CHECK(es.integrate([&](double x) { return std::exp(log_predictive(he, st_e, x)); }, 0.0,
                     std::numeric_limits<double>::infinity()) == doctest::Approx(1.0).epsilon(1e-6));

  auto st_p = SuffStats::empty(kPois);
  add_point(st_p, 3.0);
  const Hyperparams hp = PoissonPrior{1.5, 1.0};
  double total = 0.0;
  for (int k = 0; k < 400; ++k) total += std::exp(log_predictive(hp, st_p, k));
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

  auto st_m = SuffStats::empty({Family::Multinomial, 3});
  add_point(st_m, 2.0);
  const Hyperparams hm = MultinomialPrior{{0.3, 1, 2}};
  total = 0.0;
  for (int k = 1; k <= 3; ++k) total += std::exp(log_predictive(hm, st_m, k));
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("support errors") {
  auto st = SuffStats::empty(kExp);
  CHECK_THROWS_AS(log_predictive(ExponentialPrior{}, st, -1.0), SupportError);
  auto sp = SuffStats::empty(kPois);
  CHECK_THROWS_AS(log_predictive(PoissonPrior{}, sp, 1.5), SupportError);
  auto sm = SuffStats::empty({Family::Multinomial, 2});
  CHECK_THROWS_AS(log_predictive(MultinomialPrior{{1, 1}}, sm, 3.0), SupportError);
  CHECK_FALSE(in_support(kGauss, std::numeric_limits<double>::infinity()));
  CHECK(std::isinf(log_density(ExponentialParams{1.0}, -2.0)));
}

TEST_CASE("exchangeability of accumulated statistics") {
  const Hyperparams h = GaussianPrior{0.2, 1.3, 2.0, 0.5};
  CHECK(predictive(h, {1.25, -3.5}, 0.7, kGauss) == doctest::Approx(predictive(h, {-3.5, 1.25}, 0.7, kGauss)).epsilon(1e-14));
  const Hyperparams hp = PoissonPrior{2, 1};
  CHECK(predictive(hp, {3, 7}, 2, kPois) == predictive(hp, {7, 3}, 2, kPois));
}

TEST_CASE("random add/remove sequences match recomputation") {
  Rng rng = make_rng(17);
  std::normal_distribution<double> normal(3.0, 10.0);
  const Hyperparams h = GaussianPrior{0.0, 1.0, 1.0, 1.0};
  for (int rep = 0; rep < 20; ++rep) {
    auto st = SuffStats::empty(kGauss);
    std::vector<double> held;
    for (int op = 0; op < 1000; ++op) {
      if (held.empty() || uniform01(rng) < 0.55) {
        held.push_back(normal(rng));
        add_point(st, held.back());
      } else {
        const std::size_t i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(held.size()));
        remove_point(st, held[i]);
        held.erase(held.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
    auto fresh = SuffStats::empty(kGauss);
    for (double v : held) add_point(fresh, v);
    const double a = log_predictive(h, st, 1.0);
    const double b = log_predictive(h, fresh, 1.0);
    CHECK(std::abs(a - b) <= 1e-9 * std::abs(b));
  }
}

TEST_CASE("posterior draws") {
  Rng rng = make_rng(5);
  SUBCASE("exponential draws concentrate near the inverse mean") {
    auto st = SuffStats::empty(kExp);
    std::exponential_distribution<double> data(0.5);
    for (int i = 0; i < 20000; ++i) add_point(st, data(rng));
    const double mean = st.sum / static_cast<double>(st.n);
    double acc = 0.0;
    for (int i = 0; i < 10000; ++i) acc += std::get<ExponentialParams>(draw_posterior(ExponentialPrior{1, 1}, st, rng)).rate;
    CHECK(acc / 10000.0 == doctest::Approx(1.0 / mean).epsilon(0.01));
    CHECK(1.0 / mean == doctest::Approx(0.5).epsilon(0.03));
  }
  SUBCASE("no-data draws follow the prior") {
    auto st = SuffStats::empty(kPois);
    double acc = 0.0, acc2 = 0.0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
      const double r = std::get<PoissonParams>(draw_posterior(PoissonPrior{3, 2}, st, rng)).rate;
      acc += r;
      acc2 += r * r;
    }
    const double mean = acc / n;
    CHECK(mean == doctest::Approx(1.5).epsilon(0.02));
    CHECK(acc2 / n - mean * mean == doctest::Approx(0.75).epsilon(0.05));
  }
  SUBCASE("gaussian draws center on the posterior location") {
    auto st = SuffStats::empty(kGauss);
    for (double v : {4.0, 5.0, 6.0, 5.5, 4.5}) add_point(st, v);
    const GaussianPrior prior{0, 1, 1, 1};
    const auto post = gaussian_posterior(prior, st);
    double acc = 0.0, tau = 0.0;
    for (int i = 0; i < 20000; ++i) {
      const auto p = std::get<GaussianParams>(draw_posterior(prior, st, rng));
      acc += p.mu;
      tau += p.tau;
    }
    CHECK(acc / 20000 == doctest::Approx(post.mu).epsilon(0.02));
    CHECK(tau / 20000 == doctest::Approx(post.a / post.b).epsilon(0.03));
  }
  SUBCASE("dirichlet draws lie on the simplex") {
    std::vector<double> out(4);
    for (int i = 0; i < 100; ++i) {
      draw_dirichlet(std::vector<double>{0.1, 1, 2, 5}, rng, out);
      CHECK(std::accumulate(out.begin(), out.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
      for (double v : out) CHECK(v >= 0.0);
    }
  }
}

TEST_CASE("empirical Bayes closed forms") {
  PriorDefaults d;
  d.gamma_shape = 3.0;
  const auto e = std::get<ExponentialPrior>(empirical_bayes_fit(kExp, std::vector<double>{1.0, 3.0}, d));
  CHECK(e.rate == doctest::Approx(6.0));
  CHECK(e.shape == 3.0);

  d.gamma_shape = 2.0;
  const auto p = std::get<PoissonPrior>(empirical_bayes_fit(kPois, std::vector<double>{3, 5, 4}, d));
  CHECK(p.rate == doctest::Approx(0.5));

  d.gaussian_a0 = 2.0;
  const auto g = std::get<GaussianPrior>(empirical_bayes_fit(kGauss, std::vector<double>{1, 3}, d));
  CHECK(g.mu0 == doctest::Approx(2.0));
  CHECK(g.b0 == doctest::Approx(2.0));
  CHECK(g.a0 == 2.0);

  const auto single = std::get<GaussianPrior>(empirical_bayes_fit(kGauss, std::vector<double>{7}, d));
  CHECK(single.b0 == doctest::Approx(d.variance_floor * 2.0));

  const auto m = std::get<MultinomialPrior>(empirical_bayes_fit({Family::Multinomial, 3}, std::vector<double>{1, 1}, d));
  CHECK(m.alpha == std::vector<double>(3, d.dirichlet_alpha));

  CHECK_THROWS_AS(empirical_bayes_fit(kExp, std::vector<double>{}, d), ConfigError);
}

TEST_CASE("empirical Bayes values maximize the marginal likelihood") {
  // Grid search over the closed-form hyperparameter with the rest fixed.
  auto argmax = [](auto&& f, double centre) {
    double best = 0.0, best_v = -std::numeric_limits<double>::infinity();
    for (int i = -400; i <= 400; ++i) {
      const double v = centre * std::exp(0.0025 * i);
      const double y = f(v);
      if (y > best_v) {
        best_v = y;
        best = v;
      }
    }
    return best;
  };
  const std::vector<double> xe{0.3, 2.2, 1.1, 0.7, 4.0};
  const std::vector<double> xp{2, 0, 5, 3, 1, 1};
  const std::vector<double> xg{0.3, 2.2, 1.1, -0.7, 4.0};
  PriorDefaults d;
  d.gamma_shape = 1.7;
  d.gaussian_a0 = 2.5;
  d.gaussian_rho0 = 0.8;

  const double be = std::get<ExponentialPrior>(empirical_bayes_fit(kExp, xe, d)).rate;
  CHECK(argmax([&](double b) { return oracle::log_marginal(ExponentialPrior{1.7, b}, xe); }, be) ==
        doctest::Approx(be).epsilon(0.01));

  const double bp = std::get<PoissonPrior>(empirical_bayes_fit(kPois, xp, d)).rate;
  CHECK(argmax([&](double b) { return oracle::log_marginal(PoissonPrior{1.7, b}, xp); }, bp) ==
        doctest::Approx(bp).epsilon(0.01));

  const auto g = std::get<GaussianPrior>(empirical_bayes_fit(kGauss, xg, d));
  CHECK(argmax([&](double b) { return oracle::log_marginal(GaussianPrior{g.mu0, 0.8, 2.5, b}, xg); }, g.b0) ==
        doctest::Approx(g.b0).epsilon(0.01));
  double best_mu = 0.0, best_v = -std::numeric_limits<double>::infinity();
  for (int i = -1000; i <= 1000; ++i) {
    const double mu = g.mu0 + 0.001 * i;
    const double v = oracle::log_marginal(GaussianPrior{mu, 0.8, 2.5, g.b0}, xg);
    if (v > best_v) {
      best_v = v;
      best_mu = mu;
    }
  }
  CHECK(best_mu == doctest::Approx(g.mu0).epsilon(0.01));
}

TEST_CASE("hyperparameter validation") {
  CHECK_THROWS_AS(check_hyperparams(GaussianPrior{0, -1, 1, 1}), ConfigError);
  CHECK_THROWS_AS(check_hyperparams(ExponentialPrior{0, 1}), ConfigError);
  CHECK_THROWS_AS(check_hyperparams(MultinomialPrior{{1, 0}}), ConfigError);
  CHECK_THROWS_AS(check_hyperparams(PoissonPrior{1, std::nan("")}), ConfigError);
  CHECK_NOTHROW(check_hyperparams(MultinomialPrior{{0.5, 2}}));
  CHECK(family_name(Family::Poisson) == "poisson");
  CHECK(parse_family("multinomial") == Family::Multinomial);
  CHECK_THROWS_AS(parse_family("beta"), ConfigError);
}
