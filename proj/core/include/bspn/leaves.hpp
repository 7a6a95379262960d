#pragma once

// Conjugate one-dimensional leaf models.
//
//   family       likelihood        prior                          predictive
//   Gaussian     N(x | mu, 1/tau)  N(mu | mu0, 1/(rho0 tau))       Student-t
//                                  Gamma(tau | a0, b0)
//   Exponential  Exp(x | lambda)   Gamma(lambda | shape, rate)    Lomax
//   Poisson      Poi(x | lambda)   Gamma(lambda | shape, rate)    negative binomial
//   Multinomial  Cat(x | pi)       Dir(pi | alpha)                Dirichlet-multinomial
//
// Gamma distributions are parameterized by shape and rate throughout.
// Multinomial observations are category codes 1..K stored as doubles.

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "bspn/family.hpp"
#include "bspn/rng.hpp"

namespace bspn {

struct GaussianPrior {
  double mu0 = 0.0;
  double rho0 = 1.0;
  double a0 = 1.0;
  double b0 = 1.0;
  friend bool operator==(const GaussianPrior&, const GaussianPrior&) = default;
};

struct ExponentialPrior {
  double shape = 1.0;
  double rate = 1.0;
  friend bool operator==(const ExponentialPrior&, const ExponentialPrior&) = default;
};

struct PoissonPrior {
  double shape = 1.0;
  double rate = 1.0;
  friend bool operator==(const PoissonPrior&, const PoissonPrior&) = default;
};

struct MultinomialPrior {
  std::vector<double> alpha;
  friend bool operator==(const MultinomialPrior&, const MultinomialPrior&) = default;
};

// Alternative order matches Family.
using Hyperparams = std::variant<GaussianPrior, ExponentialPrior, PoissonPrior, MultinomialPrior>;

Family family_of(const Hyperparams& h) noexcept;
// Throws ConfigError on non-positive or non-finite values.
void check_hyperparams(const Hyperparams& h);

// Values used for hyperparameters that have no closed-form empirical-Bayes
// solution, plus the floors applied to degenerate subsamples.
struct PriorDefaults {
  double gamma_shape = 1.0;    // Exponential / Poisson shape
  double gaussian_a0 = 1.0;
  double gaussian_rho0 = 1.0;
  double gaussian_mu0 = 0.0;   // only used when no data is available
  double gaussian_b0 = 1.0;    // only used when no data is available
  double gamma_rate = 1.0;     // only used when no data is available
  double dirichlet_alpha = 1.0;
  double variance_floor = 1.0; // used when the subsample variance is zero
  double mean_floor = 1e-3;    // lower bound on the mean in Gamma-prior fits
};

Hyperparams default_hyperparams(const FamilySpec& spec, const PriorDefaults& defaults = {});

// Sufficient statistics of the points currently allocated to one leaf.
struct SuffStats {
  Family family = Family::Gaussian;
  std::int64_t n = 0;
  double sum = 0.0;
  double sum_sq = 0.0;             // Gaussian
  double sum_log_factorial = 0.0;  // Poisson: sum of log(x!)
  std::vector<std::int64_t> counts;  // Multinomial

  static SuffStats empty(const FamilySpec& spec);
  friend bool operator==(const SuffStats&, const SuffStats&) = default;
};

// O(1) updates. remove_point throws BookkeepingError when it would drive a
// count negative. When n returns to zero the continuous sums are reset to
// exactly zero so that add-then-remove restores the empty state bit for bit.
void add_point(SuffStats& stats, double x);
void remove_point(SuffStats& stats, double x);

bool in_support(const FamilySpec& spec, double x) noexcept;

// Posterior predictive log-density of x given the points in stats.
// Throws SupportError when x is outside the family support.
double log_predictive(const Hyperparams& h, const SuffStats& stats, double x);

// log p(x_1..x_n | h) with all parameters integrated out.
double log_marginal_likelihood(const Hyperparams& h, const SuffStats& stats);

struct GaussianPosterior {
  double mu = 0.0;
  double rho = 1.0;
  double a = 1.0;
  double b = 1.0;
};
GaussianPosterior gaussian_posterior(const GaussianPrior& prior, const SuffStats& stats) noexcept;

// Student-t in (location, dof, squared scale) form; the conjugate Gaussian
// predictive has dof 2a, location mu and squared scale b (rho + 1) / (a rho).
double student_t_log_density(double x, double location, double dof, double scale_sq) noexcept;

struct GaussianParams {
  double mu = 0.0;
  double tau = 1.0;
};
struct ExponentialParams {
  double rate = 1.0;
};
struct PoissonParams {
  double rate = 1.0;
};
struct MultinomialParams {
  std::vector<double> probs;
};
using LeafParams = std::variant<GaussianParams, ExponentialParams, PoissonParams, MultinomialParams>;

LeafParams draw_posterior(const Hyperparams& h, const SuffStats& stats, Rng& rng);

// Likelihood of x under drawn parameters; -inf outside the support, so that
// mixtures over heterogeneous families stay well defined.
double log_density(const LeafParams& params, double x) noexcept;

// Closed-form empirical-Bayes hyperparameters from a subsample:
//   Exponential  rate = mean * shape
//   Gaussian     mu0 = mean, b0 = population variance * a0
//   Poisson      rate = shape / mean
//   Multinomial  symmetric alpha from defaults
// Throws ConfigError on an empty subsample.
Hyperparams empirical_bayes_fit(const FamilySpec& spec, std::span<const double> subsample,
                                const PriorDefaults& defaults = {});

// Dirichlet draw with concentration vector alpha; written into out.
void draw_dirichlet(std::span<const double> alpha, Rng& rng, std::span<double> out);

}  // namespace bspn
