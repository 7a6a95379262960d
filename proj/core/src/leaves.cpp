#include "bspn/leaves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "bspn/errors.hpp"

namespace bspn {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool is_integer(double x) noexcept { return std::isfinite(x) && x == std::floor(x); }

std::size_t category_index(double x) noexcept { return static_cast<std::size_t>(x) - 1; }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("hyperparameter ") + what + " must be positive and finite");
}

void require_family(const SuffStats& stats, Family f) {
  if (stats.family != f) throw BookkeepingError("sufficient statistics belong to a different leaf family");
}

double draw_gamma(double shape, double rate, Rng& rng) {
  std::gamma_distribution<double> g(shape, 1.0 / rate);
  return g(rng);
}

}  // namespace

std::string_view family_name(Family f) noexcept {
  switch (f) {
    case Family::Gaussian: return "gaussian";
    case Family::Exponential: return "exponential";
    case Family::Poisson: return "poisson";
    case Family::Multinomial: return "multinomial";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "gaussian") return Family::Gaussian;
  if (name == "exponential") return Family::Exponential;
  if (name == "poisson") return Family::Poisson;
  if (name == "multinomial") return Family::Multinomial;
  throw ConfigError("unknown leaf family '" + std::string(name) + "'");
}

Family family_of(const Hyperparams& h) noexcept { return static_cast<Family>(h.index()); }

void check_hyperparams(const Hyperparams& h) {
  std::visit(overloaded{
                 [](const GaussianPrior& p) {
                   if (!std::isfinite(p.mu0)) throw ConfigError("hyperparameter mu0 must be finite");
                   require_positive(p.rho0, "rho0");
                   require_positive(p.a0, "a0");
                   require_positive(p.b0, "b0");
                 },
                 [](const ExponentialPrior& p) {
                   require_positive(p.shape, "shape");
                   require_positive(p.rate, "rate");
                 },
                 [](const PoissonPrior& p) {
                   require_positive(p.shape, "shape");
                   require_positive(p.rate, "rate");
                 },
                 [](const MultinomialPrior& p) {
                   if (p.alpha.empty()) throw ConfigError("Dirichlet concentration vector is empty");
                   for (double a : p.alpha) require_positive(a, "alpha");
                 },
             },
             h);
}

Hyperparams default_hyperparams(const FamilySpec& spec, const PriorDefaults& d) {
  switch (spec.family) {
    case Family::Gaussian: return GaussianPrior{d.gaussian_mu0, d.gaussian_rho0, d.gaussian_a0, d.gaussian_b0};
    case Family::Exponential: return ExponentialPrior{d.gamma_shape, d.gamma_rate};
    case Family::Poisson: return PoissonPrior{d.gamma_shape, d.gamma_rate};
    case Family::Multinomial:
      if (spec.categories == 0) throw ConfigError("multinomial leaf needs at least one category");
      return MultinomialPrior{std::vector<double>(spec.categories, d.dirichlet_alpha)};
  }
  throw ConfigError("unknown leaf family");
}

SuffStats SuffStats::empty(const FamilySpec& spec) {
  SuffStats s;
  s.family = spec.family;
  if (spec.family == Family::Multinomial) {
    if (spec.categories == 0) throw ConfigError("multinomial leaf needs at least one category");
    s.counts.assign(spec.categories, 0);
  }
  return s;
}

bool in_support(const FamilySpec& spec, double x) noexcept {
  switch (spec.family) {
    case Family::Gaussian: return std::isfinite(x);
    case Family::Exponential: return std::isfinite(x) && x >= 0.0;
    case Family::Poisson: return is_integer(x) && x >= 0.0;
    case Family::Multinomial: return is_integer(x) && x >= 1.0 && x <= static_cast<double>(spec.categories);
  }
  return false;
}

void add_point(SuffStats& s, double x) {
  ++s.n;
  s.sum += x;
  switch (s.family) {
    case Family::Gaussian: s.sum_sq += x * x; break;
    case Family::Exponential: break;
    case Family::Poisson: s.sum_log_factorial += std::lgamma(x + 1.0); break;
    case Family::Multinomial: ++s.counts[category_index(x)]; break;
  }
}

void remove_point(SuffStats& s, double x) {
  if (s.n <= 0) throw BookkeepingError("remove_point on a leaf with no allocated points");
  if (s.family == Family::Multinomial) {
    auto& c = s.counts[category_index(x)];
    if (c <= 0) throw BookkeepingError("remove_point of a category that was never added");
    --c;
  }
  --s.n;
  if (s.n == 0) {
    s.sum = 0.0;
    s.sum_sq = 0.0;
    s.sum_log_factorial = 0.0;
    return;
  }
  s.sum -= x;
  switch (s.family) {
    case Family::Gaussian: s.sum_sq -= x * x; break;
    case Family::Poisson: s.sum_log_factorial -= std::lgamma(x + 1.0); break;
    default: break;
  }
}

GaussianPosterior gaussian_posterior(const GaussianPrior& p, const SuffStats& s) noexcept {
  const double n = static_cast<double>(s.n);
  GaussianPosterior post;
  post.rho = p.rho0 + n;
  post.mu = (p.rho0 * p.mu0 + s.sum) / post.rho;
  post.a = p.a0 + 0.5 * n;
  post.b = p.b0;
  if (s.n > 0) {
    const double mean = s.sum / n;
    const double scatter = std::max(0.0, s.sum_sq - s.sum * mean);
    const double dev = mean - p.mu0;
    post.b += 0.5 * scatter + p.rho0 * n * dev * dev / (2.0 * post.rho);
  }
  return post;
}

double student_t_log_density(double x, double location, double dof, double scale_sq) noexcept {
  const double z = (x - location);
  return std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
         0.5 * std::log(dof * std::numbers::pi * scale_sq) -
         0.5 * (dof + 1.0) * std::log1p(z * z / (dof * scale_sq));
}

double log_predictive(const Hyperparams& h, const SuffStats& s, double x) {
  switch (family_of(h)) {
    case Family::Gaussian: {
      if (!std::isfinite(x)) throw SupportError("gaussian leaf: non-finite value");
      const auto post = gaussian_posterior(std::get<GaussianPrior>(h), s);
      return student_t_log_density(x, post.mu, 2.0 * post.a, post.b * (post.rho + 1.0) / (post.a * post.rho));
    }
    case Family::Exponential: {
      if (!(std::isfinite(x) && x >= 0.0)) throw SupportError("exponential leaf: value must be non-negative");
      const auto& p = std::get<ExponentialPrior>(h);
      const double shape = p.shape + static_cast<double>(s.n);
      const double rate = p.rate + s.sum;
      // Lomax(x | shape, rate)
      return std::log(shape) + shape * std::log(rate) - (shape + 1.0) * std::log(rate + x);
    }
    case Family::Poisson: {
      if (!(is_integer(x) && x >= 0.0)) throw SupportError("poisson leaf: value must be a non-negative integer");
      const auto& p = std::get<PoissonPrior>(h);
      const double shape = p.shape + s.sum;
      const double rate = p.rate + static_cast<double>(s.n);
      // NegBin(x | shape, rate / (rate + 1))
      return std::lgamma(x + shape) - std::lgamma(shape) - std::lgamma(x + 1.0) + shape * std::log(rate / (rate + 1.0)) -
             x * std::log1p(rate);
    }
    case Family::Multinomial: {
      const auto& p = std::get<MultinomialPrior>(h);
      if (!(is_integer(x) && x >= 1.0 && x <= static_cast<double>(p.alpha.size())))
        throw SupportError("multinomial leaf: category code out of range");
      require_family(s, Family::Multinomial);
      const std::size_t c = category_index(x);
      const double total = std::accumulate(p.alpha.begin(), p.alpha.end(), 0.0) + static_cast<double>(s.n);
      return std::log((p.alpha[c] + static_cast<double>(s.counts[c])) / total);
    }
  }
  throw SupportError("unknown leaf family");
}

double log_marginal_likelihood(const Hyperparams& h, const SuffStats& s) {
  const double n = static_cast<double>(s.n);
  switch (family_of(h)) {
    case Family::Gaussian: {
      const auto& p = std::get<GaussianPrior>(h);
      const auto post = gaussian_posterior(p, s);
      return std::lgamma(post.a) - std::lgamma(p.a0) + p.a0 * std::log(p.b0) - post.a * std::log(post.b) +
             0.5 * (std::log(p.rho0) - std::log(post.rho)) - 0.5 * n * std::log(2.0 * std::numbers::pi);
    }
    case Family::Exponential: {
      const auto& p = std::get<ExponentialPrior>(h);
      return p.shape * std::log(p.rate) - (p.shape + n) * std::log(p.rate + s.sum) + std::lgamma(p.shape + n) -
             std::lgamma(p.shape);
    }
    case Family::Poisson: {
      const auto& p = std::get<PoissonPrior>(h);
      return p.shape * std::log(p.rate) - (p.shape + s.sum) * std::log(p.rate + n) + std::lgamma(p.shape + s.sum) -
             std::lgamma(p.shape) - s.sum_log_factorial;
    }
    case Family::Multinomial: {
      const auto& p = std::get<MultinomialPrior>(h);
      require_family(s, Family::Multinomial);
      const double alpha_total = std::accumulate(p.alpha.begin(), p.alpha.end(), 0.0);
      double v = std::lgamma(alpha_total) - std::lgamma(alpha_total + n);
      for (std::size_t c = 0; c < p.alpha.size(); ++c)
        v += std::lgamma(p.alpha[c] + static_cast<double>(s.counts[c])) - std::lgamma(p.alpha[c]);
      return v;
    }
  }
  return kNegInf;
}

void draw_dirichlet(std::span<const double> alpha, Rng& rng, std::span<double> out) {
  double total = 0.0;
  for (std::size_t c = 0; c < alpha.size(); ++c) {
    out[c] = draw_gamma(alpha[c], 1.0, rng);
    total += out[c];
  }
  if (!(total > 0.0)) {
    // Every gamma draw underflowed (tiny concentrations); fall back to the
    // largest-concentration corner, which is the limit of the distribution.
    const auto best = std::max_element(alpha.begin(), alpha.end()) - alpha.begin();
    std::fill(out.begin(), out.end(), 0.0);
    out[static_cast<std::size_t>(best)] = 1.0;
    return;
  }
  for (auto& v : out) v /= total;
}

LeafParams draw_posterior(const Hyperparams& h, const SuffStats& s, Rng& rng) {
  switch (family_of(h)) {
    case Family::Gaussian: {
      const auto post = gaussian_posterior(std::get<GaussianPrior>(h), s);
      const double tau = draw_gamma(post.a, post.b, rng);
      std::normal_distribution<double> normal(post.mu, 1.0 / std::sqrt(post.rho * tau));
      return GaussianParams{normal(rng), tau};
    }
    case Family::Exponential: {
      const auto& p = std::get<ExponentialPrior>(h);
      return ExponentialParams{draw_gamma(p.shape + static_cast<double>(s.n), p.rate + s.sum, rng)};
    }
    case Family::Poisson: {
      const auto& p = std::get<PoissonPrior>(h);
      return PoissonParams{draw_gamma(p.shape + s.sum, p.rate + static_cast<double>(s.n), rng)};
    }
    case Family::Multinomial: {
      const auto& p = std::get<MultinomialPrior>(h);
      require_family(s, Family::Multinomial);
      std::vector<double> alpha(p.alpha);
      for (std::size_t c = 0; c < alpha.size(); ++c) alpha[c] += static_cast<double>(s.counts[c]);
      MultinomialParams out{std::vector<double>(alpha.size())};
      draw_dirichlet(alpha, rng, out.probs);
      return out;
    }
  }
  throw ConfigError("unknown leaf family");
}

double log_density(const LeafParams& params, double x) noexcept {
  switch (params.index()) {
    case 0: {
      if (!std::isfinite(x)) return kNegInf;
      const auto& p = *std::get_if<GaussianParams>(&params);
      const double z = x - p.mu;
      return 0.5 * std::log(p.tau / (2.0 * std::numbers::pi)) - 0.5 * p.tau * z * z;
    }
    case 1: {
      if (!(std::isfinite(x) && x >= 0.0)) return kNegInf;
      const auto& p = *std::get_if<ExponentialParams>(&params);
      return std::log(p.rate) - p.rate * x;
    }
    case 2: {
      if (!(is_integer(x) && x >= 0.0)) return kNegInf;
      const auto& p = *std::get_if<PoissonParams>(&params);
      return x * std::log(p.rate) - p.rate - std::lgamma(x + 1.0);
    }
    case 3: {
      const auto& p = *std::get_if<MultinomialParams>(&params);
      if (!(is_integer(x) && x >= 1.0 && x <= static_cast<double>(p.probs.size()))) return kNegInf;
      return std::log(p.probs[category_index(x)]);
    }
  }
  return kNegInf;
}

Hyperparams empirical_bayes_fit(const FamilySpec& spec, std::span<const double> x, const PriorDefaults& d) {
  if (x.empty()) throw ConfigError("empirical Bayes fit needs a non-empty subsample");
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  switch (spec.family) {
    case Family::Exponential:
      return ExponentialPrior{d.gamma_shape, std::max(mean, d.mean_floor) * d.gamma_shape};
    case Family::Poisson:
      return PoissonPrior{d.gamma_shape, d.gamma_shape / std::max(mean, d.mean_floor)};
    case Family::Gaussian: {
      double var = 0.0;
      for (double v : x) var += (v - mean) * (v - mean);
      var /= n;
      if (x.size() < 2 || !(var > 0.0)) var = d.variance_floor;
      return GaussianPrior{mean, d.gaussian_rho0, d.gaussian_a0, var * d.gaussian_a0};
    }
    case Family::Multinomial: return default_hyperparams(spec, d);
  }
  throw ConfigError("unknown leaf family");
}

}  // namespace bspn
