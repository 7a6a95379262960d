#include "fixtures.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "bspn/rng.hpp"

namespace fixture {

using namespace bspn;

SpnGraph fig1_graph() {
  const FamilySpec binary{Family::Multinomial, 2};
  std::vector<NodeSpec> nodes;
  nodes.push_back({NodeKind::Sum, {0, 1}, {1, 4, 7}, {}});
  for (NodeId p = 1; p <= 7; p += 3) {
    nodes.push_back({NodeKind::Product, {0, 1}, {p + 1, p + 2}, {}});
    nodes.push_back({NodeKind::Leaf, {0}, {}, binary});
    nodes.push_back({NodeKind::Leaf, {1}, {}, binary});
  }
  return SpnGraph(2, 3, 2, std::move(nodes), 0);
}

MaterializedParams fig1_params() {
  std::vector<LeafParams> leaves;
  for (double p : {0.35, 0.2, 0.4, 0.15, 0.1, 0.2}) leaves.emplace_back(MultinomialParams{{p, 1.0 - p}});
  return MaterializedParams::from_weights(3, {0.6, 0.3, 0.1}, std::move(leaves));
}

Model toy_model() {
  Model m{build_balanced(2, 2, 2), {}, 1.0};
  // Leaf order: product 0 covers (dim 0: leaves 0, 1; dim 1: leaves 2, 3),
  // product 1 covers (dim 0: leaves 4, 5; dim 1: leaves 6, 7).
  const double mu[8] = {-1.5, 1.5, -1.5, 1.5, -0.5, 2.0, 0.0, -2.0};
  for (double c : mu) m.leaf_hyper.emplace_back(GaussianPrior{c, 2.0, 3.0, 1.5});
  return m;
}

DataMatrix toy_data(std::size_t points) {
  const double xs[4][2] = {{-1.4, 1.6}, {-1.0, 1.1}, {1.7, -1.8}, {0.6, 0.2}};
  DataMatrix x(points, 2);
  for (std::size_t n = 0; n < points; ++n) {
    x(n, 0) = xs[n % 4][0];
    x(n, 1) = xs[n % 4][1];
  }
  return x;
}

DataMatrix gaussian_clusters(std::size_t n, std::size_t dims, std::size_t clusters, std::uint64_t seed) {
  Rng rng = make_rng(seed, 11);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<double> centres(clusters * dims);
  for (double& c : centres) c = 4.0 * unit(rng);
  std::uniform_int_distribution<std::size_t> pick(0, clusters - 1);
  DataMatrix x(n, dims);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = pick(rng);
    for (std::size_t d = 0; d < dims; ++d) x(i, d) = centres[k * dims + d] + unit(rng);
  }
  return x;
}

Dataset heterogeneous(std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed, 12);
  std::bernoulli_distribution cls(0.4);
  Dataset ds;
  ds.columns = {{"g", ColumnKind::Continuous, {}},
                {"e", ColumnKind::ContinuousPositive, {}},
                {"p", ColumnKind::Count, {}},
                {"c", ColumnKind::Categorical, {1, 2, 3}}};
  ds.x = DataMatrix(n, 4);
  for (std::size_t i = 0; i < n; ++i) {
    const bool a = cls(rng);
    ds.x(i, 0) = std::normal_distribution<double>(a ? -2.0 : 1.5, a ? 0.7 : 1.0)(rng);
    ds.x(i, 1) = std::exponential_distribution<double>(a ? 2.0 : 0.3)(rng) + 1e-9;
    ds.x(i, 2) = static_cast<double>(std::poisson_distribution<int>(a ? 1.5 : 7.0)(rng));
    std::discrete_distribution<int> cat(a ? std::initializer_list<double>{0.7, 0.2, 0.1}
                                          : std::initializer_list<double>{0.1, 0.3, 0.6});
    ds.x(i, 3) = 1.0 + cat(rng);
  }
  return ds;
}

DataMatrix spiral(std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed, 13);
  std::uniform_real_distribution<double> turn(0.25, 1.0);
  std::normal_distribution<double> noise(0.0, 0.1);
  DataMatrix x(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = turn(rng) * 2.0 * std::numbers::pi;
    const double arm = (i % 2 == 0) ? 0.0 : std::numbers::pi;
    const double r = t / 2.0;
    x(i, 0) = r * std::cos(t + arm) + noise(rng);
    x(i, 1) = r * std::sin(t + arm) + noise(rng);
  }
  return x;
}

}  // namespace fixture
