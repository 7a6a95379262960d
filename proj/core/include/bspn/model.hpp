#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bspn/graph.hpp"
#include "bspn/leaves.hpp"

namespace bspn {

// An untrained Bayesian SPN: structure, one prior per leaf (indexed by leaf
// index) and the symmetric Dirichlet concentration shared by all sum nodes.
struct Model {
  SpnGraph graph;
  std::vector<Hyperparams> leaf_hyper;
  double alpha = 1.0;

  // Default priors for every leaf of g.
  static Model with_defaults(SpnGraph g, double alpha = 1.0, const PriorDefaults& defaults = {});

  friend bool operator==(const Model&, const Model&) = default;
};

// Throws ConfigError unless the graph is a tree, every leaf has a prior of its
// own family (matching category count) and alpha is positive and finite.
void check_model(const Model& m);

// "BSPNMODL", u32 version, u64 graph byte length, graph bytes, f64 alpha,
// then per leaf: u8 family tag followed by the prior fields as f64
// (multinomial: u32 K then K concentrations).
std::vector<std::uint8_t> serialize_model(const Model& m);
Model deserialize_model(std::span<const std::uint8_t> bytes);

}  // namespace bspn
