#pragma once

#include <span>
#include <vector>

#include "bspn/graph.hpp"
#include "bspn/leaves.hpp"

namespace bspn {

// Explicit sum weights W and leaf parameters Theta drawn for one stored
// assignment sample. Row s of weights belongs to sum index s.
struct MaterializedParams {
  std::size_t sum_outdegree = 0;
  std::vector<double> weights;      // S x C_s, each row on the simplex
  std::vector<double> log_weights;  // log of weights
  std::vector<LeafParams> leaves;   // indexed by leaf index

  std::span<const double> weights_of(std::uint32_t s) const noexcept {
    return {weights.data() + s * sum_outdegree, sum_outdegree};
  }
  std::span<const double> log_weights_of(std::uint32_t s) const noexcept {
    return {log_weights.data() + s * sum_outdegree, sum_outdegree};
  }
  bool matches(const SpnGraph& g) const noexcept {
    return sum_outdegree == g.sum_outdegree() && weights.size() == g.sum_count() * sum_outdegree &&
           log_weights.size() == weights.size() && leaves.size() == g.leaf_count();
  }

  // Convenience for hand-built parameter sets; fills log_weights.
  static MaterializedParams from_weights(std::size_t sum_outdegree, std::vector<double> weights,
                                         std::vector<LeafParams> leaves);
};

}  // namespace bspn
