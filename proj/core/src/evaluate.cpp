#include "bspn/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bspn/errors.hpp"

namespace bspn {

double log_sum_exp(std::span<const double> v) noexcept {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

void eval_all_nodes(const SpnGraph& g, const MaterializedParams& params, std::span<const double> x,
                    std::span<double> table) {
  if (!g.is_tree()) throw GraphError("evaluation requires a tree-structured graph");
  if (!params.matches(g)) throw NotMaterializedError("parameters were not materialized for this graph");
  if (x.size() != g.dims()) throw ConfigError("input has " + std::to_string(x.size()) + " values, expected D");
  if (table.size() != g.node_count()) throw ConfigError("node table size must equal the node count");

  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  const auto order = g.preorder();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId v = *it;
    const auto ch = g.children(v);
    switch (g.kind(v)) {
      case NodeKind::Leaf: {
        const std::uint32_t j = g.index_of(v);
        const double xd = x[g.leaf_dim(j)];
        table[v] = is_missing(xd) ? 0.0 : log_density(params.leaves[j], xd);
        break;
      }
      case NodeKind::Product: {
        double acc = 0.0;
        for (NodeId c : ch) acc += table[c];
        table[v] = acc;
        break;
      }
      case NodeKind::Sum: {
        const auto lw = params.log_weights_of(g.index_of(v));
        double m = kNegInf;
        for (std::size_t c = 0; c < ch.size(); ++c) m = std::max(m, lw[c] + table[ch[c]]);
        if (!std::isfinite(m)) {
          table[v] = m;
          break;
        }
        double acc = 0.0;
        for (std::size_t c = 0; c < ch.size(); ++c) acc += std::exp(lw[c] + table[ch[c]] - m);
        table[v] = m + std::log(acc);
        break;
      }
    }
  }
}

double eval_log_density(const SpnGraph& g, const MaterializedParams& params, std::span<const double> x) {
  std::vector<double> table(g.node_count());
  eval_all_nodes(g, params, x, table);
  return table[g.root()];
}

MaterializedParams MaterializedParams::from_weights(std::size_t sum_outdegree, std::vector<double> weights,
                                                    std::vector<LeafParams> leaves) {
  MaterializedParams p;
  p.sum_outdegree = sum_outdegree;
  p.log_weights.resize(weights.size());
  std::transform(weights.begin(), weights.end(), p.log_weights.begin(), [](double w) { return std::log(w); });
  p.weights = std::move(weights);
  p.leaves = std::move(leaves);
  return p;
}

}  // namespace bspn
