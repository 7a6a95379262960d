#pragma once

#include <span>

#include "bspn/graph.hpp"
#include "bspn/params.hpp"

namespace bspn {

// Log-density of x under the SPN with explicit parameters. Cells holding NaN
// are marginalized (their leaves contribute log 1). One pass over V nodes.
// Throws NotMaterializedError if params do not cover g, GraphError if g is
// not a tree.
double eval_log_density(const SpnGraph& g, const MaterializedParams& params, std::span<const double> x);

// Same pass, keeping every node's log-value: table[v] for node id v.
// table.size() must equal g.node_count().
void eval_all_nodes(const SpnGraph& g, const MaterializedParams& params, std::span<const double> x,
                    std::span<double> table);

// Numerically stable log(sum(exp(v))); -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> v) noexcept;

}  // namespace bspn
