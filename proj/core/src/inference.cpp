#include "bspn/inference.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bspn/errors.hpp"
#include "bspn/evaluate.hpp"

namespace bspn {

MaterializedParams materialize(const LatentState& state, Rng& rng) {
  const SpnGraph& g = state.graph();
  const std::size_t arity = g.sum_outdegree();
  const double alpha = state.model().alpha;
  MaterializedParams p;
  p.sum_outdegree = arity;
  p.weights.resize(g.sum_count() * arity);
  p.log_weights.resize(p.weights.size());
  std::vector<double> conc(arity);
  for (std::uint32_t s = 0; s < g.sum_count(); ++s) {
    const auto counts = state.counts(s);
    for (std::size_t c = 0; c < arity; ++c) conc[c] = alpha + counts[c];
    std::span<double> w(p.weights.data() + s * arity, arity);
    draw_dirichlet(conc, rng, w);
    for (std::size_t c = 0; c < arity; ++c) p.log_weights[s * arity + c] = std::log(w[c]);
  }
  p.leaves.reserve(g.leaf_count());
  for (std::uint32_t j = 0; j < g.leaf_count(); ++j)
    p.leaves.push_back(draw_posterior(state.model().leaf_hyper[j], state.leaf_stats(j), rng));
  return p;
}

MaterializedParams materialize(const Model& model, const DataMatrix& train, const AssignmentMatrix& z, Rng& rng) {
  const LatentState state = LatentState::from_assignments(model, train, z);
  return materialize(state, rng);
}

TestLikelihood test_log_likelihood(const SpnGraph& g, std::span<const MaterializedParams> params,
                                   const DataMatrix& test) {
  if (test.rows() == 0) throw ConfigError("test set is empty");
  if (params.empty()) throw ConfigError("no parameter samples to evaluate");
  const std::size_t k = params.size();
  const std::size_t n = test.rows();
  TestLikelihood out;
  out.per_sample.assign(k, 0.0);
  out.per_point.assign(n, 0.0);
  std::vector<double> table(g.node_count());
  std::vector<double> column(k);
  const double log_k = std::log(static_cast<double>(k));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < k; ++s) {
      eval_all_nodes(g, params[s], test.row(i), table);
      column[s] = table[g.root()];
      out.per_sample[s] += column[s];
    }
    out.per_point[i] = log_sum_exp(column) - log_k;
    out.posterior_mean += out.per_point[i];
  }
  out.posterior_mean /= static_cast<double>(n);
  for (double& v : out.per_sample) v /= static_cast<double>(n);
  out.final_sample = out.per_sample.back();
  return out;
}

TestLikelihood test_log_likelihood(const Model& model, const DataMatrix& train, std::span<const StoredSample> samples,
                                   const DataMatrix& test, std::uint64_t seed) {
  if (test.rows() == 0) throw ConfigError("test set is empty");
  if (samples.empty()) throw ConfigError("no stored samples to evaluate");
  std::vector<MaterializedParams> params;
  params.reserve(samples.size());
  for (const auto& s : samples) {
    Rng rng = make_rng(sample_seed(seed, s));
    params.push_back(materialize(model, train, s.z, rng));
  }
  return test_log_likelihood(model.graph, params, test);
}

double query_marginal(const SpnGraph& g, const MaterializedParams& params, std::span<const double> evidence) {
  return eval_log_density(g, params, evidence);
}

double query_conditional(const SpnGraph& g, const MaterializedParams& params, std::span<const double> targets,
                         std::span<const double> evidence) {
  if (targets.size() != g.dims() || evidence.size() != g.dims())
    throw ConfigError("query vectors must have D entries");
  std::vector<double> joint(evidence.begin(), evidence.end());
  for (std::size_t d = 0; d < g.dims(); ++d) {
    if (is_missing(targets[d])) continue;
    if (!is_missing(evidence[d]))
      throw ConfigError("dimension " + std::to_string(d) + " is both a target and evidence");
    joint[d] = targets[d];
  }
  return eval_log_density(g, params, joint) - eval_log_density(g, params, evidence);
}

}  // namespace bspn
