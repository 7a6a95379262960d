#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bspn/model.hpp"
#include "bspn/params.hpp"
#include "bspn/samples.hpp"
#include "bspn/state.hpp"

namespace bspn {

// W^s ~ Dirichlet(alpha + counts^s) and theta_j from each leaf posterior,
// using the attached points of state. One pass over the graph.
MaterializedParams materialize(const LatentState& state, Rng& rng);
MaterializedParams materialize(const Model& model, const DataMatrix& train, const AssignmentMatrix& z, Rng& rng);

struct TestLikelihood {
  // Mean over test points of log((1/K) sum_k p_k(x)).
  double posterior_mean = 0.0;
  // Per test point, the averaged predictive log-density.
  std::vector<double> per_point;
  // Per stored sample, mean test log-density under that sample's parameters.
  std::vector<double> per_sample;
  // per_sample.back().
  double final_sample = 0.0;
};

// Parameters for sample k are drawn with make_rng(sample_seed(seed, sample_k)).
// Throws ConfigError for an empty test set or no samples.
TestLikelihood test_log_likelihood(const Model& model, const DataMatrix& train, std::span<const StoredSample> samples,
                                   const DataMatrix& test, std::uint64_t seed);
TestLikelihood test_log_likelihood(const SpnGraph& g, std::span<const MaterializedParams> params,
                                   const DataMatrix& test);

// log p(x_E): evidence holds D cells, NaN where a dimension is not observed.
double query_marginal(const SpnGraph& g, const MaterializedParams& params, std::span<const double> evidence);

// log p(x_T | x_E) = log p(x_T, x_E) - log p(x_E). Both vectors use NaN for
// unobserved cells; throws ConfigError if any dimension is set in both.
double query_conditional(const SpnGraph& g, const MaterializedParams& params, std::span<const double> targets,
                         std::span<const double> evidence);

}  // namespace bspn
