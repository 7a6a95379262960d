#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bspn/chain.hpp"
#include "bspn/graph.hpp"
#include "bspn/leaves.hpp"

namespace bspn {

// One subsampling ratio per dimension, each in (0, 1].
struct SubsampleRatios {
  std::vector<double> r;

  static SubsampleRatios ones(std::size_t dims) { return {std::vector<double>(dims, 1.0)}; }
  friend bool operator==(const SubsampleRatios&, const SubsampleRatios&) = default;
};

void check_ratios(const SubsampleRatios& r, std::size_t dims);

// Empirical-Bayes prior per leaf. Leaf j on dimension d is fitted to its own
// uniform subsample (without replacement) of max(1, ceil(r_d N)) values of
// column d. With r_d = 1 every leaf of a family on d gets the full-column fit.
std::vector<Hyperparams> assign_leaf_hyperparams(const SpnGraph& g, const DataMatrix& train,
                                                 const SubsampleRatios& ratios, const PriorDefaults& defaults,
                                                 Rng& rng);

struct TuneTrial {
  std::size_t index = 0;
  SubsampleRatios ratios;
  double score = 0.0;  // validation log-likelihood (posterior mean per point)
  std::uint64_t seed = 0;
  double seconds = 0.0;
};

// Proposes the ratio vector of trial `index` (never called for trial 0).
using RatioProposer = std::function<SubsampleRatios(std::size_t index, std::size_t dims, Rng& rng)>;

// Log-uniform per dimension over [r_min, 1].
RatioProposer log_uniform_proposer(double r_min);

struct TuneConfig {
  std::size_t trials = 20;
  double r_min = 0.01;
  SamplerKind sampler = SamplerKind::TopDown;
  // Short scoring chain: 50 sweeps after 25 of burn-in, every 5th kept.
  RunConfig run{.iterations = 75, .burn_in = 25, .thin = 5, .seed = 1, .max_seconds = 0.0, .record_log_joint = false};
  double alpha = 1.0;
  PriorDefaults defaults;
  std::uint64_t seed = 1;
  RatioProposer proposer;  // empty: log_uniform_proposer(r_min)
  unsigned jobs = 1;       // worker threads for independent trials
};

struct TuneResult {
  std::size_t best_index = 0;
  SubsampleRatios best;
  std::vector<Hyperparams> best_hyper;
  std::vector<TuneTrial> trials;  // in trial order
};

// Random search over ratio vectors. Trial 0 is always r = 1 for every
// dimension. Each trial assigns priors, runs a short chain on train and
// scores held-out log-likelihood on val. Deterministic given config.seed,
// independent of jobs.
TuneResult search_ratios(const SpnGraph& g, const DataMatrix& train, const DataMatrix& val, const TuneConfig& config);

}  // namespace bspn
