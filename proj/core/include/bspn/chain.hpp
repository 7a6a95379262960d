#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "bspn/samples.hpp"
#include "bspn/sampler.hpp"
#include "bspn/topdown.hpp"

namespace bspn {

struct RunConfig {
  std::uint64_t iterations = 100;
  std::uint64_t burn_in = 0;
  std::uint64_t thin = 1;
  std::uint64_t seed = 1;
  double max_seconds = 0.0;  // stop early once exceeded; 0 disables
  bool record_log_joint = true;
};

// Throws ConfigError unless iterations >= 1, burn_in < iterations, thin >= 1.
void check_run_config(const RunConfig& c);

struct TraceRow {
  std::uint64_t iteration = 0;
  double seconds = 0.0;  // this sweep
  double elapsed = 0.0;  // cumulative sweep time
  double log_joint = 0.0;  // collapsed log p(X, Z); NaN when not recorded
  double acceptance_rate = 0.0;
  std::uint64_t node_touches = 0;
  std::uint64_t skipped_dims = 0;
};

struct ChainResult {
  std::vector<StoredSample> samples;
  std::vector<TraceRow> trace;
  double total_seconds = 0.0;
  bool stopped_by_time = false;
};

// Sweep i (zero-based) is stored when i >= burn_in and (i - burn_in + 1) is a
// multiple of thin.
ChainResult run_chain(Sampler& sampler, const RunConfig& config, Rng& rng);

std::unique_ptr<Sampler> make_sampler(SamplerKind kind, LatentState state, TopDownOptions options = {});

// Random initial state from stream 1 of the seed, chain on stream 2.
ChainResult run(SamplerKind kind, const Model& model, const DataMatrix& train, const RunConfig& config,
                TopDownOptions options = {});

}  // namespace bspn
