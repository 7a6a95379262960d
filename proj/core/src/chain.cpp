#include "bspn/chain.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "bspn/bottomup.hpp"
#include "bspn/errors.hpp"

namespace bspn {

std::string_view sampler_name(SamplerKind k) noexcept { return k == SamplerKind::TopDown ? "topdown" : "bottomup"; }

SamplerKind parse_sampler(std::string_view name) {
  if (name == "topdown") return SamplerKind::TopDown;
  if (name == "bottomup") return SamplerKind::BottomUp;
  throw ConfigError("unknown sampler '" + std::string(name) + "' (expected topdown or bottomup)");
}

void check_run_config(const RunConfig& c) {
  if (c.iterations < 1) throw ConfigError("iterations must be at least 1");
  if (c.burn_in >= c.iterations) throw ConfigError("burn-in must be smaller than the iteration count");
  if (c.thin < 1) throw ConfigError("thin must be at least 1");
  if (!(c.max_seconds >= 0.0)) throw ConfigError("max-seconds must be non-negative");
}

ChainResult run_chain(Sampler& sampler, const RunConfig& config, Rng& rng) {
  check_run_config(config);
  ChainResult out;
  out.trace.reserve(config.iterations);
  double elapsed = 0.0;
  for (std::uint64_t i = 0; i < config.iterations; ++i) {
    const SweepReport rep = sampler.sweep(rng);
    elapsed += rep.seconds;
    TraceRow row;
    row.iteration = i;
    row.seconds = rep.seconds;
    row.elapsed = elapsed;
    row.log_joint = config.record_log_joint ? sampler.state().log_joint() : std::numeric_limits<double>::quiet_NaN();
    row.acceptance_rate = rep.acceptance_rate();
    row.node_touches = rep.node_touches;
    row.skipped_dims = rep.skipped_dims;
    out.trace.push_back(row);
    if (i >= config.burn_in && (i - config.burn_in + 1) % config.thin == 0)
      out.samples.push_back({i, elapsed, sampler.state().assignments()});
    if (config.max_seconds > 0.0 && elapsed >= config.max_seconds && i + 1 < config.iterations) {
      out.stopped_by_time = true;
      break;
    }
  }
  out.total_seconds = elapsed;
  return out;
}

std::unique_ptr<Sampler> make_sampler(SamplerKind kind, LatentState state, TopDownOptions options) {
  if (kind == SamplerKind::TopDown) return std::make_unique<TopDownSampler>(std::move(state), options);
  return std::make_unique<BottomUpSampler>(std::move(state));
}

ChainResult run(SamplerKind kind, const Model& model, const DataMatrix& train, const RunConfig& config,
                TopDownOptions options) {
  check_run_config(config);
  Rng init = make_rng(config.seed, 1);
  auto sampler = make_sampler(kind, LatentState::random(model, train, init), options);
  Rng rng = make_rng(config.seed, 2);
  return run_chain(*sampler, config, rng);
}

}  // namespace bspn
