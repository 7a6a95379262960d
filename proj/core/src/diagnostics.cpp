#include "bspn/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "bspn/errors.hpp"
#include "bspn/inference.hpp"
#include "bspn/state.hpp"

namespace bspn {

EssResult effective_sample_size(std::span<const double> trace) {
  const std::size_t n = trace.size();
  if (n < 4) throw ConfigError("effective sample size needs at least 4 values");
  EssResult out;
  const double mean = std::accumulate(trace.begin(), trace.end(), 0.0) / static_cast<double>(n);
  auto autocov = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) acc += (trace[t] - mean) * (trace[t + lag] - mean);
    return acc / static_cast<double>(n);
  };
  const double c0 = autocov(0);
  if (!(c0 > 0.0) || c0 <= 1e-300 * (mean * mean + 1.0)) {
    out.ess = static_cast<double>(n);
    out.degenerate = true;
    return out;
  }

  // Sum of adjacent-lag pairs Gamma_m = rho_{2m} + rho_{2m+1}, truncated at the
  // first non-positive pair and forced non-increasing.
  double tau_half = 0.0;  // sum of Gamma_m
  double prev = std::numeric_limits<double>::infinity();
  std::size_t lag = 0;
  while (lag + 1 < n) {
    double pair = (autocov(lag) + autocov(lag + 1)) / c0;
    if (pair <= 0.0) break;
    pair = std::min(pair, prev);
    tau_half += pair;
    prev = pair;
    lag += 2;
  }
  out.lags = lag;
  const double tau = -1.0 + 2.0 * tau_half;
  const double raw = tau > 0.0 ? static_cast<double>(n) / tau : std::numeric_limits<double>::infinity();
  if (raw > static_cast<double>(n)) {
    out.ess = static_cast<double>(n);
    out.negative_correlation = true;
  } else {
    out.ess = raw;
  }
  return out;
}

TimingReport timing_harness(Sampler& sampler, Rng& rng, std::size_t iterations) {
  if (iterations < 1) throw ConfigError("timing needs at least one sweep");
  TimingReport r;
  r.points = sampler.state().points();
  for (std::size_t i = 0; i < iterations; ++i) {
    const SweepReport rep = sampler.sweep(rng);
    r.seconds.push_back(rep.seconds);
    r.touches.push_back(rep.node_touches);
  }
  const double k = static_cast<double>(iterations);
  r.mean = std::accumulate(r.seconds.begin(), r.seconds.end(), 0.0) / k;
  double ss = 0.0;
  for (double s : r.seconds) ss += (s - r.mean) * (s - r.mean);
  r.stddev = iterations > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
  double touches = 0.0;
  for (auto t : r.touches) touches += static_cast<double>(t);
  r.mean_touches = touches / k;
  return r;
}

double speedup(const TimingReport& slow, const TimingReport& fast) noexcept { return slow.mean / fast.mean; }

std::vector<double> trace_statistic(TraceStatistic kind, const Model& model, const DataMatrix& train,
                                    std::span<const StoredSample> samples, const DataMatrix* heldout,
                                    std::uint64_t seed) {
  if (kind == TraceStatistic::HeldoutLL) {
    if (!heldout) throw ConfigError("held-out statistic needs held-out data");
    return test_log_likelihood(model, train, samples, *heldout, seed).per_sample;
  }
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(LatentState::from_assignments(model, train, s.z).log_joint());
  return out;
}

}  // namespace bspn
