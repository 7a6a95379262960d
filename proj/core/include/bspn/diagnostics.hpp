#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bspn/model.hpp"
#include "bspn/samples.hpp"
#include "bspn/sampler.hpp"

namespace bspn {

struct EssResult {
  double ess = 0.0;
  bool degenerate = false;            // constant trace; ess reported as n
  bool negative_correlation = false;  // raw estimate exceeded n and was clamped
  std::size_t lags = 0;               // autocorrelation lags summed
};

// Geyer's initial monotone positive sequence estimator, clamped to (0, n].
// Throws ConfigError for traces shorter than 4.
EssResult effective_sample_size(std::span<const double> trace);

struct TimingReport {
  std::vector<double> seconds;        // per sweep
  std::vector<std::uint64_t> touches;  // per sweep
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for one sweep
  double mean_touches = 0.0;
  std::size_t points = 0;

  double touches_per_point() const noexcept { return points == 0 ? 0.0 : mean_touches / static_cast<double>(points); }
};

TimingReport timing_harness(Sampler& sampler, Rng& rng, std::size_t iterations);

// slow.mean / fast.mean.
double speedup(const TimingReport& slow, const TimingReport& fast) noexcept;

enum class TraceStatistic { TrainJointLL, HeldoutLL };

// One value per stored sample: the collapsed log p(X, Z) of the training
// data, or the mean held-out log-density under the sample's parameters
// (same draws as test_log_likelihood with the same seed).
std::vector<double> trace_statistic(TraceStatistic kind, const Model& model, const DataMatrix& train,
                                    std::span<const StoredSample> samples, const DataMatrix* heldout = nullptr,
                                    std::uint64_t seed = 0);

}  // namespace bspn
