#include "bspn/tuning.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "bspn/errors.hpp"
#include "bspn/inference.hpp"

namespace bspn {

void check_ratios(const SubsampleRatios& r, std::size_t dims) {
  if (r.r.size() != dims) throw ConfigError("ratio vector must have D entries");
  for (double v : r.r)
    if (!(v > 0.0 && v <= 1.0)) throw ConfigError("subsampling ratios must lie in (0, 1]");
}

std::vector<Hyperparams> assign_leaf_hyperparams(const SpnGraph& g, const DataMatrix& train,
                                                 const SubsampleRatios& ratios, const PriorDefaults& defaults,
                                                 Rng& rng) {
  if (train.rows() == 0) throw ConfigError("training data is empty");
  if (train.cols() != g.dims()) throw ConfigError("training data width differs from the graph's D");
  check_ratios(ratios, g.dims());
  const std::size_t n = train.rows();
  std::vector<std::vector<double>> columns(g.dims());
  for (std::size_t d = 0; d < g.dims(); ++d) columns[d] = train.column(d);

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::size_t> picked;
  std::vector<double> values;
  // Full-column fits cached per (dimension, family).
  std::vector<std::vector<std::pair<FamilySpec, Hyperparams>>> full(g.dims());

  std::vector<Hyperparams> out;
  out.reserve(g.leaf_count());
  for (std::uint32_t j = 0; j < g.leaf_count(); ++j) {
    const Dim d = g.leaf_dim(j);
    const FamilySpec& f = g.leaf_family(j);
    const double r = ratios.r[d];
    if (r >= 1.0) {
      auto& cache = full[d];
      auto it = std::find_if(cache.begin(), cache.end(), [&](const auto& e) { return e.first == f; });
      if (it == cache.end()) {
        cache.emplace_back(f, empirical_bayes_fit(f, columns[d], defaults));
        it = cache.end() - 1;
      }
      out.push_back(it->second);
      continue;
    }
    // The small slack keeps r = k/N from rounding up to k + 1.
    const double want = std::ceil(r * static_cast<double>(n) * (1.0 - 1e-12));
    const std::size_t size = std::clamp<std::size_t>(static_cast<std::size_t>(want), 1, n);
    picked.clear();
    std::sample(all.begin(), all.end(), std::back_inserter(picked), size, rng);
    values.clear();
    for (std::size_t i : picked) values.push_back(columns[d][i]);
    out.push_back(empirical_bayes_fit(f, values, defaults));
  }
  return out;
}

RatioProposer log_uniform_proposer(double r_min) {
  if (!(r_min > 0.0 && r_min <= 1.0)) throw ConfigError("r_min must lie in (0, 1]");
  return [r_min](std::size_t, std::size_t dims, Rng& rng) {
    SubsampleRatios r;
    r.r.resize(dims);
    const double lo = std::log(r_min);
    for (double& v : r.r) v = std::min(1.0, std::exp(lo - lo * uniform01(rng)));
    return r;
  };
}

namespace {

TuneTrial run_trial(std::size_t index, const SpnGraph& g, const DataMatrix& train, const DataMatrix& val,
                    const TuneConfig& config, const RatioProposer& proposer, std::vector<Hyperparams>& hyper_out) {
  const auto start = std::chrono::steady_clock::now();
  TuneTrial t;
  t.index = index;
  t.seed = mix64(config.seed ^ mix64(index + 1));
  Rng proposal_rng = make_rng(t.seed, 0);
  t.ratios = index == 0 ? SubsampleRatios::ones(g.dims()) : proposer(index, g.dims(), proposal_rng);
  check_ratios(t.ratios, g.dims());
  Rng assign_rng = make_rng(t.seed, 1);
  Model model{g, assign_leaf_hyperparams(g, train, t.ratios, config.defaults, assign_rng), config.alpha};
  RunConfig run = config.run;
  run.seed = t.seed;
  const ChainResult chain = bspn::run(config.sampler, model, train, run);
  t.score = test_log_likelihood(model, train, chain.samples, val, t.seed).posterior_mean;
  if (std::isnan(t.score)) t.score = -std::numeric_limits<double>::infinity();
  hyper_out = std::move(model.leaf_hyper);
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return t;
}

}  // namespace

TuneResult search_ratios(const SpnGraph& g, const DataMatrix& train, const DataMatrix& val, const TuneConfig& config) {
  if (config.trials < 1) throw ConfigError("tuning budget must be at least one trial");
  if (val.rows() == 0) throw ConfigError("validation set is empty");
  check_run_config(config.run);
  const RatioProposer proposer = config.proposer ? config.proposer : log_uniform_proposer(config.r_min);

  TuneResult result;
  result.trials.resize(config.trials);
  std::vector<std::vector<Hyperparams>> hyper(config.trials);
  std::vector<std::exception_ptr> errors(config.trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < config.trials; i = next++) {
      try {
        result.trials[i] = run_trial(i, g, train, val, config, proposer, hyper[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(config.jobs, static_cast<unsigned>(config.trials)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  // Ties keep the earliest trial, so the baseline wins over equal scores.
  for (std::size_t i = 1; i < config.trials; ++i)
    if (result.trials[i].score > result.trials[result.best_index].score) result.best_index = i;
  result.best = result.trials[result.best_index].ratios;
  result.best_hyper = std::move(hyper[result.best_index]);
  return result;
}

}  // namespace bspn
