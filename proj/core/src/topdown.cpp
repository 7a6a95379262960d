#include "bspn/topdown.hpp"

#include <chrono>
#include <cmath>

#include "bspn/errors.hpp"

namespace bspn {
namespace {

// Shared by the public proposal function and the sampler so both consume the
// generator identically.
template <class T>
void propose_into(const AssignmentMatrix& z, std::size_t n, std::size_t arity, double alpha, Rng& rng, T* out) {
  const std::size_t sums = z.sums();
  const std::size_t others = z.rows() - 1;
  const double pool = static_cast<double>(others);
  const double total = pool + static_cast<double>(arity) * alpha;
  const T* base = z.row_ptr<T>(0);
  for (std::size_t s = 0; s < sums; ++s) {
    const double u = uniform01(rng) * total;
    if (u < pool) {
      std::size_t m = static_cast<std::size_t>(u);
      if (m >= n) ++m;
      out[s] = base[m * sums + s];
    } else {
      std::size_t c = static_cast<std::size_t>((u - pool) / alpha);
      out[s] = static_cast<T>(c < arity ? c : arity - 1);
    }
  }
}

void require_single_detached(const LatentState& state, std::size_t n) {
  if (state.attached(n) || state.attached_count() + 1 != state.points())
    throw BookkeepingError("proposal requires point n to be the only detached point");
}

}  // namespace

std::vector<Branch> propose_network(const LatentState& state, std::size_t n, Rng& rng) {
  require_single_detached(state, n);
  const auto& z = state.assignments();
  return visit_width(z, [&]<class T>() {
    std::vector<T> row(z.sums());
    propose_into(z, n, z.arity(), state.model().alpha, rng, row.data());
    return std::vector<Branch>(row.begin(), row.end());
  });
}

double log_acceptance(const LatentState& state, std::span<const double> x, std::span<const std::uint32_t> current,
                      std::span<const std::uint32_t> candidate, bool skip_unchanged, std::uint64_t* skipped) {
  const auto& hyper = state.model().leaf_hyper;
  double log_a = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    const std::uint32_t jc = candidate[d];
    const std::uint32_t jb = current[d];
    if (jc == jb && skip_unchanged) {
      if (skipped) ++*skipped;
      continue;
    }
    log_a += log_predictive(hyper[jc], state.leaf_stats(jc), x[d]) - log_predictive(hyper[jb], state.leaf_stats(jb), x[d]);
  }
  return log_a;
}

TopDownSampler::TopDownSampler(LatentState state, TopDownOptions options)
    : state_(std::move(state)), options_(options), walker_(state_.graph()) {
  if (state_.attached_count() != state_.points()) throw BookkeepingError("sampler requires a fully attached state");
  candidate_.resize(state_.graph().sum_count() * state_.assignments().width());
  candidate_leaves_.resize(state_.graph().dims());
}

template <class T>
SweepReport TopDownSampler::sweep_impl(Rng& rng) {
  const auto start = std::chrono::steady_clock::now();
  SweepReport rep;
  rep.iteration = iteration_++;
  const auto& z = state_.assignments();
  const std::size_t points = state_.points();
  const std::size_t sums = z.sums();
  const std::size_t arity = z.arity();
  const double alpha = state_.model().alpha;
  T* cand = reinterpret_cast<T*>(candidate_.data());
  std::uint32_t* cand_leaves = candidate_leaves_.data();

  for (std::size_t n = 0; n < points; ++n) {
    state_.detach(n);
    propose_into(z, n, arity, alpha, rng, cand);
    rep.node_touches += sums + walker_.walk(cand, cand_leaves);
    const auto current = state_.induced_leaves(n);
    const double log_a = log_acceptance(state_, state_.data().row(n), current, {cand_leaves, current.size()},
                                        options_.skip_unchanged_dims, &rep.skipped_dims);
    const bool accept = log_a >= 0.0 || std::log(uniform01(rng)) < log_a;
    if (accept) {
      state_.attach_resolved(n, cand, cand_leaves);
      ++rep.accepted;
    } else {
      state_.reattach(n);
    }
  }
  rep.proposals = points;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

SweepReport TopDownSampler::sweep(Rng& rng) {
  return visit_width(state_.assignments(), [&]<class T>() { return sweep_impl<T>(rng); });
}

}  // namespace bspn
