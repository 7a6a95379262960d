#pragma once

#include <span>
#include <vector>

#include "bspn/sampler.hpp"

namespace bspn {

struct TopDownOptions {
  // Leave out dimensions whose leaf is the same under both trees when forming
  // the acceptance ratio. Does not change the chain.
  bool skip_unchanged_dims = true;
};

// Collapsed Metropolis-within-Gibbs sampler. For every datapoint n in turn:
// detach n, draw a full candidate row from the Dirichlet-multinomial network
// factor (independently per sum node), accept it with the ratio of leaf
// predictives over the two induced trees, attach the winner.
class TopDownSampler final : public Sampler {
 public:
  explicit TopDownSampler(LatentState state, TopDownOptions options = {});

  SweepReport sweep(Rng& rng) override;
  const LatentState& state() const override { return state_; }
  LatentState& state_mut() { return state_; }
  std::string_view name() const override { return "topdown"; }

 private:
  template <class T>
  SweepReport sweep_impl(Rng& rng);

  LatentState state_;
  TopDownOptions options_;
  std::uint64_t iteration_ = 0;
  InducedTreeWalker walker_;
  std::vector<std::uint8_t> candidate_;  // S entries of the matrix entry type
  std::vector<std::uint32_t> candidate_leaves_;
};

// Candidate row for detached point n; every other point must be attached.
// Per sum node s the branch c has probability (N^{s,c} + alpha) / (N - 1 + C_s alpha),
// realized as: with probability (N-1)/(N-1 + C_s alpha) copy the branch of a
// uniformly chosen other point, otherwise draw uniformly from the prior.
std::vector<Branch> propose_network(const LatentState& state, std::size_t n, Rng& rng);

// log of the acceptance ratio for moving detached point x from the tree with
// leaves current_leaves to the tree with candidate_leaves (one leaf index per
// dimension). skipped, when given, counts the dimensions left out because both
// trees share the leaf.
double log_acceptance(const LatentState& state, std::span<const double> x, std::span<const std::uint32_t> current_leaves,
                      std::span<const std::uint32_t> candidate_leaves, bool skip_unchanged = true,
                      std::uint64_t* skipped = nullptr);

}  // namespace bspn
