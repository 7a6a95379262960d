#pragma once

#include <span>
#include <vector>

#include "bspn/params.hpp"
#include "bspn/sampler.hpp"

namespace bspn {

// Uncollapsed Gibbs baseline. Each sweep draws W and Theta from their
// conditionals given Z, then for every datapoint evaluates all V nodes and
// redraws the whole row z_n by ancestral sampling: in-tree sum nodes by
// weight times child likelihood, out-of-tree sum nodes from the weights alone.
class BottomUpSampler final : public Sampler {
 public:
  explicit BottomUpSampler(LatentState state);

  SweepReport sweep(Rng& rng) override;
  const LatentState& state() const override { return state_; }
  LatentState& state_mut() { return state_; }
  std::string_view name() const override { return "bottomup"; }

  // Parameters drawn at the start of the most recent sweep.
  const MaterializedParams& params() const noexcept { return params_; }

 private:
  template <class T>
  SweepReport sweep_impl(Rng& rng);

  LatentState state_;
  std::uint64_t iteration_ = 0;
  MaterializedParams params_;
  std::vector<double> table_;
  std::vector<std::uint8_t> in_tree_;
  std::vector<std::uint8_t> row_;
  std::vector<std::uint32_t> leaves_;
};

// Ancestral draw of a full assignment row from a node table computed by
// eval_all_nodes for one datapoint.
std::vector<Branch> ancestral_sample_z(const SpnGraph& g, const MaterializedParams& params,
                                       std::span<const double> node_table, Rng& rng);

// W ~ Dirichlet(alpha + counts) per sum node, Theta from each leaf posterior.
MaterializedParams gibbs_update_params(const LatentState& state, Rng& rng);

}  // namespace bspn
