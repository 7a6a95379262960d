#include "bspn/bottomup.hpp"

#include <chrono>
#include <cmath>

#include "bspn/errors.hpp"
#include "bspn/evaluate.hpp"
#include "bspn/inference.hpp"

namespace bspn {
namespace {

// Draws a branch with probabilities exp(logp[c] - norm).
std::size_t draw_log_categorical(std::span<const double> lw, std::span<const NodeId> ch, std::span<const double> table,
                                 double norm, Rng& rng) {
  double u = uniform01(rng);
  for (std::size_t c = 0; c + 1 < ch.size(); ++c) {
    u -= std::exp(lw[c] + table[ch[c]] - norm);
    if (u < 0.0) return c;
  }
  return ch.size() - 1;
}

std::size_t draw_categorical(std::span<const double> w, Rng& rng) {
  double u = uniform01(rng);
  for (std::size_t c = 0; c + 1 < w.size(); ++c) {
    u -= w[c];
    if (u < 0.0) return c;
  }
  return w.size() - 1;
}

// Writes one branch per sum index to row and, for in-tree leaves, the leaf
// index per dimension to leaves.
template <class T>
void ancestral_into(const SpnGraph& g, const MaterializedParams& params, std::span<const double> table, Rng& rng,
                    std::vector<std::uint8_t>& in_tree, T* row, std::uint32_t* leaves) {
  in_tree.assign(g.node_count(), 0);
  in_tree[g.root()] = 1;
  for (NodeId v : g.preorder()) {
    const auto ch = g.children(v);
    switch (g.kind(v)) {
      case NodeKind::Sum: {
        const std::uint32_t s = g.index_of(v);
        std::size_t c;
        if (in_tree[v]) {
          c = draw_log_categorical(params.log_weights_of(s), ch, table, table[v], rng);
          in_tree[ch[c]] = 1;
        } else {
          c = draw_categorical(params.weights_of(s), rng);
        }
        row[s] = static_cast<T>(c);
        break;
      }
      case NodeKind::Product:
        if (in_tree[v])
          for (NodeId c : ch) in_tree[c] = 1;
        break;
      case NodeKind::Leaf:
        if (in_tree[v]) {
          const std::uint32_t j = g.index_of(v);
          leaves[g.leaf_dim(j)] = j;
        }
        break;
    }
  }
}

}  // namespace

std::vector<Branch> ancestral_sample_z(const SpnGraph& g, const MaterializedParams& params,
                                       std::span<const double> node_table, Rng& rng) {
  if (!params.matches(g)) throw NotMaterializedError("parameters were not materialized for this graph");
  if (node_table.size() != g.node_count()) throw ConfigError("node table size must equal the node count");
  std::vector<Branch> row(g.sum_count());
  std::vector<std::uint32_t> leaves(g.dims());
  std::vector<std::uint8_t> in_tree;
  ancestral_into(g, params, node_table, rng, in_tree, row.data(), leaves.data());
  return row;
}

MaterializedParams gibbs_update_params(const LatentState& state, Rng& rng) { return materialize(state, rng); }

BottomUpSampler::BottomUpSampler(LatentState state) : state_(std::move(state)) {
  if (state_.attached_count() != state_.points()) throw BookkeepingError("sampler requires a fully attached state");
  const SpnGraph& g = state_.graph();
  table_.resize(g.node_count());
  row_.resize(g.sum_count() * state_.assignments().width());
  leaves_.resize(g.dims());
}

template <class T>
SweepReport BottomUpSampler::sweep_impl(Rng& rng) {
  const auto start = std::chrono::steady_clock::now();
  SweepReport rep;
  rep.iteration = iteration_++;
  const SpnGraph& g = state_.graph();
  params_ = materialize(state_, rng);
  T* row = reinterpret_cast<T*>(row_.data());
  for (std::size_t n = 0; n < state_.points(); ++n) {
    eval_all_nodes(g, params_, state_.data().row(n), table_);
    rep.node_touches += g.node_count();
    ancestral_into(g, params_, table_, rng, in_tree_, row, leaves_.data());
    state_.detach(n);
    state_.attach_resolved(n, row, leaves_.data());
  }
  rep.proposals = state_.points();
  rep.accepted = state_.points();
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

SweepReport BottomUpSampler::sweep(Rng& rng) {
  return visit_width(state_.assignments(), [&]<class T>() { return sweep_impl<T>(rng); });
}

}  // namespace bspn
