#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bspn/errors.hpp"
#include "bspn/leaves.hpp"
#include "bspn/model.hpp"
#include "bspn/rng.hpp"
#include "bspn/types.hpp"

namespace bspn {

// N x S matrix of zero-based branch choices, stored with one byte per entry
// when C_s <= 256 and two bytes otherwise.
class AssignmentMatrix {
 public:
  AssignmentMatrix() = default;
  AssignmentMatrix(std::size_t rows, std::size_t sums, std::size_t arity);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t sums() const noexcept { return sums_; }
  std::size_t arity() const noexcept { return arity_; }
  std::size_t width() const noexcept { return width_; }  // bytes per entry

  Branch get(std::size_t n, std::size_t s) const noexcept {
    const std::size_t i = n * sums_ + s;
    return width_ == 1 ? bytes_[i] : reinterpret_cast<const std::uint16_t*>(bytes_.data())[i];
  }
  void set(std::size_t n, std::size_t s, Branch b) noexcept {
    const std::size_t i = n * sums_ + s;
    if (width_ == 1)
      bytes_[i] = static_cast<std::uint8_t>(b);
    else
      reinterpret_cast<std::uint16_t*>(bytes_.data())[i] = b;
  }
  std::vector<Branch> row(std::size_t n) const;
  void set_row(std::size_t n, std::span<const Branch> z);

  // Typed row access for hot loops; T must match width().
  template <class T>
  T* row_ptr(std::size_t n) noexcept {
    return reinterpret_cast<T*>(bytes_.data()) + n * sums_;
  }
  template <class T>
  const T* row_ptr(std::size_t n) const noexcept {
    return reinterpret_cast<const T*>(bytes_.data()) + n * sums_;
  }

  std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }
  std::span<std::uint8_t> bytes() noexcept { return bytes_; }

  friend bool operator==(const AssignmentMatrix&, const AssignmentMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t sums_ = 0;
  std::size_t arity_ = 0;
  std::size_t width_ = 1;
  std::vector<std::uint8_t> bytes_;
};

// Runs f.template operator()<T>() with T the entry type of m.
template <class F>
decltype(auto) visit_width(const AssignmentMatrix& m, F&& f) {
  if (m.width() == 1) return f.template operator()<std::uint8_t>();
  return f.template operator()<std::uint16_t>();
}

struct InducedTree {
  std::vector<std::uint32_t> leaves;  // leaf index selected for each dimension
  std::vector<std::uint32_t> sums;    // in-tree sum indices, preorder
};

// Walks only the selected subtree. z holds one branch per sum index.
InducedTree resolve_induced_tree(const SpnGraph& g, std::span<const Branch> z);

// Allocation-free induced-tree walk for the samplers. Writes the selected
// leaf index of each dimension to leaves_out and returns the number of nodes
// visited.
class InducedTreeWalker {
 public:
  explicit InducedTreeWalker(const SpnGraph& g) : g_(&g) { stack_.reserve(g.node_count()); }

  template <class T>
  std::size_t walk(const T* z, std::uint32_t* leaves_out) {
    const SpnGraph& g = *g_;
    std::size_t touched = 0;
    stack_.clear();
    stack_.push_back(g.root());
    while (!stack_.empty()) {
      NodeId v = stack_.back();
      stack_.pop_back();
      for (;;) {
        ++touched;
        const NodeKind k = g.kind(v);
        if (k == NodeKind::Sum) {
          v = g.child(v, z[g.index_of(v)]);
        } else if (k == NodeKind::Product) {
          const auto ch = g.children(v);
          for (std::size_t i = 1; i < ch.size(); ++i) stack_.push_back(ch[i]);
          v = ch[0];
        } else {
          const std::uint32_t j = g.index_of(v);
          leaves_out[g.leaf_dim(j)] = j;
          break;
        }
      }
    }
    return touched;
  }

 private:
  const SpnGraph* g_;
  std::vector<NodeId> stack_;
};

struct AuditReport {
  bool ok = true;
  std::vector<std::string> problems;
};

// Assignments Z for a fixed training table X together with the statistics
// that depend on them: allocation counts N^{s,c} and per-leaf sufficient
// statistics. Holds references to the model and data, which must outlive it.
//
// A datapoint is either attached (its assignment contributes to counts and
// stats) or detached. Samplers detach one point, choose a new row, and attach
// it again. All points are attached after construction.
class LatentState {
 public:
  // Uniform random initial assignments.
  static LatentState random(const Model& model, const DataMatrix& data, Rng& rng);
  static LatentState from_assignments(const Model& model, const DataMatrix& data, AssignmentMatrix z);

  const Model& model() const noexcept { return *model_; }
  const SpnGraph& graph() const noexcept { return model_->graph; }
  const DataMatrix& data() const noexcept { return *data_; }
  std::size_t points() const noexcept { return data_->rows(); }
  std::size_t attached_count() const noexcept { return attached_count_; }
  bool attached(std::size_t n) const noexcept { return attached_[n] != 0; }

  const AssignmentMatrix& assignments() const noexcept { return z_; }
  std::span<const std::uint32_t> counts(std::uint32_t s) const noexcept {
    return {counts_.data() + s * arity_, arity_};
  }
  const SuffStats& leaf_stats(std::uint32_t j) const noexcept { return stats_[j]; }
  std::span<const std::uint32_t> induced_leaves(std::size_t n) const noexcept {
    return {leaves_.data() + n * dims_, dims_};
  }

  // Throws BookkeepingError when n is already detached.
  void detach(std::size_t n);
  // Re-attach n with its stored (unchanged) assignment.
  void reattach(std::size_t n);
  // Replace the assignment of detached point n and attach it.
  void attach(std::size_t n, std::span<const Branch> z);
  // Hot-path variant: z has the matrix entry type, leaves its resolved
  // induced leaves (one per dimension).
  template <class T>
  void attach_resolved(std::size_t n, const T* z, const std::uint32_t* leaves);

  // log p(Z | alpha) + sum_j log p(x_{L_j} | gamma_j), with W and Theta
  // integrated out. Attached points only.
  double log_joint() const;
  double log_network_factor() const;

  // Full recount from Z and X; counts must match exactly, continuous sums to
  // 1e-9 relative to the sum of magnitudes of the points involved.
  AuditReport audit() const;

  // Mutable access for samplers that write rows in place.
  AssignmentMatrix& assignments_mut() noexcept { return z_; }

 private:
  LatentState(const Model& model, const DataMatrix& data, AssignmentMatrix z);
  template <class T>
  void add_row(std::size_t n, const T* z);
  template <class T>
  void remove_row(std::size_t n, const T* z);
  void resolve_row(std::size_t n);

  const Model* model_;
  const DataMatrix* data_;
  std::size_t dims_;
  std::size_t arity_;
  AssignmentMatrix z_;
  std::vector<std::uint32_t> counts_;  // S x C_s
  std::vector<SuffStats> stats_;       // per leaf
  std::vector<std::uint32_t> leaves_;  // N x D induced leaf cache
  std::vector<std::uint8_t> attached_;
  std::size_t attached_count_ = 0;
};

template <class T>
void LatentState::add_row(std::size_t n, const T* z) {
  const std::size_t sums = z_.sums();
  std::uint32_t* c = counts_.data();
  for (std::size_t s = 0; s < sums; ++s, c += arity_) ++c[z[s]];
  const auto x = data_->row(n);
  const std::uint32_t* lv = leaves_.data() + n * dims_;
  for (std::size_t d = 0; d < dims_; ++d) add_point(stats_[lv[d]], x[d]);
}

template <class T>
void LatentState::remove_row(std::size_t n, const T* z) {
  const std::size_t sums = z_.sums();
  std::uint32_t* c = counts_.data();
  for (std::size_t s = 0; s < sums; ++s, c += arity_) {
    std::uint32_t& slot = c[z[s]];
    if (slot == 0) throw BookkeepingError("allocation count would become negative");
    --slot;
  }
  const auto x = data_->row(n);
  const std::uint32_t* lv = leaves_.data() + n * dims_;
  for (std::size_t d = 0; d < dims_; ++d) remove_point(stats_[lv[d]], x[d]);
}

template <class T>
void LatentState::attach_resolved(std::size_t n, const T* z, const std::uint32_t* leaves) {
  if (attached_[n]) throw BookkeepingError("attach of a point that is already attached");
  T* row = z_.row_ptr<T>(n);
  if (row != z) std::copy(z, z + z_.sums(), row);
  std::uint32_t* lv = leaves_.data() + n * dims_;
  if (lv != leaves) std::copy(leaves, leaves + dims_, lv);
  add_row(n, row);
  attached_[n] = 1;
  ++attached_count_;
}

}  // namespace bspn
