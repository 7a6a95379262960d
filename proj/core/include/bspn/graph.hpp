#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bspn/family.hpp"
#include "bspn/types.hpp"

namespace bspn {

using BigInt = boost::multiprecision::cpp_int;

enum class NodeKind : std::uint8_t { Sum = 0, Product = 1, Leaf = 2 };

// Construction input for one node. Dimensions are zero-based.
struct NodeSpec {
  NodeKind kind = NodeKind::Leaf;
  std::vector<Dim> scope;
  std::vector<NodeId> children;
  FamilySpec family;  // Leaf only
};

struct SizeReport {
  std::uint64_t sums = 0;      // S
  std::uint64_t products = 0;  // P
  std::uint64_t leaves = 0;    // L
  std::uint64_t nodes = 0;     // V = S + P + L
  std::uint64_t height = 0;    // nodes on the longest root-to-leaf path
  std::uint64_t breadth = 0;   // most nodes found at one depth

  friend bool operator==(const SizeReport&, const SizeReport&) = default;
};

// Immutable rooted SPN. Node storage is compressed (CSR) so that top-down and
// bottom-up traversals touch contiguous arrays.
//
// The constructor only rejects inputs that cannot be indexed (dangling child
// ids, leaves without exactly one dimension, dimensions >= D). Structural
// constraints such as completeness and decomposability are reported by
// validate(); samplers and evaluation additionally require is_tree().
//
// Sum nodes are numbered 0..S-1 and leaves 0..L-1 in preorder from the root,
// so for the graphs produced by build_balanced parents always precede their
// children in both numberings.
class SpnGraph {
 public:
  SpnGraph() = default;
  SpnGraph(std::size_t dims, std::size_t sum_outdegree, std::size_t product_outdegree, std::vector<NodeSpec> nodes,
           NodeId root);

  std::size_t dims() const noexcept { return dims_; }
  std::size_t sum_outdegree() const noexcept { return sum_outdegree_; }
  std::size_t product_outdegree() const noexcept { return product_outdegree_; }
  std::size_t node_count() const noexcept { return kinds_.size(); }
  std::size_t sum_count() const noexcept { return sum_nodes_.size(); }
  std::size_t product_count() const noexcept { return node_count() - sum_count() - leaf_count(); }
  std::size_t leaf_count() const noexcept { return leaf_nodes_.size(); }
  NodeId root() const noexcept { return root_; }

  NodeKind kind(NodeId v) const noexcept { return kinds_[v]; }
  std::span<const Dim> scope(NodeId v) const noexcept {
    return {scope_dims_.data() + scope_offsets_[v], scope_offsets_[v + 1] - scope_offsets_[v]};
  }
  std::span<const NodeId> children(NodeId v) const noexcept {
    return {children_.data() + child_offsets_[v], child_offsets_[v + 1] - child_offsets_[v]};
  }
  NodeId child(NodeId v, std::size_t c) const noexcept { return children_[child_offsets_[v] + c]; }
  // Sum index for sum nodes, leaf index for leaves, kNone for products.
  std::uint32_t index_of(NodeId v) const noexcept { return payload_[v]; }

  NodeId sum_node(std::uint32_t s) const noexcept { return sum_nodes_[s]; }
  NodeId leaf_node(std::uint32_t j) const noexcept { return leaf_nodes_[j]; }
  Dim leaf_dim(std::uint32_t j) const noexcept { return leaf_dims_[j]; }
  const FamilySpec& leaf_family(std::uint32_t j) const noexcept { return leaf_families_[j]; }

  // Nodes reachable from the root, parents before children.
  std::span<const NodeId> preorder() const noexcept { return preorder_; }
  // Every node reachable from the root exactly once (no sharing, no cycles).
  bool is_tree() const noexcept { return is_tree_; }

  SizeReport size_report() const;

  friend bool operator==(const SpnGraph&, const SpnGraph&) = default;

 private:
  std::size_t dims_ = 0;
  std::size_t sum_outdegree_ = 0;
  std::size_t product_outdegree_ = 0;
  NodeId root_ = 0;
  std::vector<NodeKind> kinds_;
  std::vector<std::uint32_t> scope_offsets_{0};
  std::vector<Dim> scope_dims_;
  std::vector<std::uint32_t> child_offsets_{0};
  std::vector<NodeId> children_;
  std::vector<std::uint32_t> payload_;
  std::vector<NodeId> sum_nodes_;
  std::vector<NodeId> leaf_nodes_;
  std::vector<Dim> leaf_dims_;
  std::vector<FamilySpec> leaf_families_;
  std::vector<NodeId> preorder_;
  bool is_tree_ = false;
};

// Leaf family assignment for build_balanced: the C_s leaf children of the sum
// node over dimension d receive families_per_dim[d] round-robin. An empty
// policy means "Gaussian everywhere"; otherwise it must have D non-empty rows.
struct LeafPolicy {
  std::vector<std::vector<FamilySpec>> families_per_dim;

  static LeafPolicy uniform(std::size_t dims, FamilySpec family);
  const FamilySpec& family_for(Dim d, std::size_t child) const;
};

// Balanced tree construction. A sum node over a scope of size d has C_s
// children: leaves when d == 1, otherwise product nodes splitting the scope
// into min(C_p, d) contiguous groups (larger groups first), each group rooted
// by a new sum node. Throws ConfigError for D < 1 or outdegrees < 2.
SpnGraph build_balanced(std::size_t dims, std::size_t sum_outdegree, std::size_t product_outdegree,
                        const LeafPolicy& leaves = {});

enum class ViolationKind {
  RootNotSum,
  RootScope,
  Unreachable,
  MultipleParents,
  Cycle,
  Alternation,
  Incomplete,
  NonDecomposable,
  SumOutdegree,
  ProductOutdegree,
  ScopeMismatch,
};

struct Violation {
  NodeId node = 0;
  ViolationKind kind = ViolationKind::Incomplete;
  std::string message;
};

std::string_view violation_name(ViolationKind k) noexcept;

// Empty iff every structural invariant holds.
std::vector<Violation> validate(const SpnGraph& g);

enum class TreeShape { Complete, Skewed };

struct ClosedFormSizes {
  SizeReport sizes;
  BigInt induced_trees;
};

// Exact integer evaluation of the maximum-size formulas for complete trees
// (log_{C_p} D integral) and maximally skewed trees ((D-1)/(C_p-1) integral).
// Throws ConfigError when the shape's divisibility precondition fails.
ClosedFormSizes closed_form_sizes(std::size_t dims, std::size_t sum_outdegree, std::size_t product_outdegree,
                                  TreeShape shape);

// Leaf -> 1, product -> product of children, sum -> sum of children.
// Requires is_tree().
BigInt count_induced_trees(const SpnGraph& g);

// Versioned little-endian binary form; layout documented in graph_io.cpp.
std::vector<std::uint8_t> serialize(const SpnGraph& g);
// Throws ParseError with the byte offset of the first malformed field.
SpnGraph deserialize(std::span<const std::uint8_t> bytes);

}  // namespace bspn
