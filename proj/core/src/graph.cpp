#include "bspn/graph.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "bspn/errors.hpp"

namespace bspn {
namespace {

std::vector<Dim> sorted_unique(std::span<const Dim> scope) {
  std::vector<Dim> v(scope.begin(), scope.end());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::string node_label(NodeId v) { return "node " + std::to_string(v); }

}  // namespace

SpnGraph::SpnGraph(std::size_t dims, std::size_t sum_outdegree, std::size_t product_outdegree,
                   std::vector<NodeSpec> nodes, NodeId root)
    : dims_(dims), sum_outdegree_(sum_outdegree), product_outdegree_(product_outdegree), root_(root) {
  const std::size_t count = nodes.size();
  if (count == 0) throw GraphError("graph has no nodes");
  if (root >= count) throw GraphError("root id " + std::to_string(root) + " out of range");

  kinds_.reserve(count);
  scope_offsets_.reserve(count + 1);
  child_offsets_.reserve(count + 1);
  for (std::size_t v = 0; v < count; ++v) {
    const NodeSpec& spec = nodes[v];
    if (spec.kind != NodeKind::Sum && spec.kind != NodeKind::Product && spec.kind != NodeKind::Leaf)
      throw GraphError(node_label(v) + ": unknown node kind");
    for (Dim d : spec.scope)
      if (d >= dims) throw GraphError(node_label(v) + ": scope dimension " + std::to_string(d) + " >= D");
    for (NodeId c : spec.children)
      if (c >= count) throw GraphError(node_label(v) + ": child id " + std::to_string(c) + " out of range");
    if (spec.kind == NodeKind::Leaf) {
      if (spec.scope.size() != 1) throw GraphError(node_label(v) + ": leaf scope must have exactly one dimension");
      if (!spec.children.empty()) throw GraphError(node_label(v) + ": leaf has children");
      if (spec.family.family == Family::Multinomial && spec.family.categories == 0)
        throw GraphError(node_label(v) + ": multinomial leaf without categories");
    }
    kinds_.push_back(spec.kind);
    scope_dims_.insert(scope_dims_.end(), spec.scope.begin(), spec.scope.end());
    scope_offsets_.push_back(static_cast<std::uint32_t>(scope_dims_.size()));
    children_.insert(children_.end(), spec.children.begin(), spec.children.end());
    child_offsets_.push_back(static_cast<std::uint32_t>(children_.size()));
  }

  // Preorder over reachable nodes; a node reached twice is only expanded once.
  std::vector<std::uint8_t> seen(count, 0);
  std::vector<std::uint32_t> parents(count, 0);
  for (NodeId c : children_) ++parents[c];
  preorder_.reserve(count);
  std::vector<NodeId> stack{root};
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    if (seen[v]) continue;
    seen[v] = 1;
    preorder_.push_back(v);
    const auto ch = children(v);
    for (auto it = ch.rbegin(); it != ch.rend(); ++it)
      if (!seen[*it]) stack.push_back(*it);
  }
  is_tree_ = preorder_.size() == count && parents[root] == 0 &&
             std::all_of(parents.begin(), parents.end(), [](std::uint32_t p) { return p <= 1; });

  payload_.assign(count, kNone);
  auto number = [&](NodeId v) {
    if (kinds_[v] == NodeKind::Sum) {
      payload_[v] = static_cast<std::uint32_t>(sum_nodes_.size());
      sum_nodes_.push_back(v);
    } else if (kinds_[v] == NodeKind::Leaf) {
      payload_[v] = static_cast<std::uint32_t>(leaf_nodes_.size());
      leaf_nodes_.push_back(v);
      leaf_dims_.push_back(nodes[v].scope.front());
      leaf_families_.push_back(nodes[v].family);
    }
  };
  for (NodeId v : preorder_) number(v);
  for (NodeId v = 0; v < count; ++v)
    if (!seen[v]) number(v);
}

SizeReport SpnGraph::size_report() const {
  SizeReport r;
  r.sums = sum_count();
  r.leaves = leaf_count();
  r.nodes = node_count();
  r.products = r.nodes - r.sums - r.leaves;

  // Breadth-first levels over the reachable part.
  std::vector<std::uint8_t> seen(node_count(), 0);
  std::vector<NodeId> level{root_};
  seen[root_] = 1;
  while (!level.empty()) {
    ++r.height;
    r.breadth = std::max<std::uint64_t>(r.breadth, level.size());
    std::vector<NodeId> next;
    for (NodeId v : level)
      for (NodeId c : children(v))
        if (!seen[c]) {
          seen[c] = 1;
          next.push_back(c);
        }
    level.swap(next);
  }
  return r;
}

LeafPolicy LeafPolicy::uniform(std::size_t dims, FamilySpec family) {
  LeafPolicy p;
  p.families_per_dim.assign(dims, std::vector<FamilySpec>{family});
  return p;
}

const FamilySpec& LeafPolicy::family_for(Dim d, std::size_t child) const {
  static const FamilySpec kGaussian{};
  if (families_per_dim.empty()) return kGaussian;
  const auto& row = families_per_dim[d];
  return row[child % row.size()];
}

SpnGraph build_balanced(std::size_t dims, std::size_t sum_outdegree, std::size_t product_outdegree,
                        const LeafPolicy& leaves) {
  if (dims < 1) throw ConfigError("build_balanced: D must be at least 1");
  if (sum_outdegree < 2) throw ConfigError("build_balanced: sum outdegree must be at least 2");
  if (product_outdegree < 2) throw ConfigError("build_balanced: product outdegree must be at least 2");
  if (!leaves.families_per_dim.empty()) {
    if (leaves.families_per_dim.size() != dims) throw ConfigError("leaf policy must list families for every dimension");
    for (const auto& row : leaves.families_per_dim)
      if (row.empty()) throw ConfigError("leaf policy has a dimension without families");
  }

  std::vector<NodeSpec> nodes;
  auto scope_of = [](Dim begin, Dim end) {
    std::vector<Dim> s(end - begin);
    std::iota(s.begin(), s.end(), begin);
    return s;
  };

  // Recursion depth is bounded by 2 log2(D) + 2.
  auto add_sum = [&](auto&& self, Dim begin, Dim end) -> NodeId {
    const auto id = static_cast<NodeId>(nodes.size());
    nodes.push_back({NodeKind::Sum, scope_of(begin, end), {}, {}});
    const Dim width = end - begin;
    for (std::size_t c = 0; c < sum_outdegree; ++c) {
      const auto child = static_cast<NodeId>(nodes.size());
      if (width == 1) {
        nodes.push_back({NodeKind::Leaf, {begin}, {}, leaves.family_for(begin, c)});
      } else {
        nodes.push_back({NodeKind::Product, scope_of(begin, end), {}, {}});
        const Dim groups = static_cast<Dim>(std::min<std::size_t>(product_outdegree, width));
        const Dim base = width / groups;
        const Dim larger = width % groups;
        Dim lo = begin;
        for (Dim g = 0; g < groups; ++g) {
          const Dim hi = lo + base + (g < larger ? 1 : 0);
          const NodeId grandchild = self(self, lo, hi);
          nodes[child].children.push_back(grandchild);
          lo = hi;
        }
      }
      nodes[id].children.push_back(child);
    }
    return id;
  };
  add_sum(add_sum, 0, static_cast<Dim>(dims));
  return SpnGraph(dims, sum_outdegree, product_outdegree, std::move(nodes), 0);
}

std::string_view violation_name(ViolationKind k) noexcept {
  switch (k) {
    case ViolationKind::RootNotSum: return "root-not-sum";
    case ViolationKind::RootScope: return "root-scope";
    case ViolationKind::Unreachable: return "unreachable";
    case ViolationKind::MultipleParents: return "multiple-parents";
    case ViolationKind::Cycle: return "cycle";
    case ViolationKind::Alternation: return "alternation";
    case ViolationKind::Incomplete: return "incomplete";
    case ViolationKind::NonDecomposable: return "non-decomposable";
    case ViolationKind::SumOutdegree: return "sum-outdegree";
    case ViolationKind::ProductOutdegree: return "product-outdegree";
    case ViolationKind::ScopeMismatch: return "scope-mismatch";
  }
  return "unknown";
}

std::vector<Violation> validate(const SpnGraph& g) {
  std::vector<Violation> out;
  auto report = [&](NodeId v, ViolationKind k, std::string msg) {
    out.push_back({v, k, node_label(v) + ": " + std::string(violation_name(k)) + ": " + std::move(msg)});
  };
  const std::size_t count = g.node_count();
  const NodeId root = g.root();

  if (g.kind(root) != NodeKind::Sum) report(root, ViolationKind::RootNotSum, "root must be a sum node");
  {
    const auto s = sorted_unique(g.scope(root));
    bool full = s.size() == g.dims();
    for (std::size_t i = 0; full && i < s.size(); ++i) full = s[i] == i;
    if (!full) report(root, ViolationKind::RootScope, "root scope must cover all D dimensions");
  }

  // Parent counts and cycle detection (iterative DFS with colors).
  std::vector<std::uint32_t> parents(count, 0);
  for (NodeId v = 0; v < count; ++v)
    for (NodeId c : g.children(v)) ++parents[c];
  enum : std::uint8_t { kWhite, kGrey, kBlack };
  std::vector<std::uint8_t> color(count, kWhite);
  std::vector<std::pair<NodeId, std::size_t>> stack{{root, 0}};
  color[root] = kGrey;
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    const auto ch = g.children(v);
    if (next == ch.size()) {
      color[v] = kBlack;
      stack.pop_back();
      continue;
    }
    const NodeId c = ch[next++];
    if (color[c] == kGrey) {
      report(c, ViolationKind::Cycle, "reached again from its own descendant " + std::to_string(v));
    } else if (color[c] == kWhite) {
      color[c] = kGrey;
      stack.emplace_back(c, 0);
    }
  }
  for (NodeId v = 0; v < count; ++v) {
    if (color[v] == kWhite) report(v, ViolationKind::Unreachable, "not reachable from the root");
    if (parents[v] > 1) report(v, ViolationKind::MultipleParents, std::to_string(parents[v]) + " parents");
  }

  std::vector<std::uint8_t> mark(g.dims(), 0);
  for (NodeId v = 0; v < count; ++v) {
    const auto ch = g.children(v);
    const auto own = sorted_unique(g.scope(v));
    switch (g.kind(v)) {
      case NodeKind::Sum: {
        if (ch.size() != g.sum_outdegree())
          report(v, ViolationKind::SumOutdegree,
                 std::to_string(ch.size()) + " children, expected " + std::to_string(g.sum_outdegree()));
        bool complete = true;
        std::vector<Dim> first;
        for (std::size_t i = 0; i < ch.size(); ++i) {
          if (g.kind(ch[i]) == NodeKind::Sum)
            report(v, ViolationKind::Alternation, "child " + std::to_string(ch[i]) + " is a sum node");
          auto s = sorted_unique(g.scope(ch[i]));
          if (i == 0)
            first = std::move(s);
          else if (s != first)
            complete = false;
        }
        if (!complete)
          report(v, ViolationKind::Incomplete, "children do not share a common scope");
        else if (!ch.empty() && first != own)
          report(v, ViolationKind::ScopeMismatch, "children scope differs from the node scope");
        break;
      }
      case NodeKind::Product: {
        if (ch.size() < 2 || ch.size() > g.product_outdegree())
          report(v, ViolationKind::ProductOutdegree,
                 std::to_string(ch.size()) + " children, expected 2.." + std::to_string(g.product_outdegree()));
        std::fill(mark.begin(), mark.end(), 0);
        bool disjoint = true;
        for (NodeId c : ch) {
          if (g.kind(c) == NodeKind::Product)
            report(v, ViolationKind::Alternation, "child " + std::to_string(c) + " is a product node");
          for (Dim d : sorted_unique(g.scope(c))) {
            if (mark[d]) disjoint = false;
            mark[d] = 1;
          }
        }
        if (!disjoint) report(v, ViolationKind::NonDecomposable, "children scopes overlap");
        std::vector<Dim> united;
        for (Dim d = 0; d < mark.size(); ++d)
          if (mark[d]) united.push_back(d);
        if (united != own) report(v, ViolationKind::ScopeMismatch, "union of children scopes differs from the node scope");
        break;
      }
      case NodeKind::Leaf: break;
    }
  }
  return out;
}

}  // namespace bspn
