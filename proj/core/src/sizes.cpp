#include <limits>
#include <string>

#include "bspn/errors.hpp"
#include "bspn/graph.hpp"

namespace bspn {
namespace {

BigInt ipow(std::uint64_t base, std::uint64_t exp) {
  BigInt r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) r *= base;
  return r;
}

std::uint64_t narrow(const BigInt& v, const char* what) {
  if (v < 0 || v > BigInt(std::numeric_limits<std::uint64_t>::max()))
    throw ConfigError(std::string("closed_form_sizes: ") + what + " does not fit in 64 bits");
  return static_cast<std::uint64_t>(v);
}

}  // namespace

ClosedFormSizes closed_form_sizes(std::size_t dims, std::size_t cs, std::size_t cp, TreeShape shape) {
  if (dims < 1 || cs < 2 || cp < 2) throw ConfigError("closed_form_sizes: need D >= 1 and outdegrees >= 2");
  ClosedFormSizes out;
  SizeReport& r = out.sizes;
  if (shape == TreeShape::Skewed && (dims - 1) % (cp - 1) != 0)
    throw ConfigError("closed_form_sizes: (D-1)/(C_p-1) must be an integer for a skewed tree");

  if (shape == TreeShape::Complete) {
    std::uint64_t k = 0;
    std::uint64_t p = 1;
    while (p < dims) {
      p *= cp;
      ++k;
    }
    if (p != dims) throw ConfigError("closed_form_sizes: log_{C_p} D must be an integer for a complete tree");
    const std::uint64_t q = cp * cs;
    const BigInt qk = ipow(q, k);
    r.sums = narrow((qk * q - 1) / (q - 1), "S");
    r.products = narrow((cs * qk - cs) / (q - 1), "P");
    r.leaves = narrow(cs * qk, "L");
    r.height = 2 * k + 2;
  } else {
    const std::uint64_t m = (dims - 1) / (cp - 1);
    const BigInt sm = ipow(cs, m + 1);
    const BigInt c = cs, p = cp;
    r.sums = narrow((p * sm + (1 - p) * c - 1) / (c - 1), "S");
    r.products = narrow((sm - c) / (c - 1), "P");
    r.leaves = narrow(((p * c - 1) * sm + (1 - p) * c * c) / (c - 1), "L");
    r.height = 2 * m + 2;
  }
  r.nodes = r.sums + r.products + r.leaves;
  // Complete trees hold every leaf on the last level; for skewed trees this is
  // the upper bound L.
  r.breadth = r.leaves;
  // (C_p^k - 1) is divisible by (C_p - 1), so the exponent is integral for both shapes.
  out.induced_trees = ipow(cs, cp * (dims - 1) / (cp - 1) + 1);
  return out;
}

BigInt count_induced_trees(const SpnGraph& g) {
  if (!g.is_tree()) throw GraphError("count_induced_trees requires a tree-structured graph");
  std::vector<BigInt> value(g.node_count());
  const auto order = g.preorder();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId v = *it;
    switch (g.kind(v)) {
      case NodeKind::Leaf: value[v] = 1; break;
      case NodeKind::Product: {
        BigInt acc = 1;
        for (NodeId c : g.children(v)) acc *= value[c];
        value[v] = std::move(acc);
        break;
      }
      case NodeKind::Sum: {
        BigInt acc = 0;
        for (NodeId c : g.children(v)) acc += value[c];
        value[v] = std::move(acc);
        break;
      }
    }
  }
  return value[g.root()];
}

}  // namespace bspn
