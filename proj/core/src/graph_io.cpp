// Graph checkpoint layout (all integers little-endian):
//
//   8 bytes  magic "BSPNGRPH"
//   u32      format version (1)
//   u32      D, C_s, C_p
//   u64      S, P, L, V
//   u32      root id
//   V records, in node-id order:
//     u8   kind tag (0 sum, 1 product, 2 leaf)
//     u32  scope length, then that many u32 dimensions (zero-based)
//     u32  child count, then that many u32 child ids
//     sum:  u32 sum index, 1-based
//     leaf: u8 family tag, u32 category count
//
// Sum indices are redundant (they follow from preorder numbering) and are
// checked on load rather than trusted.

#include <string>

#include "bspn/errors.hpp"
#include "bspn/graph.hpp"
#include "bytes.hpp"

namespace bspn {
namespace {

constexpr std::string_view kMagic = "BSPNGRPH";
constexpr std::uint32_t kVersion = 1;

}  // namespace

std::vector<std::uint8_t> serialize(const SpnGraph& g) {
  detail::ByteWriter w;
  w.put_magic(kMagic);
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(g.dims()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(g.sum_outdegree()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(g.product_outdegree()));
  w.put<std::uint64_t>(g.sum_count());
  w.put<std::uint64_t>(g.product_count());
  w.put<std::uint64_t>(g.leaf_count());
  w.put<std::uint64_t>(g.node_count());
  w.put<std::uint32_t>(g.root());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    w.put<std::uint8_t>(static_cast<std::uint8_t>(g.kind(v)));
    const auto scope = g.scope(v);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(scope.size()));
    for (Dim d : scope) w.put<std::uint32_t>(d);
    const auto ch = g.children(v);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(ch.size()));
    for (NodeId c : ch) w.put<std::uint32_t>(c);
    if (g.kind(v) == NodeKind::Sum) {
      w.put<std::uint32_t>(g.index_of(v) + 1);
    } else if (g.kind(v) == NodeKind::Leaf) {
      const auto& f = g.leaf_family(g.index_of(v));
      w.put<std::uint8_t>(static_cast<std::uint8_t>(f.family));
      w.put<std::uint32_t>(f.categories);
    }
  }
  return w.take();
}

SpnGraph deserialize(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.expect_magic(kMagic);
  if (const auto version = r.get<std::uint32_t>("version"); version != kVersion)
    r.fail("unsupported graph format version " + std::to_string(version));
  const auto dims = r.get<std::uint32_t>("D");
  const auto cs = r.get<std::uint32_t>("C_s");
  const auto cp = r.get<std::uint32_t>("C_p");
  const auto sums = r.get<std::uint64_t>("S");
  const auto products = r.get<std::uint64_t>("P");
  const auto leaves = r.get<std::uint64_t>("L");
  const auto count = r.get<std::uint64_t>("V");
  if (sums + products + leaves != count) r.fail("node counts do not add up");
  // Each record needs at least 9 bytes; reject absurd counts before allocating.
  if (count > r.remaining() / 9) r.fail("node count exceeds payload size");
  const auto root = r.get<std::uint32_t>("root");

  std::vector<NodeSpec> nodes(count);
  std::vector<std::pair<std::uint32_t, std::size_t>> sum_tags;  // (node, stored index)
  std::uint64_t seen_sums = 0, seen_leaves = 0;
  for (std::uint64_t v = 0; v < count; ++v) {
    NodeSpec& n = nodes[v];
    const auto tag = r.get<std::uint8_t>("kind tag");
    if (tag > 2) r.fail("unknown node kind tag " + std::to_string(tag));
    n.kind = static_cast<NodeKind>(tag);
    const auto scope_len = r.get<std::uint32_t>("scope length");
    if (scope_len > r.remaining() / 4) r.fail("scope length exceeds payload size");
    n.scope.resize(scope_len);
    for (auto& d : n.scope) {
      d = r.get<std::uint32_t>("scope dimension");
      if (d >= dims) r.fail("scope dimension out of range");
    }
    const auto child_count = r.get<std::uint32_t>("child count");
    if (child_count > r.remaining() / 4) r.fail("child count exceeds payload size");
    n.children.resize(child_count);
    for (auto& c : n.children) {
      c = r.get<std::uint32_t>("child id");
      if (c >= count) r.fail("child id out of range");
    }
    if (n.kind == NodeKind::Sum) {
      const auto idx = r.get<std::uint32_t>("sum index");
      if (idx == 0 || idx > sums) r.fail("sum index out of range");
      sum_tags.emplace_back(static_cast<std::uint32_t>(v), idx);
      ++seen_sums;
    } else if (n.kind == NodeKind::Leaf) {
      const auto fam = r.get<std::uint8_t>("family tag");
      if (fam > 3) r.fail("unknown leaf family tag " + std::to_string(fam));
      n.family.family = static_cast<Family>(fam);
      n.family.categories = r.get<std::uint32_t>("category count");
      if (n.scope.size() != 1) r.fail("leaf scope must have exactly one dimension");
      ++seen_leaves;
    }
  }
  if (seen_sums != sums || seen_leaves != leaves) r.fail("node kinds disagree with header counts");
  if (r.remaining() != 0) throw ParseError("trailing bytes after node table", r.pos());

  SpnGraph g;
  try {
    g = SpnGraph(dims, cs, cp, std::move(nodes), root);
  } catch (const GraphError& e) {
    r.fail(e.what());
  }
  for (const auto& [v, idx] : sum_tags)
    if (g.index_of(v) + 1 != idx) r.fail("sum index of node " + std::to_string(v) + " disagrees with preorder numbering");
  return g;
}

}  // namespace bspn
