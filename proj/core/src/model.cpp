#include "bspn/model.hpp"

#include <cmath>
#include <string>

#include "bspn/errors.hpp"
#include "bytes.hpp"

namespace bspn {
namespace {

constexpr std::string_view kMagic = "BSPNMODL";
constexpr std::uint32_t kVersion = 1;

}  // namespace

Model Model::with_defaults(SpnGraph g, double alpha, const PriorDefaults& defaults) {
  Model m;
  m.leaf_hyper.reserve(g.leaf_count());
  for (std::uint32_t j = 0; j < g.leaf_count(); ++j) m.leaf_hyper.push_back(default_hyperparams(g.leaf_family(j), defaults));
  m.graph = std::move(g);
  m.alpha = alpha;
  return m;
}

void check_model(const Model& m) {
  if (!m.graph.is_tree()) throw ConfigError("model graph must be a tree");
  if (!(m.alpha > 0.0) || !std::isfinite(m.alpha)) throw ConfigError("alpha must be positive and finite");
  if (m.leaf_hyper.size() != m.graph.leaf_count())
    throw ConfigError("model has " + std::to_string(m.leaf_hyper.size()) + " leaf priors for " +
                      std::to_string(m.graph.leaf_count()) + " leaves");
  for (std::uint32_t j = 0; j < m.leaf_hyper.size(); ++j) {
    const auto& h = m.leaf_hyper[j];
    const auto& f = m.graph.leaf_family(j);
    if (family_of(h) != f.family) throw ConfigError("leaf " + std::to_string(j) + ": prior family mismatch");
    if (const auto* mp = std::get_if<MultinomialPrior>(&h); mp && mp->alpha.size() != f.categories)
      throw ConfigError("leaf " + std::to_string(j) + ": Dirichlet prior length differs from category count");
    check_hyperparams(h);
  }
}

std::vector<std::uint8_t> serialize_model(const Model& m) {
  detail::ByteWriter w;
  w.put_magic(kMagic);
  w.put<std::uint32_t>(kVersion);
  const auto g = serialize(m.graph);
  w.put<std::uint64_t>(g.size());
  w.put_bytes(g);
  w.put<double>(m.alpha);
  w.put<std::uint64_t>(m.leaf_hyper.size());
  for (const auto& h : m.leaf_hyper) {
    w.put<std::uint8_t>(static_cast<std::uint8_t>(family_of(h)));
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, GaussianPrior>) {
            w.put(p.mu0);
            w.put(p.rho0);
            w.put(p.a0);
            w.put(p.b0);
          } else if constexpr (std::is_same_v<T, MultinomialPrior>) {
            w.put<std::uint32_t>(static_cast<std::uint32_t>(p.alpha.size()));
            for (double a : p.alpha) w.put(a);
          } else {
            w.put(p.shape);
            w.put(p.rate);
          }
        },
        h);
  }
  return w.take();
}

Model deserialize_model(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.expect_magic(kMagic);
  if (const auto v = r.get<std::uint32_t>("version"); v != kVersion)
    r.fail("unsupported model format version " + std::to_string(v));
  const auto glen = r.get<std::uint64_t>("graph length");
  if (glen > r.remaining()) r.fail("graph length exceeds payload size");
  const std::size_t graph_at = r.pos();
  Model m;
  try {
    m.graph = deserialize(r.get_bytes(glen, "graph"));
  } catch (const ParseError& e) {
    throw ParseError(std::string("embedded graph: ") + e.what(), graph_at + e.offset());
  }
  m.alpha = r.get<double>("alpha");
  const auto count = r.get<std::uint64_t>("leaf prior count");
  if (count != m.graph.leaf_count()) r.fail("leaf prior count differs from the graph's leaf count");
  m.leaf_hyper.reserve(count);
  for (std::uint64_t j = 0; j < count; ++j) {
    const auto tag = r.get<std::uint8_t>("prior family tag");
    switch (tag) {
      case 0: {
        GaussianPrior p;
        p.mu0 = r.get<double>("mu0");
        p.rho0 = r.get<double>("rho0");
        p.a0 = r.get<double>("a0");
        p.b0 = r.get<double>("b0");
        m.leaf_hyper.emplace_back(p);
        break;
      }
      case 1:
      case 2: {
        const double shape = r.get<double>("shape");
        const double rate = r.get<double>("rate");
        if (tag == 1)
          m.leaf_hyper.emplace_back(ExponentialPrior{shape, rate});
        else
          m.leaf_hyper.emplace_back(PoissonPrior{shape, rate});
        break;
      }
      case 3: {
        const auto k = r.get<std::uint32_t>("category count");
        if (k > r.remaining() / 8) r.fail("category count exceeds payload size");
        MultinomialPrior p;
        p.alpha.resize(k);
        for (auto& a : p.alpha) a = r.get<double>("concentration");
        m.leaf_hyper.emplace_back(std::move(p));
        break;
      }
      default: r.fail("unknown prior family tag " + std::to_string(tag));
    }
  }
  if (r.remaining() != 0) throw ParseError("trailing bytes after leaf priors", r.pos());
  try {
    check_model(m);
  } catch (const ConfigError& e) {
    r.fail(e.what());
  }
  return m;
}

}  // namespace bspn
