#include "bspn/state.hpp"

#include <cmath>
#include <string>

namespace bspn {

AssignmentMatrix::AssignmentMatrix(std::size_t rows, std::size_t sums, std::size_t arity)
    : rows_(rows), sums_(sums), arity_(arity), width_(arity <= 256 ? 1 : 2) {
  if (arity < 1 || arity > 65536) throw ConfigError("assignment arity must be in 1..65536");
  bytes_.assign(rows * sums * width_, 0);
}

std::vector<Branch> AssignmentMatrix::row(std::size_t n) const {
  std::vector<Branch> out(sums_);
  for (std::size_t s = 0; s < sums_; ++s) out[s] = get(n, s);
  return out;
}

void AssignmentMatrix::set_row(std::size_t n, std::span<const Branch> z) {
  if (z.size() != sums_) throw ConfigError("assignment row length must equal S");
  for (std::size_t s = 0; s < sums_; ++s) {
    if (z[s] >= arity_) throw ConfigError("assignment entry out of range");
    set(n, s, z[s]);
  }
}

InducedTree resolve_induced_tree(const SpnGraph& g, std::span<const Branch> z) {
  if (z.size() != g.sum_count()) throw ConfigError("assignment row length must equal S");
  InducedTree t;
  t.leaves.assign(g.dims(), kNone);
  std::vector<NodeId> stack{g.root()};
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    switch (g.kind(v)) {
      case NodeKind::Sum: {
        const std::uint32_t s = g.index_of(v);
        if (z[s] >= g.children(v).size()) throw ConfigError("assignment entry out of range");
        t.sums.push_back(s);
        stack.push_back(g.child(v, z[s]));
        break;
      }
      case NodeKind::Product: {
        const auto ch = g.children(v);
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
        break;
      }
      case NodeKind::Leaf: {
        const std::uint32_t j = g.index_of(v);
        t.leaves[g.leaf_dim(j)] = j;
        break;
      }
    }
  }
  return t;
}

LatentState::LatentState(const Model& model, const DataMatrix& data, AssignmentMatrix z)
    : model_(&model),
      data_(&data),
      dims_(model.graph.dims()),
      arity_(model.graph.sum_outdegree()),
      z_(std::move(z)) {
  check_model(model);
  const SpnGraph& g = model.graph;
  if (data.cols() != dims_)
    throw ConfigError("data has " + std::to_string(data.cols()) + " columns, model expects " + std::to_string(dims_));
  if (z_.rows() != data.rows() || z_.sums() != g.sum_count() || z_.arity() != arity_)
    throw ConfigError("assignment matrix shape does not match data and graph");

  // Each training value must be in the support of every family used on its column.
  std::vector<std::vector<FamilySpec>> families(dims_);
  for (std::uint32_t j = 0; j < g.leaf_count(); ++j) {
    auto& f = families[g.leaf_dim(j)];
    if (std::find(f.begin(), f.end(), g.leaf_family(j)) == f.end()) f.push_back(g.leaf_family(j));
  }
  for (std::size_t n = 0; n < data.rows(); ++n)
    for (std::size_t d = 0; d < dims_; ++d) {
      const double x = data(n, d);
      if (is_missing(x)) throw DataError("training data must not contain missing values", n + 1, d + 1);
      for (const auto& f : families[d])
        if (!in_support(f, x))
          throw SupportError("value " + std::to_string(x) + " at row " + std::to_string(n + 1) + ", column " +
                             std::to_string(d + 1) + " is outside the support of " +
                             std::string(family_name(f.family)));
    }
  for (std::size_t n = 0; n < z_.rows(); ++n)
    for (std::size_t s = 0; s < z_.sums(); ++s)
      if (z_.get(n, s) >= arity_) throw ConfigError("assignment entry out of range");

  counts_.assign(g.sum_count() * arity_, 0);
  stats_.reserve(g.leaf_count());
  for (std::uint32_t j = 0; j < g.leaf_count(); ++j) stats_.push_back(SuffStats::empty(g.leaf_family(j)));
  leaves_.assign(data.rows() * dims_, 0);
  attached_.assign(data.rows(), 1);
  attached_count_ = data.rows();
  InducedTreeWalker walker(g);
  visit_width(z_, [&]<class T>() {
    for (std::size_t n = 0; n < data.rows(); ++n) {
      const T* row = z_.row_ptr<T>(n);
      walker.walk(row, leaves_.data() + n * dims_);
      add_row(n, row);
    }
  });
}

LatentState LatentState::random(const Model& model, const DataMatrix& data, Rng& rng) {
  const std::size_t arity = model.graph.sum_outdegree();
  AssignmentMatrix z(data.rows(), model.graph.sum_count(), arity);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(arity - 1));
  for (std::size_t n = 0; n < z.rows(); ++n)
    for (std::size_t s = 0; s < z.sums(); ++s) z.set(n, s, static_cast<Branch>(pick(rng)));
  return LatentState(model, data, std::move(z));
}

LatentState LatentState::from_assignments(const Model& model, const DataMatrix& data, AssignmentMatrix z) {
  return LatentState(model, data, std::move(z));
}

void LatentState::detach(std::size_t n) {
  if (!attached_[n]) throw BookkeepingError("detach of point " + std::to_string(n) + " which is not attached");
  visit_width(z_, [&]<class T>() { remove_row(n, z_.row_ptr<T>(n)); });
  attached_[n] = 0;
  --attached_count_;
}

void LatentState::reattach(std::size_t n) {
  if (attached_[n]) throw BookkeepingError("attach of point " + std::to_string(n) + " which is already attached");
  visit_width(z_, [&]<class T>() { add_row(n, z_.row_ptr<T>(n)); });
  attached_[n] = 1;
  ++attached_count_;
}

void LatentState::resolve_row(std::size_t n) {
  InducedTreeWalker walker(graph());
  visit_width(z_, [&]<class T>() { walker.walk(z_.row_ptr<T>(n), leaves_.data() + n * dims_); });
}

void LatentState::attach(std::size_t n, std::span<const Branch> z) {
  if (attached_[n]) throw BookkeepingError("attach of point " + std::to_string(n) + " which is already attached");
  z_.set_row(n, z);
  resolve_row(n);
  reattach(n);
}

double LatentState::log_network_factor() const {
  const double a = model_->alpha;
  const double c = static_cast<double>(arity_);
  const double n = static_cast<double>(attached_count_);
  const double per_sum = std::lgamma(c * a) - std::lgamma(n + c * a) - c * std::lgamma(a);
  double acc = 0.0;
  for (std::size_t s = 0; s < z_.sums(); ++s) {
    acc += per_sum;
    for (std::uint32_t k : counts(static_cast<std::uint32_t>(s))) acc += std::lgamma(k + a);
  }
  return acc;
}

double LatentState::log_joint() const {
  double acc = log_network_factor();
  for (std::size_t j = 0; j < stats_.size(); ++j) acc += log_marginal_likelihood(model_->leaf_hyper[j], stats_[j]);
  return acc;
}

AuditReport LatentState::audit() const {
  AuditReport rep;
  auto problem = [&](std::string msg) {
    rep.ok = false;
    if (rep.problems.size() < 50) rep.problems.push_back(std::move(msg));
  };
  const SpnGraph& g = graph();
  std::vector<std::uint32_t> counts(counts_.size(), 0);
  std::vector<SuffStats> stats;
  std::vector<double> magnitude(g.leaf_count(), 0.0), magnitude_sq(g.leaf_count(), 0.0);
  for (std::uint32_t j = 0; j < g.leaf_count(); ++j) stats.push_back(SuffStats::empty(g.leaf_family(j)));
  std::size_t attached = 0;
  for (std::size_t n = 0; n < points(); ++n) {
    const auto z = z_.row(n);
    const InducedTree t = resolve_induced_tree(g, z);
    const auto cached = induced_leaves(n);
    if (!std::equal(t.leaves.begin(), t.leaves.end(), cached.begin()))
      problem("point " + std::to_string(n) + ": cached induced leaves are stale");
    if (!attached_[n]) continue;
    ++attached;
    for (std::size_t s = 0; s < z.size(); ++s) ++counts[s * arity_ + z[s]];
    for (std::size_t d = 0; d < dims_; ++d) {
      const double x = (*data_)(n, d);
      add_point(stats[t.leaves[d]], x);
      magnitude[t.leaves[d]] += std::abs(x);
      magnitude_sq[t.leaves[d]] += x * x;
    }
  }
  if (attached != attached_count_) problem("attached point count is stale");
  for (std::size_t s = 0; s < z_.sums(); ++s) {
    std::uint64_t total = 0;
    for (std::size_t c = 0; c < arity_; ++c) {
      const std::size_t i = s * arity_ + c;
      total += counts_[i];
      if (counts[i] != counts_[i])
        problem("sum " + std::to_string(s) + " branch " + std::to_string(c) + ": count " + std::to_string(counts_[i]) +
                ", recount " + std::to_string(counts[i]));
    }
    if (total != attached_count_) problem("sum " + std::to_string(s) + ": counts do not add up to N");
  }
  auto close = [](double a, double b, double scale) { return std::abs(a - b) <= 1e-9 * std::max(1.0, scale); };
  for (std::uint32_t j = 0; j < g.leaf_count(); ++j) {
    const SuffStats& have = stats_[j];
    const SuffStats& want = stats[j];
    const std::string who = "leaf " + std::to_string(j) + ": ";
    if (have.n != want.n) problem(who + "point count " + std::to_string(have.n) + ", recount " + std::to_string(want.n));
    if (have.counts != want.counts) problem(who + "category counts differ from recount");
    if (!close(have.sum, want.sum, magnitude[j])) problem(who + "sum differs from recount");
    if (!close(have.sum_sq, want.sum_sq, magnitude_sq[j])) problem(who + "sum of squares differs from recount");
    if (!close(have.sum_log_factorial, want.sum_log_factorial, want.sum_log_factorial))
      problem(who + "sum of log factorials differs from recount");
  }
  return rep;
}

}  // namespace bspn
