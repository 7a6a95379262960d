#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "bspn/family.hpp"
#include "bspn/graph.hpp"
#include "bspn/types.hpp"

namespace bspn {

enum class ColumnKind { Continuous, ContinuousPositive, Count, Categorical };

std::string_view column_kind_name(ColumnKind k) noexcept;
// "continuous", "positive" (or "continuous-positive"), "count", "categorical".
ColumnKind parse_column_kind(std::string_view s);

struct ColumnInfo {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
  // Categorical only: category code k + 1 stands for category_values[k].
  std::vector<double> category_values;

  std::uint32_t categories() const noexcept { return static_cast<std::uint32_t>(category_values.size()); }
  friend bool operator==(const ColumnInfo&, const ColumnInfo&) = default;
};

struct Dataset {
  DataMatrix x;  // categorical cells hold codes 1..K
  std::vector<ColumnInfo> columns;
  std::string source;
  std::string split;  // "", "train", "val", "test", "filtered"
  std::size_t dropped_rows = 0;  // rows with missing cells skipped on load
};

// Column kind overrides, one "name kind" pair per line; '#' starts a comment.
using Schema = std::map<std::string, ColumnKind>;
Schema load_schema(const std::filesystem::path& path);
Schema parse_schema(std::istream& in);

struct LoadOptions {
  const Schema* schema = nullptr;
  // Encode with these columns instead of inferring (e.g. test data against
  // the training encoding). Names must match; unseen categories are errors.
  const std::vector<ColumnInfo>* reference = nullptr;
  char delimiter = 0;  // 0: tab if the header has one, otherwise comma
  std::size_t max_categories = 20;
};

// Header row required. Empty cells and NA / NaN / ? mark missing values; such
// rows are dropped and counted. Inference without a schema: integer columns
// with at most max_categories distinct values are categorical, other
// non-negative integer columns are counts, strictly positive columns are
// continuous-positive, the rest continuous. DataError rows are file line numbers.
Dataset load_delimited(const std::filesystem::path& path, const LoadOptions& options = {});
Dataset parse_delimited(std::istream& in, const std::string& source, const LoadOptions& options = {});

// Comma-separated with a header; categorical codes written back as their
// original values.
void write_delimited(const std::filesystem::path& path, const Dataset& ds);
void write_delimited(std::ostream& out, const Dataset& ds);

struct SplitResult {
  Dataset train, val, test;
};

// Seeded uniform shuffle, then contiguous parts. Validation and test sizes are
// floor(N r_i / sum r); the remainder goes to training.
SplitResult split(const Dataset& ds, std::array<double, 3> ratios = {8, 1, 1}, std::uint64_t seed = 1);

struct FilterResult {
  Dataset kept;
  std::vector<std::size_t> removed;  // row indices into the input
  std::vector<double> scores;        // mean distance to k nearest neighbours, per input row
  double threshold = 0.0;
};

// Standardizes non-categorical columns, scores each row by its mean Euclidean
// distance to its k nearest neighbours and removes rows scoring above the
// given quantile (linear interpolation between order statistics).
FilterResult knn_outlier_filter(const Dataset& ds, std::size_t k = 5, double quantile = 0.99);

// Leaf families enabled for a column kind:
//   continuous -> Gaussian; positive -> Exponential, Gaussian;
//   count -> Poisson, Gaussian; categorical -> Multinomial(K).
std::vector<FamilySpec> families_for(const ColumnInfo& c);
LeafPolicy leaf_policy_for(const std::vector<ColumnInfo>& columns);

}  // namespace bspn
