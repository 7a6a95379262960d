#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace bspn {

using NodeId = std::uint32_t;
using Dim = std::uint32_t;
// Zero-based child position chosen at a sum node.
using Branch = std::uint16_t;

inline constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

// Cells equal to NaN are treated as missing (marginalized out) during evaluation.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double x) noexcept { return std::isnan(x); }

// Dense row-major N x D table of observations.
class DataMatrix {
 public:
  DataMatrix() = default;
  DataMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}
  DataMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  double operator()(std::size_t n, std::size_t d) const noexcept { return values_[n * cols_ + d]; }
  double& operator()(std::size_t n, std::size_t d) noexcept { return values_[n * cols_ + d]; }

  std::span<const double> row(std::size_t n) const noexcept { return {values_.data() + n * cols_, cols_}; }
  std::span<double> row(std::size_t n) noexcept { return {values_.data() + n * cols_, cols_}; }

  std::vector<double> column(std::size_t d) const;
  DataMatrix select_rows(std::span<const std::size_t> rows) const;
  const std::vector<double>& values() const noexcept { return values_; }

  friend bool operator==(const DataMatrix&, const DataMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

}  // namespace bspn
