#include "bspn/types.hpp"

#include <algorithm>
#include <string>

#include "bspn/errors.hpp"

namespace bspn {

DataMatrix::DataMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols)
    throw ConfigError("DataMatrix: " + std::to_string(values_.size()) + " values for a " + std::to_string(rows) +
                      " x " + std::to_string(cols) + " table");
}

std::vector<double> DataMatrix::column(std::size_t d) const {
  std::vector<double> out(rows_);
  for (std::size_t n = 0; n < rows_; ++n) out[n] = (*this)(n, d);
  return out;
}

DataMatrix DataMatrix::select_rows(std::span<const std::size_t> rows) const {
  DataMatrix out(rows.size(), cols_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

}  // namespace bspn
