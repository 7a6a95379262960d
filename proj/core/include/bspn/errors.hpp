#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bspn {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed graph construction input (dangling ids, bad leaf scope, ...).
class GraphError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration or hyperparameter values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Value outside the support of a leaf family.
class SupportError : public Error {
 public:
  using Error::Error;
};

// Parameters requested for evaluation were never materialized for this graph.
class NotMaterializedError : public Error {
 public:
  using Error::Error;
};

// Internal sufficient-statistic or allocation bookkeeping went inconsistent.
// Always a caller bug.
class BookkeepingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Binary checkpoint decoding failure; carries the offending byte offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Delimited-text ingestion failure. Row and column are 1-based; 0 means n/a.
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
      : Error(format(what, row, column)), row_(row), column_(column) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t row, std::size_t column) {
    if (row == 0) return what;
    std::string s = what + " (row " + std::to_string(row);
    if (column != 0) s += ", column " + std::to_string(column);
    return s + ")";
  }
  std::size_t row_;
  std::size_t column_;
};

}  // namespace bspn
