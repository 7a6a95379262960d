#include "bspn/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "bspn/errors.hpp"
#include "bspn/rng.hpp"

namespace bspn {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_line(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool is_missing_token(std::string_view s) {
  return s.empty() || s == "?" || s == "NA" || s == "na" || s == "NaN" || s == "nan" || s == "null";
}

bool parse_number(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool is_integer(double v) { return v == std::floor(v) && std::abs(v) < 9.0e15; }

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

}  // namespace

std::string_view column_kind_name(ColumnKind k) noexcept {
  switch (k) {
    case ColumnKind::Continuous: return "continuous";
    case ColumnKind::ContinuousPositive: return "positive";
    case ColumnKind::Count: return "count";
    case ColumnKind::Categorical: return "categorical";
  }
  return "continuous";
}

ColumnKind parse_column_kind(std::string_view s) {
  if (s == "continuous") return ColumnKind::Continuous;
  if (s == "positive" || s == "continuous-positive") return ColumnKind::ContinuousPositive;
  if (s == "count") return ColumnKind::Count;
  if (s == "categorical") return ColumnKind::Categorical;
  throw ConfigError("unknown column kind '" + std::string(s) + "'");
}

Schema parse_schema(std::istream& in) {
  Schema schema;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string name, kind, extra;
    if (!(words >> name)) continue;
    if (!(words >> kind) || (words >> extra)) throw DataError("schema lines must be 'name kind'", lineno);
    try {
      schema[name] = parse_column_kind(kind);
    } catch (const ConfigError& e) {
      throw DataError(e.what(), lineno);
    }
  }
  return schema;
}

Schema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open schema file " + path.string());
  return parse_schema(in);
}

Dataset parse_delimited(std::istream& in, const std::string& source, const LoadOptions& options) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw DataError("missing header row in " + source);
  const char delim = options.delimiter ? options.delimiter : (line.find('\t') != std::string::npos ? '\t' : ',');
  const auto header = split_line(line, delim);
  const std::size_t cols = header.size();

  Dataset ds;
  ds.source = source;
  ds.columns.resize(cols);
  for (std::size_t d = 0; d < cols; ++d) {
    if (header[d].empty()) throw DataError("empty column name", lineno, d + 1);
    ds.columns[d].name = std::string(header[d]);
  }
  if (options.reference) {
    if (options.reference->size() != cols) throw DataError("column count differs from the reference encoding", lineno);
    for (std::size_t d = 0; d < cols; ++d)
      if ((*options.reference)[d].name != ds.columns[d].name)
        throw DataError("column '" + ds.columns[d].name + "' differs from reference column '" +
                            (*options.reference)[d].name + "'",
                        lineno, d + 1);
  }

  std::vector<double> values;
  std::vector<std::size_t> value_lines;
  std::vector<double> row(cols);
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line, delim);
    if (cells.size() != cols)
      throw DataError("expected " + std::to_string(cols) + " fields, found " + std::to_string(cells.size()), lineno);
    bool missing = false;
    for (std::size_t d = 0; d < cols; ++d) {
      if (is_missing_token(cells[d])) {
        missing = true;
        continue;
      }
      if (!parse_number(cells[d], row[d]))
        throw DataError("cannot parse '" + std::string(cells[d]) + "' as a number", lineno, d + 1);
    }
    if (missing) {
      ++ds.dropped_rows;
      continue;
    }
    values.insert(values.end(), row.begin(), row.end());
    value_lines.push_back(lineno);
  }
  const std::size_t rows = values.size() / std::max<std::size_t>(cols, 1);

  for (std::size_t d = 0; d < cols; ++d) {
    ColumnInfo& c = ds.columns[d];
    auto cell = [&](std::size_t n) -> double& { return values[n * cols + d]; };
    if (options.reference) {
      c = (*options.reference)[d];
    } else {
      bool all_int = true, all_pos = true, all_nonneg = true;
      std::set<double> distinct;
      for (std::size_t n = 0; n < rows; ++n) {
        const double v = cell(n);
        all_int = all_int && is_integer(v);
        all_pos = all_pos && v > 0.0;
        all_nonneg = all_nonneg && v >= 0.0;
        if (distinct.size() <= options.max_categories) distinct.insert(v);
      }
      const auto forced = options.schema ? options.schema->find(c.name) : Schema::const_iterator{};
      if (options.schema && forced != options.schema->end()) {
        c.kind = forced->second;
      } else if (rows > 0 && all_int && distinct.size() <= options.max_categories) {
        c.kind = ColumnKind::Categorical;
      } else if (rows > 0 && all_int && all_nonneg) {
        c.kind = ColumnKind::Count;
      } else if (rows > 0 && all_pos) {
        c.kind = ColumnKind::ContinuousPositive;
      } else {
        c.kind = ColumnKind::Continuous;
      }
      if (c.kind == ColumnKind::Categorical) {
        std::set<double> all;
        for (std::size_t n = 0; n < rows; ++n) all.insert(cell(n));
        c.category_values.assign(all.begin(), all.end());
      }
    }
    for (std::size_t n = 0; n < rows; ++n) {
      double& v = cell(n);
      switch (c.kind) {
        case ColumnKind::Categorical: {
          const auto it = std::lower_bound(c.category_values.begin(), c.category_values.end(), v);
          if (it == c.category_values.end() || *it != v)
            throw DataError("unknown category " + format_number(v) + " in column '" + c.name + "'", value_lines[n],
                            d + 1);
          v = static_cast<double>(it - c.category_values.begin() + 1);
          break;
        }
        case ColumnKind::Count:
          if (!is_integer(v) || v < 0.0)
            throw DataError("count column '" + c.name + "' needs non-negative integers", value_lines[n], d + 1);
          break;
        case ColumnKind::ContinuousPositive:
          if (!(v > 0.0) && !options.reference)
            throw DataError("positive column '" + c.name + "' needs values > 0", value_lines[n], d + 1);
          break;
        case ColumnKind::Continuous: break;
      }
    }
  }
  ds.x = DataMatrix(rows, cols, std::move(values));
  return ds;
}

Dataset load_delimited(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_delimited(in, path.string(), options);
}

void write_delimited(std::ostream& out, const Dataset& ds) {
  for (std::size_t d = 0; d < ds.columns.size(); ++d) out << (d ? "," : "") << ds.columns[d].name;
  out << '\n';
  for (std::size_t n = 0; n < ds.x.rows(); ++n) {
    for (std::size_t d = 0; d < ds.columns.size(); ++d) {
      double v = ds.x(n, d);
      const auto& c = ds.columns[d];
      if (c.kind == ColumnKind::Categorical) v = c.category_values.at(static_cast<std::size_t>(v) - 1);
      out << (d ? "," : "") << format_number(v);
    }
    out << '\n';
  }
}

void write_delimited(const std::filesystem::path& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot create " + path.string());
  write_delimited(out, ds);
  if (!out) throw DataError("write failed for " + path.string());
}

SplitResult split(const Dataset& ds, std::array<double, 3> ratios, std::uint64_t seed) {
  for (double r : ratios)
    if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("split ratios must be positive");
  const std::size_t n = ds.x.rows();
  const double total = ratios[0] + ratios[1] + ratios[2];
  const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios[1] / total + 1e-9));
  const auto n_test = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios[2] / total + 1e-9));
  const std::size_t n_train = n - n_val - n_test;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(seed, 0x5b1d);
  // Fisher-Yates with our own index draws: std::shuffle is not portable across
  // standard libraries.
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
    std::swap(order[i - 1], order[std::min(j, i - 1)]);
  }
  auto part = [&](std::size_t from, std::size_t count, const char* tag) {
    Dataset out;
    out.columns = ds.columns;
    out.source = ds.source;
    out.split = tag;
    out.x = ds.x.select_rows(std::span<const std::size_t>(order).subspan(from, count));
    return out;
  };
  return {part(0, n_train, "train"), part(n_train, n_val, "val"), part(n_train + n_val, n_test, "test")};
}

FilterResult knn_outlier_filter(const Dataset& ds, std::size_t k, double quantile) {
  const std::size_t n = ds.x.rows();
  if (k < 1) throw ConfigError("k must be at least 1");
  if (n <= k) throw ConfigError("outlier filter needs more than k rows");
  if (!(quantile >= 0.0 && quantile <= 1.0)) throw ConfigError("quantile must lie in [0, 1]");

  std::vector<std::size_t> dims;
  for (std::size_t d = 0; d < ds.columns.size(); ++d)
    if (ds.columns[d].kind != ColumnKind::Categorical) dims.push_back(d);
  const std::size_t m = dims.size();
  std::vector<double> z(n * m);
  for (std::size_t i = 0; i < m; ++i) {
    double mean = 0.0, ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += ds.x(r, dims[i]);
    mean /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) ss += (ds.x(r, dims[i]) - mean) * (ds.x(r, dims[i]) - mean);
    double sd = std::sqrt(ss / static_cast<double>(n));
    if (!(sd > 0.0)) sd = 1.0;
    for (std::size_t r = 0; r < n; ++r) z[r * m + i] = (ds.x(r, dims[i]) - mean) / sd;
  }

  FilterResult out;
  out.scores.resize(n);
  std::vector<double> dist(n - 1);
  for (std::size_t a = 0; a < n; ++a) {
    std::size_t t = 0;
    for (std::size_t b = 0; b < n; ++b) {
      if (b == a) continue;
      double acc = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double diff = z[a * m + i] - z[b * m + i];
        acc += diff * diff;
      }
      dist[t++] = std::sqrt(acc);
    }
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
    out.scores[a] = std::accumulate(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), 0.0) /
                    static_cast<double>(k);
  }

  std::vector<double> sorted = out.scores;
  std::sort(sorted.begin(), sorted.end());
  const double h = quantile * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, n - 1);
  out.threshold = sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);

  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < n; ++r) (out.scores[r] > out.threshold ? out.removed : keep).push_back(r);
  out.kept.columns = ds.columns;
  out.kept.source = ds.source;
  out.kept.split = "filtered";
  out.kept.x = ds.x.select_rows(keep);
  return out;
}

std::vector<FamilySpec> families_for(const ColumnInfo& c) {
  switch (c.kind) {
    case ColumnKind::Continuous: return {{Family::Gaussian, 0}};
    case ColumnKind::ContinuousPositive: return {{Family::Exponential, 0}, {Family::Gaussian, 0}};
    case ColumnKind::Count: return {{Family::Poisson, 0}, {Family::Gaussian, 0}};
    case ColumnKind::Categorical: return {{Family::Multinomial, c.categories()}};
  }
  return {{Family::Gaussian, 0}};
}

LeafPolicy leaf_policy_for(const std::vector<ColumnInfo>& columns) {
  LeafPolicy p;
  for (const auto& c : columns) p.families_per_dim.push_back(families_for(c));
  return p;
}

}  // namespace bspn
