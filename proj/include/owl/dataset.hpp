#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "owl/types.hpp"

namespace owl {

/// Dense regression problem: column-major design matrix X, response y, and
/// cached Euclidean column norms (the screening test needs them per column).
/// Instances are immutable after construction and safe to share across
/// threads.
struct DesignMatrix {
  Matrix X;
  Vector y;
  Vector col_norms;

  Index n() const { return X.rows(); }
  Index d() const { return X.cols(); }
};

inline Vector compute_col_norms(const Matrix& X) { return X.colwise().norm(); }

inline DesignMatrix make_design_matrix(Matrix X, Vector y) {
  if (X.rows() != y.size())
    throw std::invalid_argument("design matrix: row count does not match response length");
  if (!X.allFinite() || !y.allFinite())
    throw std::invalid_argument("design matrix: entries must be finite");
  DesignMatrix m{std::move(X), std::move(y), Vector()};
  m.col_norms = compute_col_norms(m.X);
  return m;
}

namespace detail {

inline bool parse_double(std::string_view text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

inline bool parse_index(std::string_view text, long long& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

inline std::vector<std::string_view> split_char(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

}  // namespace detail

/// Loads `<label> <index>:<value> ...` text. Indices are 1-based and strictly
/// increasing on each line; absent entries are zero; the feature count is the
/// largest index seen anywhere in the file.
inline DesignMatrix load_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  struct Entry {
    Index row, col;
    double value;
  };
  std::vector<Entry> entries;
  std::vector<double> labels;
  Index d = 0;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) -> void {
    throw std::runtime_error(path + ": parse error, line " + std::to_string(line_no) + ": " + why);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto tokens = detail::split_ws(line);
    if (tokens.empty()) continue;  // blank line

    double label = 0.0;
    if (!detail::parse_double(tokens[0], label)) fail("bad label '" + std::string(tokens[0]) + "'");
    const Index row = static_cast<Index>(labels.size());
    labels.push_back(label);

    long long prev = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      auto tok = tokens[t];
      std::size_t colon = tok.find(':');
      if (colon == std::string_view::npos) fail("expected index:value, got '" + std::string(tok) + "'");
      long long idx = 0;
      double value = 0.0;
      if (!detail::parse_index(tok.substr(0, colon), idx) || idx < 1)
        fail("bad feature index in '" + std::string(tok) + "'");
      if (idx <= prev) fail("feature indices must be strictly increasing");
      if (!detail::parse_double(tok.substr(colon + 1), value))
        fail("bad feature value in '" + std::string(tok) + "'");
      prev = idx;
      entries.push_back({row, static_cast<Index>(idx - 1), value});
      d = std::max(d, static_cast<Index>(idx));
    }
  }
  if (labels.empty()) throw std::runtime_error(path + ": empty file");

  const Index n = static_cast<Index>(labels.size());
  Matrix X = Matrix::Zero(n, d);
  for (const auto& e : entries) X(e.row, e.col) = e.value;
  return make_design_matrix(std::move(X),
                            Eigen::Map<const Vector>(labels.data(), n));
}

/// Rectangular numeric CSV with a header row. The target column (by name, or
/// the last column when empty) becomes y; the rest become X in header order.
inline DesignMatrix load_csv(const std::string& path, const std::string& target_column = "") {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header_views = detail::split_char(line, ',');
  std::vector<std::string> header(header_views.begin(), header_views.end());
  const std::size_t n_cols = header.size();
  if (n_cols < 2) throw std::runtime_error(path + ": need at least one feature and one target column");

  std::size_t target = n_cols - 1;
  if (!target_column.empty()) {
    auto it = std::find(header.begin(), header.end(), target_column);
    if (it == header.end())
      throw std::runtime_error(path + ": no column named '" + target_column + "'");
    target = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<double> values;  // row-major staging
  std::size_t n_rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = detail::split_char(line, ',');
    ++n_rows;
    if (fields.size() != n_cols)
      throw std::runtime_error(path + ": row " + std::to_string(n_rows) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(n_cols));
    for (std::size_t c = 0; c < n_cols; ++c) {
      double cell = 0.0;
      if (!detail::parse_double(fields[c], cell))
        throw std::runtime_error(path + ": non-numeric value in column " + header[c] + ", row " +
                                 std::to_string(n_rows));
      values.push_back(cell);
    }
  }
  if (n_rows == 0) throw std::runtime_error(path + ": no samples");

  const Index n = static_cast<Index>(n_rows);
  const Index d = static_cast<Index>(n_cols - 1);
  Matrix X(n, d);
  Vector y(n);
  for (Index r = 0; r < n; ++r) {
    Index xc = 0;
    for (std::size_t c = 0; c < n_cols; ++c) {
      double cell = values[static_cast<std::size_t>(r) * n_cols + c];
      if (c == target)
        y[r] = cell;
      else
        X(r, xc++) = cell;
    }
  }
  return make_design_matrix(std::move(X), std::move(y));
}

/// Centers every column and rescales it to unit Euclidean norm. Columns with
/// zero variance become all-zero columns (norm 0) and are left for the
/// screening rule to discard.
inline DesignMatrix standardize(const DesignMatrix& m, bool center_y = false) {
  if (m.n() < 2) throw std::invalid_argument("standardize: need at least 2 samples");
  Matrix X = m.X;
  for (Index j = 0; j < X.cols(); ++j) {
    auto col = X.col(j);
    col.array() -= col.mean();
    const double norm = col.norm();
    if (norm > 0.0)
      col /= norm;
    else
      col.setZero();
  }
  Vector y = m.y;
  if (center_y) y.array() -= y.mean();
  return make_design_matrix(std::move(X), std::move(y));
}

/// Synthetic sparse regression problem. The k_true active columns are
/// replicated into blocks of group_size strongly correlated columns; the true
/// coefficients are +-1 with the sign shared within a block.
struct SyntheticSpec {
  Index n = 100;
  Index d = 1000;
  Index k_true = 10;
  Index group_size = 1;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
};

inline std::pair<DesignMatrix, Vector> generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 1 || spec.d < 1) throw std::invalid_argument("synthetic: n and d must be positive");
  if (spec.k_true < 0 || spec.k_true > spec.d)
    throw std::invalid_argument("synthetic: k_true must be in [0, d]");
  if (spec.group_size < 1) throw std::invalid_argument("synthetic: group_size must be at least 1");
  if (spec.k_true * spec.group_size > spec.d)
    throw std::invalid_argument("synthetic: k_true * group_size exceeds d");
  if (spec.noise_sd < 0.0) throw std::invalid_argument("synthetic: noise_sd must be non-negative");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);

  Matrix X(spec.n, spec.d);
  Vector beta = Vector::Zero(spec.d);
  Index col = 0;
  for (Index g = 0; g < spec.k_true; ++g) {
    Vector base(spec.n);
    for (Index i = 0; i < spec.n; ++i) base[i] = gauss(rng);
    const double sign = coin(rng) == 0 ? 1.0 : -1.0;
    for (Index j = 0; j < spec.group_size; ++j, ++col) {
      if (j == 0) {
        X.col(col) = base;
      } else {
        for (Index i = 0; i < spec.n; ++i) X(i, col) = base[i] + 0.1 * gauss(rng);
      }
      beta[col] = sign;
    }
  }
  for (; col < spec.d; ++col)
    for (Index i = 0; i < spec.n; ++i) X(i, col) = gauss(rng);

  Vector y = X * beta;
  if (spec.noise_sd > 0.0)
    for (Index i = 0; i < spec.n; ++i) y[i] += spec.noise_sd * gauss(rng);

  return {make_design_matrix(std::move(X), std::move(y)), std::move(beta)};
}

inline double rmse(const Vector& pred, const Vector& truth) {
  if (pred.size() != truth.size()) throw std::invalid_argument("rmse: length mismatch");
  if (pred.size() == 0) throw std::invalid_argument("rmse: empty vectors");
  return std::sqrt((pred - truth).squaredNorm() / static_cast<double>(pred.size()));
}

}  // namespace owl
