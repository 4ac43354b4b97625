#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "owl/dataset.hpp"
#include "owl/sorted_l1.hpp"
#include "owl/types.hpp"

namespace owl {

/// Surviving feature indices of the screened problem, in increasing original
/// order. |active| doubles as the cutoff into the weight vector: the active
/// subproblem uses the first |active| weights. Indices only ever leave.
class ActiveSet {
 public:
  ActiveSet(std::vector<Index> active, Index d_total)
      : active_(std::move(active)), d_total_(d_total) {
    for (std::size_t i = 0; i < active_.size(); ++i) {
      if (active_[i] < 0 || active_[i] >= d_total_)
        throw std::invalid_argument("active set: index out of range");
      if (i > 0 && active_[i] <= active_[i - 1])
        throw std::invalid_argument("active set: indices must be strictly increasing");
    }
  }

  static ActiveSet full(Index d) {
    std::vector<Index> all(static_cast<std::size_t>(d));
    std::iota(all.begin(), all.end(), Index{0});
    return ActiveSet(std::move(all), d);
  }

  const std::vector<Index>& indices() const { return active_; }
  Index size() const { return static_cast<Index>(active_.size()); }
  Index weight_cutoff() const { return size(); }
  Index d_total() const { return d_total_; }
  bool is_full() const { return size() == d_total_; }

 private:
  std::vector<Index> active_;
  Index d_total_;
};

/// Single-feature test: |x_i' theta| + ||x_i|| sqrt(2 gap) < lambda_m proves
/// the coefficient is zero at the optimum. Strict inequality; the boundary is
/// kept.
inline bool screen_test(double corr_i, double col_norm_i, double gap, double lambda_m) {
  return corr_i + col_norm_i * std::sqrt(2.0 * gap) < lambda_m;
}

/// Fixed-point screening pass. Each inner pass tests every surviving feature
/// against lambda_m where m is the survivor count *before* the pass; removals
/// apply between passes. Repeats until nothing moves. Screened coefficients
/// implicitly take the smallest remaining weights, so the surviving
/// subproblem keeps the first m weights.
inline ActiveSet screen_iterative(const ActiveSet& a, const Vector& corr, const Vector& col_norms,
                                  double gap, const WeightVector& w) {
  if (corr.size() != a.size() || col_norms.size() != a.size())
    throw std::invalid_argument("screen_iterative: corr/col_norms must match the active set");
  if (w.size() != a.d_total())
    throw std::invalid_argument("screen_iterative: weights must cover all original features");
  if (gap < 0.0) throw std::invalid_argument("screen_iterative: gap must be non-negative");

  const double radius = std::sqrt(2.0 * gap);
  std::vector<char> alive(static_cast<std::size_t>(a.size()), 1);
  Index m = a.size();
  bool changed = true;
  while (changed && m > 0) {
    changed = false;
    const double threshold = w[m - 1];
    Index survivors = m;
    for (Index i = 0; i < a.size(); ++i) {
      if (!alive[static_cast<std::size_t>(i)]) continue;
      if (corr[i] + col_norms[i] * radius < threshold) {
        alive[static_cast<std::size_t>(i)] = 0;
        --survivors;
        changed = true;
      }
    }
    m = survivors;
  }

  std::vector<Index> kept;
  kept.reserve(static_cast<std::size_t>(m));
  for (Index i = 0; i < a.size(); ++i)
    if (alive[static_cast<std::size_t>(i)]) kept.push_back(a.indices()[static_cast<std::size_t>(i)]);
  return ActiveSet(std::move(kept), a.d_total());
}

/// Column subset of the problem plus the first-m weights and the restricted
/// coefficients. Requires beta to vanish off the active set.
struct Restriction {
  DesignMatrix matrix;
  WeightVector weights;
  Vector beta;
};

inline Restriction restrict(const DesignMatrix& m, const ActiveSet& a, const WeightVector& w,
                            const Vector& beta) {
  if (beta.size() != m.d() || w.size() != m.d() || a.d_total() != m.d())
    throw std::invalid_argument("restrict: dimension mismatch");
  std::vector<char> active_mask(static_cast<std::size_t>(m.d()), 0);
  for (Index idx : a.indices()) active_mask[static_cast<std::size_t>(idx)] = 1;
  for (Index j = 0; j < m.d(); ++j)
    if (!active_mask[static_cast<std::size_t>(j)] && beta[j] != 0.0)
      throw std::invalid_argument("restrict: nonzero coefficient on an inactive feature");

  const Index k = a.size();
  if (k == 0) throw std::invalid_argument("restrict: active set is empty");
  Matrix sub_x(m.n(), k);
  Vector sub_norms(k), sub_beta(k);
  for (Index i = 0; i < k; ++i) {
    const Index j = a.indices()[static_cast<std::size_t>(i)];
    sub_x.col(i) = m.X.col(j);
    sub_norms[i] = m.col_norms[j];
    sub_beta[i] = beta[j];
  }
  DesignMatrix sub{std::move(sub_x), m.y, std::move(sub_norms)};
  return Restriction{std::move(sub), w.prefix(k), std::move(sub_beta)};
}

/// Per-outer-iteration progress record. Screening rates are filled in after
/// the run, once the final active count is known.
struct TraceRow {
  Index iter = 0;
  double gap = 0.0;
  Index active = 0;
  double screen_rate = 0.0;
  double elapsed_ms = 0.0;
};

struct ScreeningTrace {
  std::vector<TraceRow> rows;

  /// screen_rate = (d_total - active) / (d_total - final_active); defined as
  /// 1 when nothing is inactive at the end.
  void finalize_rates(Index d_total, Index final_active) {
    const double denom = static_cast<double>(d_total - final_active);
    for (auto& row : rows)
      row.screen_rate = denom > 0.0 ? static_cast<double>(d_total - row.active) / denom : 1.0;
  }

  std::string to_csv() const {
    std::string out = "iter,gap,active,screen_rate,elapsed_ms\n";
    char buf[160];
    for (const auto& row : rows) {
      std::snprintf(buf, sizeof(buf), "%lld,%.17g,%lld,%.17g,%.17g\n",
                    static_cast<long long>(row.iter), row.gap, static_cast<long long>(row.active),
                    row.screen_rate, row.elapsed_ms);
      out += buf;
    }
    return out;
  }
};

}  // namespace owl
