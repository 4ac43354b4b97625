#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "owl/dataset.hpp"
#include "owl/types.hpp"

namespace owl {

enum class WeightKind { oscar, lasso, linf, custom };

/// Non-increasing, non-negative regularization weights for the sorted-L1
/// (OWL) penalty. The leading weight must be positive; an all-zero vector
/// degenerates the norm and is rejected.
class WeightVector {
 public:
  explicit WeightVector(Vector lambda, WeightKind kind = WeightKind::custom,
                        double alpha1 = 0.0, double alpha2 = 0.0)
      : lambda_(std::move(lambda)), kind_(kind), alpha1_(alpha1), alpha2_(alpha2) {
    const Index d = lambda_.size();
    if (d == 0) throw std::invalid_argument("weights: vector is empty");
    for (Index i = 0; i < d; ++i) {
      if (!std::isfinite(lambda_[i]) || lambda_[i] < 0.0)
        throw std::invalid_argument("weights: entries must be finite and non-negative");
      if (i > 0 && lambda_[i] > lambda_[i - 1])
        throw std::invalid_argument("weights: entries must be non-increasing");
    }
    if (!(lambda_[0] > 0.0))
      throw std::invalid_argument("weights: leading weight must be positive");
  }

  const Vector& lambda() const { return lambda_; }
  Index size() const { return lambda_.size(); }
  double operator[](Index i) const { return lambda_[i]; }

  WeightKind kind() const { return kind_; }
  double alpha1() const { return alpha1_; }
  double alpha2() const { return alpha2_; }

  /// First m weights; the active subproblem after screening uses these.
  WeightVector prefix(Index m) const {
    if (m < 1 || m > size()) throw std::invalid_argument("weights: bad prefix length");
    return WeightVector(lambda_.head(m), kind_, alpha1_, alpha2_);
  }

 private:
  Vector lambda_;
  WeightKind kind_;
  double alpha1_;
  double alpha2_;
};

/// OSCAR schedule: lambda_i = alpha1 + alpha2 * (d - i), i = 1..d.
inline WeightVector oscar_weights(Index d, double alpha1, double alpha2) {
  if (d < 1) throw std::invalid_argument("oscar_weights: d must be at least 1");
  if (alpha1 < 0.0 || alpha2 < 0.0)
    throw std::invalid_argument("oscar_weights: alpha1 and alpha2 must be non-negative");
  Vector lambda(d);
  for (Index i = 0; i < d; ++i) lambda[i] = alpha1 + alpha2 * static_cast<double>(d - 1 - i);
  return WeightVector(std::move(lambda), WeightKind::oscar, alpha1, alpha2);
}

inline WeightVector lasso_weights(Index d, double lambda0) {
  if (d < 1) throw std::invalid_argument("lasso_weights: d must be at least 1");
  return WeightVector(Vector::Constant(d, lambda0), WeightKind::lasso, lambda0, 0.0);
}

/// OSCAR schedule scaled to the data: alpha1 = p ||X'y||_inf, alpha2 = alpha1/d.
/// The factor p controls the sparsity of the solution.
inline WeightVector oscar_weights_from_data(const DesignMatrix& m, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("oscar weights: p must be positive");
  if (m.n() < 1 || m.d() < 1) throw std::invalid_argument("oscar weights: empty problem");
  const double xy_max = (m.X.transpose() * m.y).cwiseAbs().maxCoeff();
  if (xy_max == 0.0)
    throw std::invalid_argument("oscar weights: response orthogonal to all features");
  const double alpha1 = p * xy_max;
  return oscar_weights(m.d(), alpha1, alpha1 / static_cast<double>(m.d()));
}

/// Sorted-L1 norm: sum_i lambda_i * |beta|_[i] with |beta| sorted descending.
inline double owl_norm(const Vector& beta, const WeightVector& w) {
  if (beta.size() != w.size()) throw std::invalid_argument("owl_norm: length mismatch");
  std::vector<double> mags(beta.size());
  for (Index i = 0; i < beta.size(); ++i) mags[i] = std::abs(beta[i]);
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  double total = 0.0;
  for (Index i = 0; i < beta.size(); ++i) total += w[i] * mags[i];
  return total;
}

/// Dual norm of the sorted-L1 norm: max over prefixes k of the k largest
/// magnitudes of c summed, divided by the first k weights summed. A vector c
/// is dual-feasible iff dual_norm(c, w) <= 1.
inline double dual_norm(const Vector& c, const WeightVector& w) {
  if (c.size() != w.size()) throw std::invalid_argument("dual_norm: length mismatch");
  std::vector<double> mags(c.size());
  for (Index i = 0; i < c.size(); ++i) mags[i] = std::abs(c[i]);
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  double best = 0.0, cum_c = 0.0, cum_l = 0.0;
  for (Index k = 0; k < c.size(); ++k) {
    cum_c += mags[k];
    cum_l += w[k];
    best = std::max(best, cum_c / cum_l);  // cum_l > 0 since lambda[0] > 0
  }
  return best;
}

/// Proximal operator of the sorted-L1 norm with weights step * lambda:
///   argmin_x 1/2 ||v - x||^2 + sum_i step * lambda_i |x|_[i]
/// Sort |v| descending (stable, ties by original index), subtract the scaled
/// weights, isotonic-regress onto the non-increasing cone by pooling adjacent
/// violators, clip at zero, then undo the sort and restore signs.
inline Vector prox_owl(const Vector& v, const WeightVector& w, double step = 1.0) {
  if (v.size() != w.size()) throw std::invalid_argument("prox_owl: length mismatch");
  if (!(step > 0.0)) throw std::invalid_argument("prox_owl: step must be positive");
  const Index d = v.size();

  std::vector<Index> order(d);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(v[a]) > std::abs(v[b]);
  });

  // Stack of pooled blocks over z_i = |v|_[i] - step*lambda_i. Blocks are
  // merged to their mean only on strict increases, so a run of equal values
  // is left untouched (keeps the Lasso special case bit-exact).
  std::vector<double> sum(d), val(d);
  std::vector<Index> first(d), last(d);
  Index k = 0;
  for (Index i = 0; i < d; ++i) {
    first[k] = i;
    last[k] = i;
    sum[k] = std::abs(v[order[i]]) - step * w[i];
    val[k] = sum[k];
    while (k > 0 && val[k - 1] < val[k]) {
      --k;
      last[k] = i;
      sum[k] += sum[k + 1];
      val[k] = sum[k] / static_cast<double>(last[k] - first[k] + 1);
    }
    ++k;
  }

  Vector x(d);
  for (Index j = 0; j < k; ++j) {
    const double mag = std::max(val[j], 0.0);
    for (Index i = first[j]; i <= last[j]; ++i) {
      const Index orig = order[i];
      x[orig] = v[orig] < 0.0 ? -mag : mag;
    }
  }
  return x;
}

/// Custom weights from a text file, one value per line, validated
/// non-increasing on construction.
inline WeightVector load_weight_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t pos = 0;
    double value = 0.0;
    try {
      value = std::stod(line, &pos);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": parse error, line " + std::to_string(line_no) +
                               ": not a number");
    }
    if (line.find_first_not_of(" \t", pos) != std::string::npos)
      throw std::runtime_error(path + ": parse error, line " + std::to_string(line_no) +
                               ": trailing characters");
    values.push_back(value);
  }
  if (values.empty()) throw std::runtime_error(path + ": empty weight file");
  return WeightVector(Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size())),
                      WeightKind::custom);
}

}  // namespace owl
