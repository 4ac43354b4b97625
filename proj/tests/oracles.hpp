#pragma once

// Reference implementations used by the tests. Everything here is written
// independently of the library code paths it checks: plain loops, eigensolver
// steps instead of power iteration, scalar soft-thresholding instead of the
// sorted prox.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "owl/dataset.hpp"
#include "owl/sorted_l1.hpp"

namespace oracle {

using owl::Index;
using owl::Matrix;
using owl::Vector;

// sum_i lambda_i |x|_[i] by explicit sort-and-accumulate loops
inline double owl_norm_naive(const Vector& x, const Vector& lambda) {
  std::vector<double> mags;
  for (Index i = 0; i < x.size(); ++i) mags.push_back(std::abs(x[i]));
  std::sort(mags.begin(), mags.end());
  std::reverse(mags.begin(), mags.end());
  double total = 0.0;
  for (std::size_t i = 0; i < mags.size(); ++i) total += lambda[static_cast<Index>(i)] * mags[i];
  return total;
}

inline double primal_naive(const Matrix& X, const Vector& y, const Vector& beta,
                           const Vector& lambda) {
  double loss = 0.0;
  for (Index i = 0; i < X.rows(); ++i) {
    double fit = 0.0;
    for (Index j = 0; j < X.cols(); ++j) fit += X(i, j) * beta[j];
    const double r = y[i] - fit;
    loss += 0.5 * r * r;
  }
  return loss + owl_norm_naive(beta, lambda);
}

inline double dual_naive(const Vector& y, const Vector& theta) {
  double quad = 0.0, lin = 0.0;
  for (Index i = 0; i < y.size(); ++i) {
    quad += theta[i] * theta[i];
    lin += theta[i] * y[i];
  }
  return -0.5 * quad - lin;
}

// objective of the prox subproblem: 1/2 ||v - x||^2 + sum step*lambda_i |x|_[i]
inline double prox_objective(const Vector& v, const Vector& x, const Vector& lambda, double step) {
  return 0.5 * (v - x).squaredNorm() + step * owl_norm_naive(x, lambda);
}

inline double soft_threshold(double v, double t) {
  const double mag = std::abs(v) - t;
  return mag > 0.0 ? (v < 0.0 ? -mag : mag) : 0.0;
}

// Plain ISTA for the Lasso special case, run to a numerical fixed point.
// The step comes from a dense eigensolve, not from power iteration.
inline Vector ista_lasso(const Matrix& X, const Vector& y, double lambda0,
                         Index max_iter = 500000) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(X.transpose() * X);
  const double L = eig.eigenvalues().maxCoeff();
  const double step = 1.0 / L;
  Vector beta = Vector::Zero(X.cols());
  for (Index it = 0; it < max_iter; ++it) {
    Vector grad = X.transpose() * (X * beta - y);
    Vector next(beta.size());
    for (Index j = 0; j < beta.size(); ++j)
      next[j] = soft_threshold(beta[j] - step * grad[j], step * lambda0);
    if ((next - beta).lpNorm<Eigen::Infinity>() <= 1e-13) {
      beta = next;
      break;
    }
    beta = next;
  }
  return beta;
}

// Monte-Carlo lower bound on the dual norm: max over sampled beta of
// c' beta / Omega(beta).
inline double dual_norm_sampled(const Vector& c, const Vector& lambda, int samples,
                                std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vector beta(c.size());
    for (Index i = 0; i < beta.size(); ++i) beta[i] = gauss(rng);
    // also try sign-aligned and sparse variants to tighten the bound
    for (int variant = 0; variant < 3; ++variant) {
      Vector b = beta;
      if (variant == 1)
        for (Index i = 0; i < b.size(); ++i) b[i] = c[i] >= 0.0 ? std::abs(b[i]) : -std::abs(b[i]);
      if (variant == 2) {
        b.setZero();
        Index top = 0;
        c.cwiseAbs().maxCoeff(&top);
        b[top] = c[top] >= 0.0 ? 1.0 : -1.0;
      }
      const double norm = owl_norm_naive(b, lambda);
      if (norm > 0.0) best = std::max(best, c.dot(b) / norm);
    }
  }
  return best;
}

inline Matrix random_matrix(Index n, Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix X(n, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < n; ++i) X(i, j) = gauss(rng);
  return X;
}

inline Vector random_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = gauss(rng);
  return v;
}

// Random weight vector: sorted non-increasing positive entries.
inline owl::WeightVector random_weights(Index d, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> unif(0.01, 1.0);
  std::vector<double> vals(static_cast<std::size_t>(d));
  for (auto& v : vals) v = scale * unif(rng);
  std::sort(vals.begin(), vals.end(), std::greater<double>());
  return owl::WeightVector(Eigen::Map<const Vector>(vals.data(), d));
}

}  // namespace oracle
