#pragma once

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "owl/dataset.hpp"
#include "owl/sorted_l1.hpp"
#include "owl/types.hpp"

namespace owl {

/// A feasible dual point with its primal/dual objective values. `gap` is
/// clamped at zero for the screening radius; `raw_gap` keeps the exact
/// primal - dual difference (tiny negatives can appear at convergence).
struct GapCertificate {
  Vector theta;
  double primal = 0.0;
  double dual = 0.0;
  double raw_gap = 0.0;
  double gap = 0.0;
  double scale = 1.0;  // factor in (0,1] that shrank the residual into the dual ball
};

/// P(beta) = 1/2 ||y - X beta||^2 + sum_i lambda_i |beta|_[i]
inline double primal_value(const DesignMatrix& m, const Vector& beta, const WeightVector& w) {
  if (beta.size() != m.d() || w.size() != m.d())
    throw std::invalid_argument("primal_value: dimension mismatch");
  return 0.5 * (m.y - m.X * beta).squaredNorm() + owl_norm(beta, w);
}

/// D(theta) = -1/2 ||theta||^2 - theta' y
inline double dual_value(const DesignMatrix& m, const Vector& theta) {
  if (theta.size() != m.n()) throw std::invalid_argument("dual_value: dimension mismatch");
  return -0.5 * theta.squaredNorm() - theta.dot(m.y);
}

/// Scales the residual X beta - y into the dual-feasible set:
/// theta = (X beta - y) / max(1, dual_norm(X'(X beta - y))). At the optimum
/// the residual is already feasible and the scale is 1.
inline std::pair<Vector, double> feasible_dual_point(const DesignMatrix& m, const Vector& beta,
                                                     const WeightVector& w) {
  if (beta.size() != m.d() || w.size() != m.d())
    throw std::invalid_argument("feasible_dual_point: dimension mismatch");
  Vector rho = m.X * beta - m.y;
  const double s = dual_norm(m.X.transpose() * rho, w);
  const double scale = 1.0 / std::max(1.0, s);
  return {scale * rho, scale};
}

inline GapCertificate gap_certificate(const DesignMatrix& m, const Vector& beta,
                                      const WeightVector& w) {
  GapCertificate cert;
  auto [theta, scale] = feasible_dual_point(m, beta, w);
  cert.theta = std::move(theta);
  cert.scale = scale;
  cert.primal = primal_value(m, beta, w);
  cert.dual = dual_value(m, cert.theta);
  cert.raw_gap = cert.primal - cert.dual;
  cert.gap = std::max(cert.raw_gap, 0.0);
  return cert;
}

}  // namespace owl
