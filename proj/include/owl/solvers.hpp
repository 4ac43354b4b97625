#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "owl/dataset.hpp"
#include "owl/duality.hpp"
#include "owl/screening.hpp"
#include "owl/sorted_l1.hpp"
#include "owl/types.hpp"

namespace owl {

enum class SolverMode { apgd, spgd };

inline const char* to_string(SolverMode mode) {
  return mode == SolverMode::apgd ? "apgd" : "spgd";
}

/// Passed to the optional per-iteration observer. The certificate belongs to
/// the active subproblem the solver is currently working on.
struct IterationInfo {
  Index iter;
  const GapCertificate& certificate;
  const ActiveSet& active;
};

struct SolverConfig {
  SolverMode mode = SolverMode::apgd;
  double epsilon = 1e-6;  // duality-gap stopping tolerance
  Index max_outer = 0;    // 0: 10000 for apgd, 1000 for spgd
  bool screening = true;
  Index spgd_T = 0;   // inner steps per outer iteration; 0: about two passes over the data
  Index spgd_l = 0;   // mini-batch size; 0: min(n, 10)
  double eta = 0.0;   // spgd step size; 0: 0.1 / lipschitz_estimate
  std::uint64_t seed = 0;
  std::optional<Vector> warm_start_beta;
  Index stall_window = 0;  // >0: stop once the gap makes no progress for this many iterations
  std::function<void(const IterationInfo&)> observer;
};

/// Resolved scalar settings echoed into serialized results.
struct ConfigEcho {
  std::string mode;
  double epsilon = 0.0;
  Index max_outer = 0;
  bool screening = false;
  Index spgd_T = 0;
  Index spgd_l = 0;
  double eta = 0.0;
  std::uint64_t seed = 0;
};

struct SolverState {
  Vector beta;  // full-dimensional; exactly zero outside the active set
  Vector b;     // apgd extrapolation point, on active coordinates
  double t_k = 1.0;
  double step = 0.0;
  Vector snapshot_beta;  // spgd variance-reduction anchor, on active coordinates
  Vector full_grad;
  ActiveSet active;
  ScreeningTrace trace;
};

struct SolveResult {
  Vector beta;
  GapCertificate certificate;  // full-problem certificate at the final beta
  Index iterations = 0;
  ScreeningTrace trace;
  double wall_ms = 0.0;
  bool converged = false;  // full-problem gap <= epsilon
  std::vector<Index> active_history;
  std::vector<Index> final_active;  // surviving original column indices
  ConfigEcho config;
};

/// Largest squared singular value of X by power iteration on X'X, started
/// from a fixed pseudorandom direction so results are reproducible. Stops on
/// relative change below 1e-6 or after 100 rounds.
inline double lipschitz_estimate(const Matrix& X) {
  if (X.rows() == 0 || X.cols() == 0)
    throw std::invalid_argument("lipschitz_estimate: empty matrix");
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (int attempt = 0; attempt < 2; ++attempt) {
    Vector u(X.cols());
    for (Index i = 0; i < u.size(); ++i) u[i] = gauss(rng);
    u /= u.norm();
    double estimate = 0.0;
    for (int it = 0; it < 100; ++it) {
      Vector z = X.transpose() * (X * u);
      const double norm = z.norm();
      if (norm == 0.0) {
        estimate = 0.0;
        break;
      }
      const double prev = estimate;
      estimate = norm;
      u = z / norm;
      if (it > 0 && std::abs(estimate - prev) <= 1e-6 * estimate) break;
    }
    if (estimate > 0.0) return estimate;
    // start vector hit a null direction; retry once before declaring the
    // matrix all-zero
    if (X.cwiseAbs().maxCoeff() == 0.0) break;
  }
  throw std::runtime_error("lipschitz_estimate: matrix is all zeros, nothing to solve");
}

inline double lipschitz_estimate(const DesignMatrix& m) { return lipschitz_estimate(m.X); }

namespace detail {

inline std::chrono::steady_clock::time_point clock_now() {
  return std::chrono::steady_clock::now();
}

inline double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(clock_now() - t0).count();
}

/// Restricted view of the problem the solver actually iterates on.
struct ActiveProblem {
  const DesignMatrix& full;
  const WeightVector& full_weights;
  ActiveSet active;
  Matrix X;          // active columns
  Vector col_norms;  // cached norms of the active columns
  WeightVector weights;
  Vector beta;  // coefficients on active coordinates

  ActiveProblem(const DesignMatrix& m, const WeightVector& w, Vector beta0)
      : full(m),
        full_weights(w),
        active(ActiveSet::full(m.d())),
        X(m.X),
        col_norms(m.col_norms),
        weights(w),
        beta(std::move(beta0)) {}

  Index size() const { return active.size(); }

  Vector beta_full() const {
    Vector out = Vector::Zero(full.d());
    const auto& idx = active.indices();
    for (std::size_t i = 0; i < idx.size(); ++i) out[idx[i]] = beta[static_cast<Index>(i)];
    return out;
  }

  /// Certificate of the active subproblem at the current beta, plus the
  /// screening correlations |x_i' theta| (reuses the X' rho product).
  std::pair<GapCertificate, Vector> certificate() const {
    GapCertificate cert;
    Vector rho = X * beta - full.y;
    Vector c = X.transpose() * rho;
    const double s = dual_norm(c, weights);
    cert.scale = 1.0 / std::max(1.0, s);
    cert.theta = cert.scale * rho;
    cert.primal = 0.5 * rho.squaredNorm() + owl_norm(beta, weights);
    cert.dual = -0.5 * cert.theta.squaredNorm() - cert.theta.dot(full.y);
    cert.raw_gap = cert.primal - cert.dual;
    cert.gap = std::max(cert.raw_gap, 0.0);
    return {std::move(cert), c.cwiseAbs() * cert.scale};
  }

  /// Drops all columns outside `next`; their current coefficients are
  /// discarded (they are provably zero at the optimum).
  void shrink_to(const ActiveSet& next) {
    const auto& cur = active.indices();
    const auto& nxt = next.indices();
    Matrix new_x(full.n(), next.size());
    Vector new_norms(next.size()), new_beta(next.size());
    std::size_t i = 0;
    for (std::size_t j = 0; j < nxt.size(); ++j) {
      while (cur[i] != nxt[j]) ++i;
      new_x.col(static_cast<Index>(j)) = X.col(static_cast<Index>(i));
      new_norms[static_cast<Index>(j)] = col_norms[static_cast<Index>(i)];
      new_beta[static_cast<Index>(j)] = beta[static_cast<Index>(i)];
      ++i;
    }
    X = std::move(new_x);
    col_norms = std::move(new_norms);
    beta = std::move(new_beta);
    if (next.size() > 0) weights = full_weights.prefix(next.size());
    active = next;
  }
};

/// Tracks gap progress; reports a stall when the best gap has not improved
/// by at least 1% for `window` consecutive outer iterations.
struct StallDetector {
  Index window;
  double best = std::numeric_limits<double>::infinity();
  Index last_improve = 0;

  bool stalled(Index iter, double gap) {
    if (window <= 0) return false;
    if (gap < 0.99 * best) {
      best = gap;
      last_improve = iter;
      return false;
    }
    return iter - last_improve >= window;
  }
};

/// Uniform sampling of l distinct row indices by partial Fisher-Yates.
class BatchSampler {
 public:
  BatchSampler(Index n, std::mt19937_64& rng) : pool_(static_cast<std::size_t>(n)), rng_(rng) {
    std::iota(pool_.begin(), pool_.end(), Index{0});
  }

  void sample(Index l, std::vector<Index>& out) {
    const Index n = static_cast<Index>(pool_.size());
    out.resize(static_cast<std::size_t>(l));
    for (Index j = 0; j < l; ++j) {
      std::uniform_int_distribution<Index> pick(j, n - 1);
      std::swap(pool_[static_cast<std::size_t>(j)], pool_[static_cast<std::size_t>(pick(rng_))]);
      out[static_cast<std::size_t>(j)] = pool_[static_cast<std::size_t>(j)];
    }
  }

 private:
  std::vector<Index> pool_;
  std::mt19937_64& rng_;
};

inline Vector initial_beta(const DesignMatrix& m, const SolverConfig& cfg) {
  if (cfg.warm_start_beta) {
    if (cfg.warm_start_beta->size() != m.d())
      throw std::invalid_argument("warm start: dimension mismatch");
    return *cfg.warm_start_beta;
  }
  return Vector::Zero(m.d());
}

inline void validate_common(const DesignMatrix& m, const WeightVector& w,
                            const SolverConfig& cfg) {
  if (w.size() != m.d()) throw std::invalid_argument("solver: weights must have one entry per feature");
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
}

}  // namespace detail

/// FISTA on the active subproblem with per-iteration gap certificates and
/// optional safe screening. On every active-set change the momentum is
/// restarted (t back to 1, extrapolation point reset to beta) and the step is
/// refreshed from the spectral norm of the surviving columns.
inline SolveResult apgd(const DesignMatrix& m, const WeightVector& w, const SolverConfig& cfg) {
  detail::validate_common(m, w, cfg);
  const Index max_outer = cfg.max_outer > 0 ? cfg.max_outer : 10000;
  const auto t0 = detail::clock_now();

  detail::ActiveProblem prob(m, w, detail::initial_beta(m, cfg));
  double lips = lipschitz_estimate(prob.X);
  double step = 1.0 / (1.01 * lips);
  Vector b = prob.beta;  // extrapolation point
  double t_k = 1.0;
  detail::StallDetector stall{cfg.stall_window};

  SolveResult res;
  res.config = ConfigEcho{to_string(SolverMode::apgd), cfg.epsilon, max_outer, cfg.screening,
                          0,        0,                 0.0,        cfg.seed};
  Index iter = 0;
  while (iter < max_outer) {
    ++iter;
    auto [cert, corr] = prob.certificate();
    res.trace.rows.push_back({iter, cert.gap, prob.size(), 0.0, detail::ms_since(t0)});
    res.active_history.push_back(prob.size());
    if (cfg.observer) cfg.observer(IterationInfo{iter, cert, prob.active});

    if (cert.gap <= cfg.epsilon) {
      // confirm on the full problem before declaring convergence
      if (gap_certificate(m, prob.beta_full(), w).gap <= cfg.epsilon) break;
    }
    if (stall.stalled(iter, cert.gap)) break;

    if (cfg.screening) {
      ActiveSet next = screen_iterative(prob.active, corr, prob.col_norms, cert.gap, w);
      if (next.size() < prob.size()) {
        prob.shrink_to(next);
        if (prob.size() == 0) break;  // everything screened: beta = 0 is optimal
        b = prob.beta;
        t_k = 1.0;
        lips = lipschitz_estimate(prob.X);
        step = 1.0 / (1.01 * lips);
      }
    }

    Vector grad = prob.X.transpose() * (prob.X * b - m.y);
    Vector beta_next = prox_owl(b - step * grad, prob.weights, step);
    if (!beta_next.allFinite()) throw std::runtime_error("divergence (step too large)");
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_k * t_k));
    b = beta_next + ((t_k - 1.0) / t_next) * (beta_next - prob.beta);
    prob.beta = std::move(beta_next);
    t_k = t_next;
  }

  res.beta = prob.beta_full();
  res.certificate = gap_certificate(m, res.beta, w);
  res.converged = res.certificate.gap <= cfg.epsilon;
  res.iterations = iter;
  res.final_active = prob.active.indices();
  res.trace.finalize_rates(m.d(), prob.active.size());
  res.wall_ms = detail::ms_since(t0);
  return res;
}

/// Prox-SVRG on the active subproblem. Each outer iteration computes the
/// certificate and (optionally) screens, then takes T variance-reduced
/// proximal steps on mini-batches of l rows. The batch gradient difference is
/// rescaled by n/l so the direction is an unbiased estimate of the full
/// gradient.
inline SolveResult spgd(const DesignMatrix& m, const WeightVector& w, const SolverConfig& cfg) {
  detail::validate_common(m, w, cfg);
  const Index n = m.n();
  const Index max_outer = cfg.max_outer > 0 ? cfg.max_outer : 1000;
  const Index batch = cfg.spgd_l > 0 ? cfg.spgd_l : std::min<Index>(n, 10);
  if (batch < 1 || batch > n)
    throw std::invalid_argument("spgd: mini-batch size must be in [1, n]");
  const Index inner = cfg.spgd_T > 0 ? cfg.spgd_T : std::max<Index>(1, (2 * n + batch - 1) / batch);
  if (inner < 1) throw std::invalid_argument("spgd: inner loop length must be at least 1");
  const auto t0 = detail::clock_now();

  detail::ActiveProblem prob(m, w, detail::initial_beta(m, cfg));
  const double eta = cfg.eta > 0.0 ? cfg.eta : 0.1 / lipschitz_estimate(prob.X);
  if (!(eta > 0.0)) throw std::invalid_argument("spgd: eta must be positive");

  std::mt19937_64 rng(cfg.seed);
  detail::BatchSampler sampler(n, rng);
  std::vector<Index> rows;
  detail::StallDetector stall{cfg.stall_window};

  // row-major mirror of the active columns for fast mini-batch access
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMatrix rows_x = prob.X;

  SolveResult res;
  res.config = ConfigEcho{to_string(SolverMode::spgd), cfg.epsilon, max_outer, cfg.screening,
                          inner,    batch,             eta,        cfg.seed};
  Index iter = 0;
  const double scale_nl = static_cast<double>(n) / static_cast<double>(batch);
  while (iter < max_outer) {
    ++iter;
    auto [cert, corr] = prob.certificate();
    res.trace.rows.push_back({iter, cert.gap, prob.size(), 0.0, detail::ms_since(t0)});
    res.active_history.push_back(prob.size());
    if (cfg.observer) cfg.observer(IterationInfo{iter, cert, prob.active});

    if (cert.gap <= cfg.epsilon) {
      if (gap_certificate(m, prob.beta_full(), w).gap <= cfg.epsilon) break;
    }
    if (stall.stalled(iter, cert.gap)) break;

    if (cfg.screening) {
      ActiveSet next = screen_iterative(prob.active, corr, prob.col_norms, cert.gap, w);
      if (next.size() < prob.size()) {
        prob.shrink_to(next);
        if (prob.size() == 0) break;
        rows_x = prob.X;
      }
    }

    // full gradient at the snapshot point
    const Vector snapshot = prob.beta;
    Vector full_grad = prob.X.transpose() * (prob.X * snapshot - m.y);
    Vector iterate = snapshot;
    Vector direction(prob.size());
    for (Index t = 0; t < inner; ++t) {
      sampler.sample(batch, rows);
      direction = full_grad;
      for (Index i : rows) {
        const auto row = rows_x.row(i);
        const double r_new = row.dot(iterate) - m.y[i];
        const double r_old = row.dot(snapshot) - m.y[i];
        direction.noalias() += (scale_nl * (r_new - r_old)) * row.transpose();
      }
      iterate = prox_owl(iterate - eta * direction, prob.weights, eta);
      if (!iterate.allFinite())
        throw std::runtime_error("divergence (step too large); reduce eta");
    }
    prob.beta = std::move(iterate);
  }

  res.beta = prob.beta_full();
  res.certificate = gap_certificate(m, res.beta, w);
  res.converged = res.certificate.gap <= cfg.epsilon;
  res.iterations = iter;
  res.final_active = prob.active.indices();
  res.trace.finalize_rates(m.d(), prob.active.size());
  res.wall_ms = detail::ms_since(t0);
  return res;
}

inline SolveResult solve(const DesignMatrix& m, const WeightVector& w, const SolverConfig& cfg) {
  return cfg.mode == SolverMode::apgd ? apgd(m, w, cfg) : spgd(m, w, cfg);
}

/// Solves a sequence of weight vectors in order, seeding every solve with the
/// previous solution. Screening state never carries over, only beta.
inline std::vector<SolveResult> solve_path(const DesignMatrix& m,
                                           const std::vector<WeightVector>& weights,
                                           const SolverConfig& cfg) {
  for (const auto& w : weights)
    if (w.size() != m.d()) throw std::invalid_argument("solve_path: weight length mismatch");
  std::vector<SolveResult> results;
  results.reserve(weights.size());
  std::optional<Vector> warm = cfg.warm_start_beta;
  for (const auto& w : weights) {
    SolverConfig step_cfg = cfg;
    step_cfg.warm_start_beta = warm;
    results.push_back(solve(m, w, step_cfg));
    warm = results.back().beta;
  }
  return results;
}

}  // namespace owl
