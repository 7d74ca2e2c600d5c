// SPDX-License-Identifier: Apache-2.0
//
// Sparse recovery: unconstrained LASSO by proximal-gradient shrinkage
// with continuation over a decreasing lambda schedule, and basis pursuit
// as its small-lambda limit with active-set least-squares debiasing.
// Needs only forward/adjoint applications of the operator; the step size
// comes from the operator's exact squared spectral norm.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pilotcs/correlation.hpp"
#include "pilotcs/measurement.hpp"

namespace pilotcs {

struct SolverIteration {
  int stage = 0;
  int iteration = 0;  // global count
  double lambda = 0.0;
  double objective = 0.0;      // 0.5||Phi h - y||^2 + lambda ||h||_1 at the current iterate
  double residual_norm = 0.0;  // ||Phi h - y||
};

struct SolverConfig {
  double lambda = 0.0;          // target LASSO weight (basis pursuit: lambda_min override)
  int continuation_steps = 20;
  int max_iters = 20000;        // total iteration budget across stages
  double rel_tol = 1e-6;
  enum class StepRule { fixed_from_norm_bound, backtracking };
  StepRule step_rule = StepRule::fixed_from_norm_bound;
  bool debias = true;
  double support_threshold = 1e-3;  // relative magnitude cutoff for the active set
  std::function<void(const SolverIteration&)> trace;  // optional per-iteration hook

  void validate() const {
    if (lambda < 0.0) throw std::invalid_argument("SolverConfig: lambda must be nonnegative");
    if (continuation_steps < 1) throw std::invalid_argument("SolverConfig: continuation_steps must be >= 1");
    if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("SolverConfig: rel_tol must be positive");
    if (!(support_threshold > 0.0)) throw std::invalid_argument("SolverConfig: support_threshold must be positive");
  }
};

struct RecoveryResult {
  cvec estimate;
  int iterations = 0;
  double final_objective = 0.0;
  std::vector<int> support_estimate;
  bool converged = false;
};

inline cplx soft_threshold(const cplx& z, double tau) {
  const double magnitude = std::abs(z);
  if (magnitude <= tau) return {0.0, 0.0};
  return z * ((magnitude - tau) / magnitude);
}

/// Indices with |h_i| >= threshold * max|h|, ascending.
inline std::vector<int> detect_support(const cvec& h, double relative_threshold) {
  double peak = 0.0;
  for (const cplx& v : h) peak = std::max(peak, std::abs(v));
  std::vector<int> support;
  if (peak <= 0.0) return support;
  const double cutoff = relative_threshold * peak;
  for (std::size_t i = 0; i < h.size(); ++i)
    if (std::abs(h[i]) >= cutoff) support.push_back(static_cast<int>(i));
  return support;
}

namespace detail {

inline double norm2(const cvec& x) {
  double acc = 0.0;
  for (const cplx& v : x) acc += std::norm(v);
  return std::sqrt(acc);
}

inline double norm1(const cvec& x) {
  double acc = 0.0;
  for (const cplx& v : x) acc += std::abs(v);
  return acc;
}

inline double norm_inf(const cvec& x) {
  double acc = 0.0;
  for (const cplx& v : x) acc = std::max(acc, std::abs(v));
  return acc;
}

inline void check_finite(const cvec& x, const char* what) {
  for (const cplx& v : x)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument(std::string(what) + ": non-finite input");
}

/// Hermitian positive-definite solve via in-place Cholesky; returns
/// false when a pivot collapses (rank-deficient Gram).
inline bool cholesky_solve(std::vector<cvec>& gram, cvec& rhs) {
  const std::size_t n = gram.size();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(gram[i][i].real()));
  if (scale <= 0.0) return false;
  for (std::size_t j = 0; j < n; ++j) {
    double diag = gram[j][j].real();
    for (std::size_t k = 0; k < j; ++k) diag -= std::norm(gram[j][k]);
    if (diag <= 1e-12 * scale) return false;
    const double root = std::sqrt(diag);
    gram[j][j] = root;
    for (std::size_t i = j + 1; i < n; ++i) {
      cplx v = gram[i][j];
      for (std::size_t k = 0; k < j; ++k) v -= gram[i][k] * std::conj(gram[j][k]);
      gram[i][j] = v / root;
    }
  }
  // forward substitution L z = rhs
  for (std::size_t i = 0; i < n; ++i) {
    cplx v = rhs[i];
    for (std::size_t k = 0; k < i; ++k) v -= gram[i][k] * rhs[k];
    rhs[i] = v / gram[i][i].real();
  }
  // backward substitution L^H x = z
  for (std::size_t ii = n; ii-- > 0;) {
    cplx v = rhs[ii];
    for (std::size_t k = ii + 1; k < n; ++k) v -= std::conj(gram[k][ii]) * rhs[k];
    rhs[ii] = v / gram[ii][ii].real();
  }
  return true;
}

/// CGLS on the support-restricted system, used when the Gram matrix is
/// numerically rank-deficient.
inline cvec cgls_on_support(const MeasurementOperator& op, const std::vector<int>& support,
                            const cvec& y) {
  const std::size_t n = static_cast<std::size_t>(op.cols());
  const auto scatter = [&](const cvec& small) {
    cvec full(n, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < support.size(); ++i)
      full[static_cast<std::size_t>(support[i])] = small[i];
    return full;
  };
  const auto gather = [&](const cvec& full) {
    cvec small(support.size());
    for (std::size_t i = 0; i < support.size(); ++i)
      small[i] = full[static_cast<std::size_t>(support[i])];
    return small;
  };
  cvec x(support.size(), cplx(0.0, 0.0));
  cvec residual = y;
  cvec s = gather(op.adjoint(residual));
  cvec direction = s;
  double gamma = 0.0;
  for (const cplx& v : s) gamma += std::norm(v);
  const double gamma0 = gamma;
  if (gamma0 <= 0.0) return x;
  const int max_rounds = 4 * static_cast<int>(support.size()) + 16;
  for (int round = 0; round < max_rounds && gamma > 1e-28 * gamma0; ++round) {
    const cvec image = op.forward(scatter(direction));
    double image_sq = 0.0;
    for (const cplx& v : image) image_sq += std::norm(v);
    if (image_sq <= 0.0) break;
    const double alpha = gamma / image_sq;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += alpha * direction[i];
    for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= alpha * image[i];
    s = gather(op.adjoint(residual));
    double gamma_next = 0.0;
    for (const cplx& v : s) gamma_next += std::norm(v);
    const double beta = gamma_next / gamma;
    gamma = gamma_next;
    for (std::size_t i = 0; i < direction.size(); ++i) direction[i] = s[i] + beta * direction[i];
  }
  return x;
}

}  // namespace detail

/// Least squares restricted to the given support columns, returned as a
/// full-length vector (zeros off support). The Gram matrix is assembled
/// exactly from periodic correlations of the base sequences; a CGLS pass
/// through forward/adjoint covers the rank-deficient fallback.
inline cvec debias_on_support(const MeasurementOperator& op, const std::vector<int>& support,
                              const cvec& y) {
  const std::size_t n = static_cast<std::size_t>(op.cols());
  cvec full(n, cplx(0.0, 0.0));
  if (support.empty()) return full;
  if (static_cast<int>(support.size()) > op.rows())
    throw std::invalid_argument("debias_on_support: overdetermined support, |S| > M");
  for (int idx : support)
    if (idx < 0 || idx >= op.cols())
      throw std::invalid_argument("debias_on_support: support index out of range");

  const int m = op.rows();
  const int q = op.blocks();
  // all-lag crosscorrelations between bases; Gram entries are lookups
  std::vector<std::vector<cvec>> xcorr(static_cast<std::size_t>(q));
  for (int u = 0; u < q; ++u) {
    xcorr[static_cast<std::size_t>(u)].resize(static_cast<std::size_t>(q));
    for (int v = 0; v < q; ++v)
      xcorr[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] =
          crosscorr_all_lags(op.bases()[static_cast<std::size_t>(u)],
                             op.bases()[static_cast<std::size_t>(v)]);
  }
  const std::size_t k = support.size();
  std::vector<cvec> gram(k, cvec(k));
  for (std::size_t i = 0; i < k; ++i) {
    const int u_i = support[i] / m;
    const int c_i = support[i] % m;
    for (std::size_t j = 0; j < k; ++j) {
      const int u_j = support[j] / m;
      const int c_j = support[j] % m;
      const int lag = ((c_j - c_i) % m + m) % m;
      // (A^H A)(i,j) = conj(theta(b_{u_i}, b_{u_j})(c_j - c_i))
      gram[i][j] = std::conj(
          xcorr[static_cast<std::size_t>(u_i)][static_cast<std::size_t>(u_j)][static_cast<std::size_t>(lag)]);
    }
  }
  const cvec correlation_full = op.adjoint(y);
  cvec rhs(k);
  for (std::size_t i = 0; i < k; ++i) rhs[i] = correlation_full[static_cast<std::size_t>(support[i])];

  cvec solution;
  if (detail::cholesky_solve(gram, rhs)) {
    solution = std::move(rhs);
  } else {
    solution = detail::cgls_on_support(op, support, y);
  }
  for (std::size_t i = 0; i < k; ++i) full[static_cast<std::size_t>(support[i])] = solution[i];
  return full;
}

namespace detail {

struct FpcOptions {
  double lambda_target = 0.0;
  double early_exit_residual = -1.0;  // relative; <0 disables the active-set early exit
};

inline RecoveryResult run_fpc(const MeasurementOperator& op, const cvec& y, const SolverConfig& cfg,
                              const FpcOptions& options) {
  cfg.validate();
  check_finite(y, "solver measurement");
  if (static_cast<int>(y.size()) != op.rows())
    throw std::invalid_argument("solver: measurement length != M");

  const std::size_t n = static_cast<std::size_t>(op.cols());
  RecoveryResult result;
  result.estimate.assign(n, cplx(0.0, 0.0));

  const double y_norm = norm2(y);
  const double lambda_max = norm_inf(op.adjoint(y));
  if (lambda_max <= 0.0) {
    result.converged = true;
    return result;
  }

  const double lambda_target = std::max(options.lambda_target, 1e-12 * lambda_max);
  const double lambda_start = 0.5 * lambda_max;
  std::vector<double> schedule;
  if (lambda_target >= lambda_start) {
    schedule.push_back(lambda_target);
  } else {
    const int stages = cfg.continuation_steps;
    const double ratio = std::pow(lambda_target / lambda_start,
                                  stages > 1 ? 1.0 / static_cast<double>(stages - 1) : 1.0);
    double lambda = lambda_start;
    for (int stage = 0; stage < stages; ++stage) {
      schedule.push_back(stage + 1 == stages ? lambda_target : lambda);
      lambda *= ratio;
    }
  }

  const double fixed_step = 1.0 / spectral_norm_sq(op);
  cvec h = result.estimate;
  cvec residual = y;  // Phi h - y, negated convention handled below
  for (std::size_t i = 0; i < residual.size(); ++i) residual[i] = -y[i];
  int total_iterations = 0;
  bool final_stage_converged = false;

  for (std::size_t stage = 0; stage < schedule.size() && total_iterations < cfg.max_iters; ++stage) {
    const double lambda = schedule[stage];
    const bool final_stage = stage + 1 == schedule.size();
    const double stage_tol = final_stage ? cfg.rel_tol : std::max(cfg.rel_tol, 1e-4);
    bool stage_converged = false;

    while (total_iterations < cfg.max_iters && !stage_converged) {
      const double residual_norm = norm2(residual);
      if (cfg.trace) {
        SolverIteration info;
        info.stage = static_cast<int>(stage);
        info.iteration = total_iterations;
        info.lambda = lambda;
        info.residual_norm = residual_norm;
        info.objective = 0.5 * residual_norm * residual_norm + lambda * norm1(h);
        cfg.trace(info);
      }
      const cvec gradient = op.adjoint(residual);
      double step = fixed_step;
      cvec h_next(n);
      if (cfg.step_rule == SolverConfig::StepRule::backtracking) {
        // shrink until the quadratic model majorizes the smooth part
        const double g_current = 0.5 * residual_norm * residual_norm;
        for (int attempt = 0; attempt < 60; ++attempt) {
          for (std::size_t i = 0; i < n; ++i)
            h_next[i] = soft_threshold(h[i] - step * gradient[i], step * lambda);
          cvec trial_residual = op.forward(h_next);
          for (std::size_t i = 0; i < trial_residual.size(); ++i) trial_residual[i] -= y[i];
          double g_trial = 0.0;
          for (const cplx& v : trial_residual) g_trial += 0.5 * std::norm(v);
          double quad = g_current;
          double diff_sq = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            const cplx d = h_next[i] - h[i];
            quad += (std::conj(gradient[i]) * d).real();
            diff_sq += std::norm(d);
          }
          quad += diff_sq / (2.0 * step);
          if (g_trial <= quad + 1e-15 * std::max(1.0, g_trial)) {
            residual = std::move(trial_residual);
            break;
          }
          step *= 0.5;
        }
      } else {
        for (std::size_t i = 0; i < n; ++i)
          h_next[i] = soft_threshold(h[i] - step * gradient[i], step * lambda);
        residual = op.forward(h_next);
        for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= y[i];
      }

      double change_sq = 0.0;
      double h_sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        change_sq += std::norm(h_next[i] - h[i]);
        h_sq += std::norm(h[i]);
      }
      h = std::move(h_next);
      ++total_iterations;
      if (std::sqrt(change_sq) <= stage_tol * std::max(std::sqrt(h_sq), 1e-12)) stage_converged = true;
    }
    if (final_stage) final_stage_converged = stage_converged;

    // active-set early exit: a small support whose least-squares fit
    // already explains y is the solution
    if (options.early_exit_residual >= 0.0 && cfg.debias) {
      const std::vector<int> support = detect_support(h, cfg.support_threshold);
      if (!support.empty() && static_cast<int>(support.size()) <= op.rows() / 2) {
        cvec candidate = debias_on_support(op, support, y);
        cvec fit = op.forward(candidate);
        for (std::size_t i = 0; i < fit.size(); ++i) fit[i] -= y[i];
        if (norm2(fit) <= options.early_exit_residual * y_norm) {
          result.estimate = std::move(candidate);
          result.iterations = total_iterations;
          result.support_estimate = support;
          result.converged = true;
          const double final_residual = norm2(fit);
          result.final_objective = 0.5 * final_residual * final_residual +
                                   lambda_target * norm1(result.estimate);
          return result;
        }
      }
    }
  }

  result.support_estimate = detect_support(h, cfg.support_threshold);
  if (cfg.debias && !result.support_estimate.empty() &&
      static_cast<int>(result.support_estimate.size()) <= op.rows()) {
    h = debias_on_support(op, result.support_estimate, y);
    residual = op.forward(h);
    for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= y[i];
  }
  result.estimate = std::move(h);
  result.iterations = total_iterations;
  result.converged = final_stage_converged;
  const double final_residual = norm2(residual);
  result.final_objective =
      0.5 * final_residual * final_residual + lambda_target * norm1(result.estimate);
  return result;
}

}  // namespace detail

/// Approximate minimizer of 0.5||Phi h - y||_2^2 + lambda ||h||_1.
inline RecoveryResult lasso(const MeasurementOperator& op, const cvec& y, const SolverConfig& cfg) {
  detail::FpcOptions options;
  options.lambda_target = cfg.lambda;
  options.early_exit_residual = -1.0;
  return detail::run_fpc(op, y, cfg, options);
}

/// l1-minimization subject to Phi h = y, run as LASSO continuation with
/// lambda -> lambda_min plus a final active-set debias. `converged`
/// reports whether the returned estimate reproduces y to 1e-6 relative.
inline RecoveryResult basis_pursuit(const MeasurementOperator& op, const cvec& y,
                                    const SolverConfig& cfg) {
  detail::check_finite(y, "basis_pursuit measurement");
  const double y_norm = detail::norm2(y);
  if (y_norm <= 0.0) {
    RecoveryResult result;
    result.estimate.assign(static_cast<std::size_t>(op.cols()), cplx(0.0, 0.0));
    result.converged = true;
    return result;
  }
  SolverConfig bp_cfg = cfg;
  bp_cfg.debias = true;
  const double lambda_max = detail::norm_inf(op.adjoint(y));
  detail::FpcOptions options;
  options.lambda_target = cfg.lambda > 0.0 ? cfg.lambda : 1e-6 * lambda_max;
  options.early_exit_residual = 1e-10;
  bp_cfg.lambda = options.lambda_target;
  RecoveryResult result = detail::run_fpc(op, y, bp_cfg, options);
  cvec fit = op.forward(result.estimate);
  for (std::size_t i = 0; i < fit.size(); ++i) fit[i] -= y[i];
  result.converged = detail::norm2(fit) <= 1e-6 * y_norm;
  return result;
}

}  // namespace pilotcs
