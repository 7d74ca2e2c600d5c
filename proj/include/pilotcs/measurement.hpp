// SPDX-License-Identifier: Apache-2.0
//
// The measurement model. A MeasurementOperator is the M x N row-wise
// concatenation of q full circulants, each generated by one base
// sequence as its first row; it is stored implicitly through the base
// sequences and their first-column spectra, giving O(M log M) forward
// and adjoint products per block.
//
// linear_convolve / fold_to_circular realize the front half of the
// model: the banded Toeplitz convolution of a pilot with one channel,
// and the linear-to-circular fold that turns its output into one
// circulant-block product.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pilotcs/correlation.hpp"
#include "pilotcs/fft.hpp"
#include "pilotcs/pilot.hpp"
#include "pilotcs/sequence.hpp"

namespace pilotcs {

/// Linear convolution of a pilot waveform with a length-L channel tap
/// vector; output has length M + L - 1. The pilot is NOT extended
/// periodically here, matching the banded Toeplitz model of a one-shot
/// transmission.
inline cvec linear_convolve(const PeriodicSequence& pilot, const cvec& taps) {
  const int m = pilot.period();
  const int l = static_cast<int>(taps.size());
  if (l < 1 || l > m) throw std::invalid_argument("linear_convolve: requires 1 <= L <= M");
  cvec out(static_cast<std::size_t>(m + l - 1), cplx(0.0, 0.0));
  for (int c = 0; c < l; ++c) {
    const cplx tap = taps[static_cast<std::size_t>(c)];
    for (int k = 0; k < m; ++k) out[static_cast<std::size_t>(k + c)] += pilot.values()[static_cast<std::size_t>(k)] * tap;
  }
  return out;
}

/// Fold the length M+L-1 linear-convolution output to the length-M
/// circular model: add the first L-1 samples onto the last L-1, keep
/// samples L..M+L-1.
inline cvec fold_to_circular(const cvec& y0, int m, int l) {
  if (static_cast<int>(y0.size()) != m + l - 1)
    throw std::invalid_argument("fold_to_circular: expected length M+L-1");
  cvec out(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    cplx v = y0[static_cast<std::size_t>(j + l - 1)];
    if (j + l - 1 >= m) v += y0[static_cast<std::size_t>(j + l - 1 - m)];
    out[static_cast<std::size_t>(j)] = v;
  }
  return out;
}

/// Dense row-major complex matrix, used only for materialized operators
/// and test oracles.
struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  cvec data;

  cplx& at(int r, int c) { return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)]; }
  const cplx& at(int r, int c) const { return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)]; }

  cvec multiply(const cvec& x) const {
    if (static_cast<int>(x.size()) != cols) throw std::invalid_argument("DenseMatrix::multiply: size mismatch");
    cvec y(static_cast<std::size_t>(rows), cplx(0.0, 0.0));
    for (int r = 0; r < rows; ++r) {
      cplx acc(0.0, 0.0);
      for (int c = 0; c < cols; ++c) acc += at(r, c) * x[static_cast<std::size_t>(c)];
      y[static_cast<std::size_t>(r)] = acc;
    }
    return y;
  }
};

class MeasurementOperator {
 public:
  explicit MeasurementOperator(std::vector<PeriodicSequence> bases) : bases_(std::move(bases)) {
    if (bases_.empty()) throw std::invalid_argument("MeasurementOperator: needs at least one base sequence");
    m_ = bases_.front().period();
    for (const auto& b : bases_)
      if (b.period() != m_) throw std::invalid_argument("MeasurementOperator: mixed base periods");
    spectra_.reserve(bases_.size());
    for (const auto& b : bases_) {
      // first column of the circulant with first row b: c(r) = b(-r)
      cvec column(static_cast<std::size_t>(m_));
      for (int r = 0; r < m_; ++r) column[static_cast<std::size_t>(r)] = b[-r];
      fft_inplace(column);
      spectra_.push_back(std::move(column));
    }
  }

  static MeasurementOperator from_plan(const PilotPlan& plan) {
    return MeasurementOperator(plan.base_family.sequences);
  }

  int rows() const { return m_; }
  int blocks() const { return static_cast<int>(bases_.size()); }
  int cols() const { return m_ * blocks(); }
  const std::vector<PeriodicSequence>& bases() const { return bases_; }
  const std::vector<cvec>& spectra() const { return spectra_; }

  /// y = Phi h: sum of the q circulant-block products, done as one
  /// inverse transform of the accumulated block spectra.
  cvec forward(const cvec& h) const {
    if (static_cast<int>(h.size()) != cols())
      throw std::invalid_argument("forward: expected length N = qM");
    const std::size_t m = static_cast<std::size_t>(m_);
    cvec acc(m, cplx(0.0, 0.0));
    cvec block(m);
    for (std::size_t u = 0; u < bases_.size(); ++u) {
      std::copy(h.begin() + static_cast<std::ptrdiff_t>(u * m),
                h.begin() + static_cast<std::ptrdiff_t>((u + 1) * m), block.begin());
      fft_inplace(block);
      const cvec& spectrum = spectra_[u];
      for (std::size_t k = 0; k < m; ++k) acc[k] += spectrum[k] * block[k];
    }
    ifft_inplace(acc);
    return acc;
  }

  /// Phi^H y, block u = C(b_u)^H y via conjugated spectra.
  cvec adjoint(const cvec& y) const {
    if (static_cast<int>(y.size()) != rows())
      throw std::invalid_argument("adjoint: expected length M");
    const std::size_t m = static_cast<std::size_t>(m_);
    cvec spectrum_y = fft(y);
    cvec out(static_cast<std::size_t>(cols()));
    cvec block(m);
    for (std::size_t u = 0; u < bases_.size(); ++u) {
      for (std::size_t k = 0; k < m; ++k) block[k] = std::conj(spectra_[u][k]) * spectrum_y[k];
      ifft_inplace(block);
      std::copy(block.begin(), block.end(), out.begin() + static_cast<std::ptrdiff_t>(u * m));
    }
    return out;
  }

  /// Dense concatenation [A^{b_1} ... A^{b_q}], entry (r, uM+c) = b_u(c-r).
  DenseMatrix materialize(std::size_t max_entries = std::size_t{1} << 22) const {
    const std::size_t entries = static_cast<std::size_t>(rows()) * static_cast<std::size_t>(cols());
    if (entries > max_entries)
      throw std::invalid_argument("materialize: " + std::to_string(rows()) + "x" + std::to_string(cols()) +
                                  " = " + std::to_string(entries) + " entries exceeds threshold " +
                                  std::to_string(max_entries));
    DenseMatrix dense;
    dense.rows = rows();
    dense.cols = cols();
    dense.data.resize(entries);
    for (int u = 0; u < blocks(); ++u) {
      const PeriodicSequence& b = bases_[static_cast<std::size_t>(u)];
      for (int r = 0; r < m_; ++r)
        for (int c = 0; c < m_; ++c) dense.at(r, u * m_ + c) = b[c - r];
    }
    return dense;
  }

 private:
  std::vector<PeriodicSequence> bases_;
  int m_ = 0;
  std::vector<cvec> spectra_;
};

/// Exact coherence: every inner product between distinct columns of the
/// concatenation is a periodic correlation value of the base sequences,
/// so the maximum is the merged correlation profile of the bases.
inline double coherence(const MeasurementOperator& op) {
  const CorrelationProfile profile =
      correlation_profile(std::span<const PeriodicSequence>(op.bases()));
  return std::max(profile.theta_a, profile.theta_c.value_or(0.0));
}

/// Exact squared spectral norm: Phi Phi^H is diagonalized by the DFT, so
/// ||Phi||_2^2 = max_k sum_u |spectrum_u(k)|^2.
inline double spectral_norm_sq(const MeasurementOperator& op) {
  double peak = 0.0;
  for (int k = 0; k < op.rows(); ++k) {
    double bin = 0.0;
    for (const cvec& spectrum : op.spectra()) bin += std::norm(spectrum[static_cast<std::size_t>(k)]);
    peak = std::max(peak, bin);
  }
  return peak;
}

/// Left-hand side of the coherence recovery condition,
/// sqrt(mu^2 K c0 log N) + (K/N) ||Phi||_2^2, reported as a diagnostic.
/// Natural log by default; the base is a knob since the bounding
/// constant absorbs it.
inline double guarantee_margin(double mu, double snorm_sq, long long k, long long n, double c0,
                               double log_base = std::numbers::e) {
  if (k < 0 || n < 2 || c0 < 1.0)
    throw std::invalid_argument("guarantee_margin: requires K >= 0, N >= 2, c0 >= 1");
  const double log_n = std::log(static_cast<double>(n)) / std::log(log_base);
  const double kd = static_cast<double>(k);
  return std::sqrt(mu * mu * kd * c0 * log_n) + kd / static_cast<double>(n) * snorm_sq;
}

struct AnalysisReport {
  int m = 0;
  int n = 0;
  int q = 0;
  double coherence = 0.0;
  double welch = 0.0;
  double spectral_norm_sq = 0.0;
  double spectral_lower = 0.0;  // N/M
  double spectral_upper = 0.0;  // (N/M)(1 + theta_a (M-1))
  double theta_a = 0.0;
  std::optional<double> theta_c;
  long long margin_k = 0;
  double c0 = 1.0;
  double guarantee_margin = 0.0;

  /// Both coherence and spectral sandwiches, with additive slack.
  bool sandwiches_hold(double slack = 1e-9) const {
    const double mu_upper = std::max(theta_a, theta_c.value_or(0.0));
    return coherence >= welch - slack && coherence <= mu_upper + slack &&
           spectral_norm_sq >= spectral_lower - slack && spectral_norm_sq <= spectral_upper + slack;
  }
};

inline AnalysisReport analyze_operator(const MeasurementOperator& op, long long margin_k, double c0 = 1.0) {
  AnalysisReport report;
  report.m = op.rows();
  report.n = op.cols();
  report.q = op.blocks();
  const CorrelationProfile profile =
      correlation_profile(std::span<const PeriodicSequence>(op.bases()));
  report.theta_a = profile.theta_a;
  report.theta_c = profile.theta_c;
  report.coherence = std::max(profile.theta_a, profile.theta_c.value_or(0.0));
  report.welch = welch_bound(report.m, report.n);
  report.spectral_norm_sq = spectral_norm_sq(op);
  const double ratio = static_cast<double>(report.n) / static_cast<double>(report.m);
  report.spectral_lower = ratio;
  report.spectral_upper = ratio * (1.0 + report.theta_a * static_cast<double>(report.m - 1));
  report.margin_k = margin_k;
  report.c0 = c0;
  report.guarantee_margin = guarantee_margin(report.coherence, report.spectral_norm_sq, margin_k, report.n, c0);
  return report;
}

}  // namespace pilotcs
