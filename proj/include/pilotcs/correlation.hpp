// SPDX-License-Identifier: Apache-2.0
//
// Periodic auto/crosscorrelation functions, family correlation profiles
// (theta_a, theta_c) and the Welch/Sarwate bounds.
//
// Convention: theta(a,b)(l) = sum_{k=0}^{M-1} a(k) * conj(b(k+l)), with b
// extended periodically. periodic_crosscorr evaluates this sum directly
// and doubles as the reference for the transform-based all-lags path.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pilotcs/fft.hpp"
#include "pilotcs/sequence.hpp"

namespace pilotcs {

/// Direct evaluation of the periodic crosscorrelation at one lag.
inline cplx periodic_crosscorr(const PeriodicSequence& a, const PeriodicSequence& b,
                               long long lag) {
  if (a.period() != b.period())
    throw std::invalid_argument("periodic_crosscorr: period mismatch");
  const int period = a.period();
  cplx acc(0.0, 0.0);
  for (int k = 0; k < period; ++k) acc += a[k] * std::conj(b[k + lag]);
  return acc;
}

/// All lags 0..M-1 of theta(a,b) in one pass via frequency-domain products.
/// With A = FFT(a), B = FFT(b): theta(a,b)(l) = IFFT(A .* conj(B))((M-l) mod M).
inline cvec crosscorr_all_lags(const PeriodicSequence& a, const PeriodicSequence& b) {
  if (a.period() != b.period())
    throw std::invalid_argument("crosscorr_all_lags: period mismatch");
  const std::size_t period = static_cast<std::size_t>(a.period());
  cvec fa = fft(a.values());
  const cvec fb = fft(b.values());
  for (std::size_t k = 0; k < period; ++k) fa[k] *= std::conj(fb[k]);
  ifft_inplace(fa);
  cvec out(period);
  for (std::size_t l = 0; l < period; ++l) out[l] = fa[(period - l) % period];
  return out;
}

struct CorrelationProfile {
  double theta_a = 0.0;
  std::optional<double> theta_c;
  int family_size = 0;
  int period = 0;
};

/// Profile over an explicit member list; used by the family constructors.
inline CorrelationProfile correlation_profile(std::span<const PeriodicSequence> members) {
  if (members.empty()) throw std::invalid_argument("correlation_profile: empty family");
  const std::size_t period = static_cast<std::size_t>(members.front().period());
  for (const auto& s : members)
    if (static_cast<std::size_t>(s.period()) != period)
      throw std::invalid_argument("correlation_profile: mixed periods in family");

  std::vector<cvec> spectra;
  spectra.reserve(members.size());
  for (const auto& s : members) spectra.push_back(fft(s.values()));

  const auto max_abs_corr = [&](std::size_t u, std::size_t v, bool skip_zero_lag) {
    cvec prod(period);
    for (std::size_t k = 0; k < period; ++k) prod[k] = spectra[u][k] * std::conj(spectra[v][k]);
    ifft_inplace(prod);
    double peak = 0.0;
    for (std::size_t l = skip_zero_lag ? 1 : 0; l < period; ++l)
      peak = std::max(peak, std::abs(prod[l]));
    return peak;
  };

  CorrelationProfile profile;
  profile.family_size = static_cast<int>(members.size());
  profile.period = static_cast<int>(period);
  for (std::size_t u = 0; u < members.size(); ++u)
    profile.theta_a = std::max(profile.theta_a, max_abs_corr(u, u, true));
  if (members.size() >= 2) {
    double theta_c = 0.0;
    for (std::size_t u = 0; u < members.size(); ++u)
      for (std::size_t v = u + 1; v < members.size(); ++v)
        theta_c = std::max(theta_c, max_abs_corr(u, v, false));
    profile.theta_c = theta_c;
  }
  return profile;
}

inline CorrelationProfile correlation_profile(const SequenceFamily& family) {
  return correlation_profile(std::span<const PeriodicSequence>(family.sequences));
}

/// Assemble a SequenceFamily with its profile filled in.
inline SequenceFamily make_family(FamilyKind kind, std::vector<PeriodicSequence> sequences) {
  const CorrelationProfile profile =
      correlation_profile(std::span<const PeriodicSequence>(sequences));
  SequenceFamily family;
  family.sequences = std::move(sequences);
  family.kind = kind;
  family.theta_a = profile.theta_a;
  family.theta_c = profile.theta_c;
  return family;
}

/// Left-hand side of the Sarwate tradeoff for a family profile; the bound
/// is lhs >= 1/M^2 for any unit-energy family with at least two members.
inline double sarwate_lhs(const CorrelationProfile& profile) {
  if (profile.family_size < 2)
    throw std::invalid_argument("sarwate_lhs: needs a family of size >= 2");
  const double m = static_cast<double>(profile.period);
  const double t = static_cast<double>(profile.family_size);
  const double theta_c = profile.theta_c.value();
  return theta_c * theta_c / m +
         (m - 1.0) / (m * (t - 1.0)) * (profile.theta_a * profile.theta_a / m);
}

/// Lower bound on the coherence of any M x N matrix with unit-norm columns.
inline double welch_bound(long long m, long long n) {
  if (m < 1 || n < 2 || n < m) throw std::invalid_argument("welch_bound: requires N >= M >= 1, N >= 2");
  return std::sqrt(static_cast<double>(n - m) /
                   (static_cast<double>(m) * static_cast<double>(n - 1)));
}

}  // namespace pilotcs
