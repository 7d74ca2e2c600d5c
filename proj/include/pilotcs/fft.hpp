// SPDX-License-Identifier: Apache-2.0
//
// Radix-2 FFT with a Bluestein fallback for arbitrary transform lengths.
// All circulant products and periodic correlations in this library run
// through these transforms, so they are kept dependency-free and exactly
// reproducible: no global state, per-thread plan caches, plain IEEE
// arithmetic.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace pilotcs {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

// Twiddle table for a power-of-two transform: tw[j] = exp(-2*pi*i*j/n), j < n/2.
struct Pow2Plan {
  std::size_t n = 0;
  cvec tw;
};

inline const Pow2Plan& pow2_plan(std::size_t n) {
  thread_local std::unordered_map<std::size_t, Pow2Plan> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Pow2Plan plan;
  plan.n = n;
  plan.tw.resize(n / 2);
  for (std::size_t j = 0; j < n / 2; ++j) {
    const double ang = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    plan.tw[j] = std::polar(1.0, ang);
  }
  return cache.emplace(n, std::move(plan)).first->second;
}

inline void fft_pow2(cplx* x, std::size_t n, bool inverse) {
  if (n <= 1) return;
  const Pow2Plan& plan = pow2_plan(n);
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < half; ++j) {
        cplx w = plan.tw[j * step];
        if (inverse) w = std::conj(w);
        const cplx u = x[i + j];
        const cplx v = x[i + j + half] * w;
        x[i + j] = u + v;
        x[i + j + half] = u - v;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) x[i] *= scale;
  }
}

// Chirp-z (Bluestein) plan: DFT of length n via convolution at pow2 length m.
struct BluesteinPlan {
  std::size_t n = 0;
  std::size_t m = 0;
  cvec chirp;  // chirp[k] = exp(-i*pi*k^2/n), k < n
  cvec bfft;   // FFT_m of the symmetric conjugate-chirp kernel
};

inline const BluesteinPlan& bluestein_plan(std::size_t n) {
  thread_local std::unordered_map<std::size_t, BluesteinPlan> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  BluesteinPlan plan;
  plan.n = n;
  plan.m = next_pow2(2 * n - 1);
  plan.chirp.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 reduced mod 2n keeps the trig argument small
    const std::size_t k2 = (k * k) % (2 * n);
    const double ang = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
    plan.chirp[k] = std::polar(1.0, ang);
  }
  cvec b(plan.m, cplx(0.0, 0.0));
  for (std::size_t k = 0; k < n; ++k) {
    b[k] = std::conj(plan.chirp[k]);
    if (k != 0) b[plan.m - k] = std::conj(plan.chirp[k]);
  }
  fft_pow2(b.data(), plan.m, false);
  plan.bfft = std::move(b);
  return cache.emplace(n, std::move(plan)).first->second;
}

inline void fft_bluestein(cplx* x, std::size_t n) {
  const BluesteinPlan& plan = bluestein_plan(n);
  cvec a(plan.m, cplx(0.0, 0.0));
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * plan.chirp[k];
  fft_pow2(a.data(), plan.m, false);
  for (std::size_t k = 0; k < plan.m; ++k) a[k] *= plan.bfft[k];
  fft_pow2(a.data(), plan.m, true);
  for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * plan.chirp[k];
}

}  // namespace detail

/// In-place discrete Fourier transform, X(f) = sum_k x(k) exp(-2*pi*i*f*k/n).
inline void fft_inplace(cvec& x) {
  const std::size_t n = x.size();
  if (n <= 1) return;
  if (detail::is_pow2(n)) {
    detail::fft_pow2(x.data(), n, false);
  } else {
    detail::fft_bluestein(x.data(), n);
  }
}

/// In-place inverse transform with 1/n normalization.
inline void ifft_inplace(cvec& x) {
  const std::size_t n = x.size();
  if (n <= 1) return;
  if (detail::is_pow2(n)) {
    detail::fft_pow2(x.data(), n, true);
    return;
  }
  for (auto& v : x) v = std::conj(v);
  detail::fft_bluestein(x.data(), n);
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& v : x) v = std::conj(v) * scale;
}

inline cvec fft(cvec x) {
  fft_inplace(x);
  return x;
}

inline cvec ifft(cvec x) {
  ifft_inplace(x);
  return x;
}

}  // namespace pilotcs
