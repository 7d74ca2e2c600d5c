// SPDX-License-Identifier: Apache-2.0
//
// Generic K-sparse channel generation and receiver-side AWGN. The
// combined channel model: support uniform without replacement over the
// N positions, coefficient phases independent uniform on the unit
// circle, magnitudes unit by default (Rayleigh with unit mean power as
// an option).

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pilotcs/fft.hpp"
#include "pilotcs/rng.hpp"

namespace pilotcs {

enum class MagnitudeModel { unit, rayleigh };

inline std::string to_string(MagnitudeModel model) {
  return model == MagnitudeModel::unit ? "unit" : "rayleigh";
}

inline MagnitudeModel magnitude_model_from_string(const std::string& name) {
  if (name == "unit") return MagnitudeModel::unit;
  if (name == "rayleigh") return MagnitudeModel::rayleigh;
  throw std::invalid_argument("unknown magnitude model: " + name);
}

struct SparseChannel {
  int length = 0;                 // N
  std::vector<int> support;       // K distinct 0-based indices, ascending
  cvec coefficients;              // aligned with support

  int sparsity() const { return static_cast<int>(support.size()); }

  cvec dense() const {
    cvec h(static_cast<std::size_t>(length), cplx(0.0, 0.0));
    for (std::size_t i = 0; i < support.size(); ++i)
      h[static_cast<std::size_t>(support[i])] = coefficients[i];
    return h;
  }

  double energy() const {
    double e = 0.0;
    for (const cplx& c : coefficients) e += std::norm(c);
    return e;
  }
};

inline SparseChannel generate_sparse_channel(int n, int k, MagnitudeModel model,
                                             std::uint64_t seed) {
  if (k < 0 || k > n) throw std::invalid_argument("generate_sparse_channel: requires 0 <= K <= N");
  Rng rng(seed);
  SparseChannel channel;
  channel.length = n;
  channel.support = sample_without_replacement(n, k, rng);
  channel.coefficients.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const cplx phase = rng.unit_phase();
    if (model == MagnitudeModel::unit) {
      channel.coefficients.push_back(phase);
    } else {
      // Rayleigh magnitude with E|c|^2 = 1
      const double magnitude = std::sqrt(-std::log(std::max(1.0 - rng.uniform(), 1e-300)));
      channel.coefficients.push_back(magnitude * phase);
    }
  }
  return channel;
}

struct NoiseSpec {
  double snr_db = std::numeric_limits<double>::infinity();
  double realized_sigma_sq = 0.0;  // per-sample complex noise variance
};

/// Add complex AWGN at the target measurement SNR, referenced to the
/// per-sample power of the clean vector: sigma^2 = (||y||^2/M) 10^(-snr/10).
/// An infinite snr_db is the noiseless sentinel.
inline std::pair<cvec, NoiseSpec> add_awgn(const cvec& y, double snr_db, std::uint64_t seed) {
  NoiseSpec spec;
  spec.snr_db = snr_db;
  if (std::isinf(snr_db) && snr_db > 0.0) return {y, spec};
  double energy = 0.0;
  for (const cplx& v : y) energy += std::norm(v);
  if (energy <= 0.0)
    throw std::invalid_argument("add_awgn: zero signal with finite SNR");
  const double sigma_sq =
      energy / static_cast<double>(y.size()) * std::pow(10.0, -snr_db / 10.0);
  spec.realized_sigma_sq = sigma_sq;
  Rng rng(seed);
  cvec noisy(y);
  for (cplx& v : noisy) v += rng.complex_gaussian(sigma_sq);
  return {noisy, spec};
}

/// Two-column text format: "index re+imj" per nonzero entry.
inline void write_channel(const SparseChannel& channel, std::ostream& out) {
  out << "N " << channel.length << " K " << channel.sparsity() << "\n";
  char buffer[80];
  for (std::size_t i = 0; i < channel.support.size(); ++i) {
    const cplx c = channel.coefficients[i];
    std::snprintf(buffer, sizeof buffer, "%d %.17g%+.17gj", channel.support[i], c.real(), c.imag());
    out << buffer << "\n";
  }
}

inline cplx parse_complex(const std::string& token) {
  // forms: "re+imj", "re-imj"
  if (token.empty() || token.back() != 'j')
    throw std::invalid_argument("parse_complex: expected trailing 'j' in " + token);
  const std::string body = token.substr(0, token.size() - 1);
  // split at the sign of the imaginary part (skip a leading sign and exponent signs)
  std::size_t split = std::string::npos;
  for (std::size_t pos = 1; pos < body.size(); ++pos) {
    const char ch = body[pos];
    if ((ch == '+' || ch == '-') && body[pos - 1] != 'e' && body[pos - 1] != 'E') split = pos;
  }
  if (split == std::string::npos)
    throw std::invalid_argument("parse_complex: malformed complex token " + token);
  return {std::stod(body.substr(0, split)), std::stod(body.substr(split))};
}

inline SparseChannel read_channel(std::istream& in) {
  SparseChannel channel;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("read_channel: empty input");
  std::istringstream header(line);
  std::string key;
  int k = 0;
  if (!(header >> key >> channel.length) || key != "N" || !(header >> key >> k) || key != "K")
    throw std::invalid_argument("read_channel: malformed header: " + line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    int index = 0;
    std::string token;
    if (!(row >> index >> token)) throw std::invalid_argument("read_channel: malformed row: " + line);
    channel.support.push_back(index);
    channel.coefficients.push_back(parse_complex(token));
  }
  if (static_cast<int>(channel.support.size()) != k)
    throw std::invalid_argument("read_channel: row count disagrees with header K");
  return channel;
}

}  // namespace pilotcs
