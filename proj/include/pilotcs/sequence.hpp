// SPDX-License-Identifier: Apache-2.0
//
// Core value types: unit-energy periodic sequences and named families of
// them. Everything downstream (pilot assignment, measurement operators)
// is built from these.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pilotcs/fft.hpp"

namespace pilotcs {

/// A complex sequence of period M with unit energy, indexed 0..M-1 and
/// extended periodically for out-of-range access.
class PeriodicSequence {
 public:
  explicit PeriodicSequence(cvec values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("PeriodicSequence: empty value list");
    double energy = 0.0;
    for (const cplx& v : values_) energy += std::norm(v);
    if (std::abs(energy - 1.0) > 1e-9)
      throw std::invalid_argument("PeriodicSequence: energy " + std::to_string(energy) +
                                  " is not 1 within tolerance");
  }

  /// Rescale an arbitrary nonzero vector to unit energy.
  static PeriodicSequence normalized(cvec values) {
    double energy = 0.0;
    for (const cplx& v : values) energy += std::norm(v);
    if (energy <= 0.0) throw std::invalid_argument("PeriodicSequence::normalized: zero vector");
    const double scale = 1.0 / std::sqrt(energy);
    for (cplx& v : values) v *= scale;
    return PeriodicSequence(std::move(values));
  }

  int period() const { return static_cast<int>(values_.size()); }
  const cvec& values() const { return values_; }

  /// Periodic access: a(k) == a(k + M) for any integer k.
  cplx operator[](long long k) const {
    const long long m = period();
    long long r = k % m;
    if (r < 0) r += m;
    return values_[static_cast<std::size_t>(r)];
  }

  bool operator==(const PeriodicSequence& other) const { return values_ == other.values_; }

 private:
  cvec values_;
};

/// Left cyclic shift by m positions: result(k) = seq(k + m).
inline PeriodicSequence cyclic_shift(const PeriodicSequence& seq, long long m) {
  const int period = seq.period();
  cvec out(static_cast<std::size_t>(period));
  for (int k = 0; k < period; ++k) out[static_cast<std::size_t>(k)] = seq[k + m];
  return PeriodicSequence(std::move(out));
}

enum class FamilyKind { fzc, gold, kasami, m_sequence };

inline std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::fzc: return "fzc";
    case FamilyKind::gold: return "gold";
    case FamilyKind::kasami: return "kasami";
    case FamilyKind::m_sequence: return "mseq";
  }
  return "?";
}

inline FamilyKind family_kind_from_string(const std::string& name) {
  if (name == "fzc") return FamilyKind::fzc;
  if (name == "gold") return FamilyKind::gold;
  if (name == "kasami") return FamilyKind::kasami;
  if (name == "mseq" || name == "m_sequence") return FamilyKind::m_sequence;
  throw std::invalid_argument("unknown family kind: " + name);
}

/// A set of sequences of common period together with its correlation
/// profile. theta_c is absent for single-member families (no pairs).
struct SequenceFamily {
  std::vector<PeriodicSequence> sequences;
  FamilyKind kind = FamilyKind::fzc;
  double theta_a = 0.0;
  std::optional<double> theta_c;

  int size() const { return static_cast<int>(sequences.size()); }
  int period() const { return sequences.empty() ? 0 : sequences.front().period(); }
};

}  // namespace pilotcs
