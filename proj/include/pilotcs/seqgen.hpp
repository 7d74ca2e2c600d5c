// SPDX-License-Identifier: Apache-2.0
//
// Deterministic sequence family generators: Frank-Zadoff-Chu sets built
// from modular inverses, LFSR m-sequences, and the Gold / small-set
// Kasami families derived from them.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "pilotcs/correlation.hpp"
#include "pilotcs/sequence.hpp"

namespace pilotcs {

/// Least prime dividing M (trial division).
inline long long smallest_prime_divisor(long long m) {
  if (m < 2) throw std::invalid_argument("smallest_prime_divisor: M must be >= 2");
  if (m % 2 == 0) return 2;
  for (long long d = 3; d * d <= m; d += 2)
    if (m % d == 0) return d;
  return m;
}

/// Multiplicative inverse of i modulo M via extended Euclid.
inline long long mod_inverse(long long i, long long m) {
  if (m < 2 || i < 1) throw std::invalid_argument("mod_inverse: requires i >= 1, M >= 2");
  long long r0 = m, r1 = i % m;
  long long s0 = 0, s1 = 1;
  while (r1 != 0) {
    const long long quotient = r0 / r1;
    r0 -= quotient * r1;
    std::swap(r0, r1);
    s0 -= quotient * s1;
    std::swap(s0, s1);
  }
  if (r0 != 1) throw std::domain_error("mod_inverse: gcd(i, M) != 1, no inverse exists");
  return ((s0 % m) + m) % m;
}

/// FZC sequence of root u and period M, entries of constant magnitude
/// 1/sqrt(M). The quadratic phase is reduced in integer arithmetic before
/// the trig call so nonzero-lag autocorrelations cancel to machine zero.
inline PeriodicSequence fzc_sequence(long long u, long long m) {
  if (m < 2) throw std::invalid_argument("fzc_sequence: M must be >= 2");
  if (u < 1 || u > m - 1) throw std::invalid_argument("fzc_sequence: u must be in [1, M-1]");
  const double amplitude = 1.0 / std::sqrt(static_cast<double>(m));
  cvec values(static_cast<std::size_t>(m));
  if (m % 2 == 1) {
    // phase pi*u*k*(k+1)/M = 2*pi*(u * k(k+1)/2 mod M)/M
    for (long long k = 0; k < m; ++k) {
      const long long tri = (k * (k + 1) / 2) % m;
      const long long phase_num = (u % m) * tri % m;
      const double ang = 2.0 * std::numbers::pi * static_cast<double>(phase_num) / static_cast<double>(m);
      values[static_cast<std::size_t>(k)] = std::polar(amplitude, ang);
    }
  } else {
    // phase pi*u*k^2/M = 2*pi*(u*k^2 mod 2M)/(2M)
    for (long long k = 0; k < m; ++k) {
      const long long sq = (k * k) % (2 * m);
      const long long phase_num = (u % (2 * m)) * sq % (2 * m);
      const double ang = std::numbers::pi * static_cast<double>(phase_num) / static_cast<double>(m);
      values[static_cast<std::size_t>(k)] = std::polar(amplitude, ang);
    }
  }
  return PeriodicSequence(std::move(values));
}

/// FZC family {a_{u_i}} with u_i the inverse of i mod M for i = 1..p-1,
/// p the smallest prime divisor of odd M. Achieves theta_a = 0 and
/// theta_c = 1/sqrt(M), meeting the Sarwate tradeoff with equality.
inline SequenceFamily fzc_family(long long m) {
  if (m < 3) throw std::invalid_argument("fzc_family: M must be >= 3");
  if (m % 2 == 0) throw std::invalid_argument("fzc_family: even M unsupported, construction requires odd M");
  const long long p = smallest_prime_divisor(m);
  std::vector<PeriodicSequence> members;
  members.reserve(static_cast<std::size_t>(p - 1));
  for (long long i = 1; i <= p - 1; ++i) members.push_back(fzc_sequence(mod_inverse(i, m), m));
  return make_family(FamilyKind::fzc, std::move(members));
}

/// Fibonacci LFSR description: feedback polynomial exponents (degree
/// included) and a nonzero initial state s_0..s_{degree-1}.
struct LfsrSpec {
  std::vector<int> taps;
  int degree = 0;
  std::vector<std::uint8_t> seed_state;

  /// Built-in primitive polynomial for degrees 3..10, all-ones seed.
  static LfsrSpec primitive(int degree) {
    static const std::vector<std::vector<int>> table = {
        {3, 1}, {4, 1}, {5, 2}, {6, 1}, {7, 3}, {8, 6, 5, 4}, {9, 4}, {10, 3}};
    if (degree < 3 || degree > 10)
      throw std::invalid_argument("LfsrSpec::primitive: built-in table covers degrees 3..10");
    LfsrSpec spec;
    spec.taps = table[static_cast<std::size_t>(degree - 3)];
    spec.degree = degree;
    spec.seed_state.assign(static_cast<std::size_t>(degree), 1);
    return spec;
  }
};

namespace detail {

inline void validate_lfsr(const LfsrSpec& spec) {
  if (spec.degree < 1) throw std::invalid_argument("LfsrSpec: degree must be positive");
  if (spec.taps.empty() || *std::max_element(spec.taps.begin(), spec.taps.end()) != spec.degree)
    throw std::invalid_argument("LfsrSpec: degree must equal the largest tap position");
  for (int t : spec.taps)
    if (t < 1 || t > spec.degree) throw std::invalid_argument("LfsrSpec: tap out of range");
  if (spec.seed_state.size() != static_cast<std::size_t>(spec.degree))
    throw std::invalid_argument("LfsrSpec: seed length must equal the degree");
  if (std::all_of(spec.seed_state.begin(), spec.seed_state.end(),
                  [](std::uint8_t b) { return b == 0; }))
    throw std::invalid_argument("LfsrSpec: all-zero seed");
}

/// One full period of the recurrence s_k = XOR_{t in taps} s_{k-t}.
/// Throws if the state cycle closes before 2^degree - 1 steps, which
/// means the feedback polynomial is not primitive.
inline std::vector<std::uint8_t> lfsr_bits(const LfsrSpec& spec) {
  validate_lfsr(spec);
  const int s = spec.degree;
  const long long period = (1LL << s) - 1;
  std::vector<std::uint8_t> bits(spec.seed_state.begin(), spec.seed_state.end());
  bits.reserve(static_cast<std::size_t>(period + s));
  for (long long k = s; k < period + s; ++k) {
    std::uint8_t next = 0;
    for (int t : spec.taps) next ^= bits[static_cast<std::size_t>(k - t)];
    bits.push_back(next);
    // state repeat before the full period => short cycle
    if (k + 1 >= 2 * s && k + 1 < period + s) {
      const std::size_t state_start = static_cast<std::size_t>(k + 1 - s);
      if (std::equal(bits.begin(), bits.begin() + s, bits.begin() + static_cast<std::ptrdiff_t>(state_start)))
        throw std::domain_error("lfsr_bits: state cycle shorter than 2^s - 1, polynomial is not primitive");
    }
  }
  bits.resize(static_cast<std::size_t>(period));
  return bits;
}

inline PeriodicSequence bits_to_sequence(const std::vector<std::uint8_t>& bits) {
  const double amplitude = 1.0 / std::sqrt(static_cast<double>(bits.size()));
  cvec values(bits.size());
  for (std::size_t k = 0; k < bits.size(); ++k)
    values[k] = cplx(bits[k] ? -amplitude : amplitude, 0.0);
  return PeriodicSequence(std::move(values));
}

}  // namespace detail

/// +-1/sqrt(M) m-sequence of period 2^degree - 1 (bit 0 -> +, bit 1 -> -).
inline PeriodicSequence m_sequence(const LfsrSpec& spec) {
  return detail::bits_to_sequence(detail::lfsr_bits(spec));
}

inline SequenceFamily m_sequence_family(const LfsrSpec& spec) {
  std::vector<PeriodicSequence> members;
  members.push_back(m_sequence(spec));
  return make_family(FamilyKind::m_sequence, std::move(members));
}

struct GoldPair {
  LfsrSpec a;
  LfsrSpec b;
};

/// Preferred m-sequence pairs with three-valued crosscorrelation, verified
/// by brute force against {-1, -t(s), t(s)-2} with t(s) = 2^((s+2)/2) + 1.
inline GoldPair gold_preferred_pair(int s) {
  if (s % 4 == 0) throw std::domain_error("gold_preferred_pair: no preferred pair exists when 4 | s");
  LfsrSpec a, b;
  switch (s) {
    case 5: a.taps = {5, 2}; b.taps = {5, 4, 3, 2}; break;
    case 7: a.taps = {7, 3}; b.taps = {7, 3, 2, 1}; break;
    case 9: a.taps = {9, 4}; b.taps = {9, 6, 4, 3}; break;
    default:
      throw std::invalid_argument("gold_preferred_pair: built-in table covers s in {5, 7, 9}");
  }
  a.degree = b.degree = s;
  a.seed_state.assign(static_cast<std::size_t>(s), 1);
  b.seed_state = a.seed_state;
  return {a, b};
}

/// Gold family of size M+2 from a preferred pair: both m-sequences plus
/// the element-wise products of the first with every cyclic shift of the
/// second (XOR in the bit domain).
inline SequenceFamily gold_family(const GoldPair& pair) {
  if (pair.a.degree != pair.b.degree)
    throw std::invalid_argument("gold_family: pair degrees differ");
  const auto bits_a = detail::lfsr_bits(pair.a);
  const auto bits_b = detail::lfsr_bits(pair.b);
  const std::size_t period = bits_a.size();
  std::vector<PeriodicSequence> members;
  members.reserve(period + 2);
  members.push_back(detail::bits_to_sequence(bits_a));
  members.push_back(detail::bits_to_sequence(bits_b));
  for (std::size_t shift = 0; shift < period; ++shift) {
    std::vector<std::uint8_t> bits(period);
    for (std::size_t k = 0; k < period; ++k)
      bits[k] = static_cast<std::uint8_t>(bits_a[k] ^ bits_b[(k + shift) % period]);
    members.push_back(detail::bits_to_sequence(bits));
  }
  return make_family(FamilyKind::gold, std::move(members));
}

inline SequenceFamily gold_family(int s) { return gold_family(gold_preferred_pair(s)); }

/// Small-set Kasami family of size 2^(s/2) for even s: base m-sequence
/// combined with cyclic shifts of its decimation by 2^(s/2) + 1.
inline SequenceFamily kasami_family(int s) {
  if (s % 2 != 0) throw std::invalid_argument("kasami_family: s must be even");
  if (s < 4) throw std::invalid_argument("kasami_family: s must be >= 4");
  const auto bits_a = detail::lfsr_bits(LfsrSpec::primitive(s));
  const std::size_t period = bits_a.size();
  const std::size_t decimation = (1u << (s / 2)) + 1;
  const std::size_t sub_period = (1u << (s / 2)) - 1;
  std::vector<std::uint8_t> bits_b(period);
  for (std::size_t k = 0; k < period; ++k) bits_b[k] = bits_a[(decimation * k) % period];
  std::vector<PeriodicSequence> members;
  members.reserve(sub_period + 1);
  members.push_back(detail::bits_to_sequence(bits_a));
  for (std::size_t shift = 0; shift < sub_period; ++shift) {
    std::vector<std::uint8_t> bits(period);
    for (std::size_t k = 0; k < period; ++k)
      bits[k] = static_cast<std::uint8_t>(bits_a[k] ^ bits_b[(k + shift) % period]);
    members.push_back(detail::bits_to_sequence(bits));
  }
  return make_family(FamilyKind::kasami, std::move(members));
}

}  // namespace pilotcs
