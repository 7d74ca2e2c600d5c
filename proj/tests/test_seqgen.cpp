// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "pilotcs/correlation.hpp"
#include "pilotcs/seqgen.hpp"

namespace {

using pilotcs::cplx;
using pilotcs::PeriodicSequence;

// largest out-of-phase autocorrelation magnitude, direct sums
double max_autocorr(const PeriodicSequence& a) {
  double peak = 0.0;
  for (int lag = 1; lag < a.period(); ++lag)
    peak = std::max(peak, std::abs(pilotcs::periodic_crosscorr(a, a, lag)));
  return peak;
}

}  // namespace

TEST_CASE("smallest prime divisor by trial division") {
  CHECK(pilotcs::smallest_prime_divisor(255) == 3);
  CHECK(pilotcs::smallest_prime_divisor(2) == 2);
  CHECK(pilotcs::smallest_prime_divisor(49) == 7);
  CHECK(pilotcs::smallest_prime_divisor(31) == 31);
  CHECK_THROWS_AS(pilotcs::smallest_prime_divisor(1), std::invalid_argument);
}

TEST_CASE("modular inverse via extended euclid") {
  CHECK(pilotcs::mod_inverse(1, 255) == 1);
  CHECK(pilotcs::mod_inverse(2, 255) == 128);
  CHECK(pilotcs::mod_inverse(3, 7) == 5);
  CHECK_THROWS_AS(pilotcs::mod_inverse(3, 255), std::domain_error);
  for (long long i : {1, 2, 4, 7, 8}) {
    CHECK(pilotcs::mod_inverse(i, 255) * i % 255 == 1);
  }
}

TEST_CASE("fzc entries match the closed-form phases") {
  const PeriodicSequence odd = pilotcs::fzc_sequence(1, 3);
  const double amp3 = 1.0 / std::sqrt(3.0);
  CHECK(std::abs(odd[0] - cplx(amp3, 0.0)) < 1e-15);
  CHECK(std::abs(odd[1] - std::polar(amp3, 2.0 * std::numbers::pi / 3.0)) < 1e-15);
  CHECK(std::abs(odd[2] - cplx(amp3, 0.0)) < 1e-15);

  const PeriodicSequence even = pilotcs::fzc_sequence(1, 4);
  CHECK(std::abs(even[0] - cplx(0.5, 0.0)) < 1e-15);
  CHECK(std::abs(even[1] - std::polar(0.5, std::numbers::pi / 4.0)) < 1e-15);
  CHECK(std::abs(even[2] - cplx(-0.5, 0.0)) < 1e-15);
  CHECK(std::abs(even[3] - std::polar(0.5, std::numbers::pi / 4.0)) < 1e-15);
}

TEST_CASE("fzc sequences have constant magnitude and ideal autocorrelation") {
  for (auto [u, m] : {std::pair<long long, long long>{1, 15},
                      {2, 15},
                      {1, 16},
                      {3, 16},
                      {128, 255}}) {
    const PeriodicSequence seq = pilotcs::fzc_sequence(u, m);
    INFO("u = " << u << ", m = " << m);
    const double amplitude = 1.0 / std::sqrt(static_cast<double>(m));
    for (int k = 0; k < seq.period(); ++k)
      CHECK(std::abs(std::abs(seq[k]) - amplitude) < 1e-15);
    CHECK(max_autocorr(seq) < 1e-12);
  }
}

TEST_CASE("fzc family size follows the smallest prime divisor") {
  CHECK(pilotcs::fzc_family(15).size() == 2);
  CHECK(pilotcs::fzc_family(35).size() == 4);
  CHECK(pilotcs::fzc_family(255).size() == 2);
  CHECK_THROWS_AS(pilotcs::fzc_family(16), std::invalid_argument);
  CHECK_THROWS_AS(pilotcs::fzc_family(1), std::invalid_argument);
}

TEST_CASE("fzc family generation is deterministic") {
  const pilotcs::SequenceFamily first = pilotcs::fzc_family(35);
  const pilotcs::SequenceFamily second = pilotcs::fzc_family(35);
  REQUIRE(first.size() == second.size());
  for (int i = 0; i < first.size(); ++i)
    CHECK(first.sequences[static_cast<std::size_t>(i)] ==
          second.sequences[static_cast<std::size_t>(i)]);
}

TEST_CASE("m-sequences: period, balance, two-valued autocorrelation") {
  for (int degree = 3; degree <= 10; ++degree) {
    const PeriodicSequence seq = pilotcs::m_sequence(pilotcs::LfsrSpec::primitive(degree));
    const int m = (1 << degree) - 1;
    INFO("degree = " << degree);
    REQUIRE(seq.period() == m);
    int minus_count = 0;
    for (int k = 0; k < m; ++k)
      if (seq[k].real() < 0.0) ++minus_count;
    CHECK(minus_count == (1 << (degree - 1)));  // balance property
    for (int lag = 1; lag < m; ++lag) {
      const cplx corr = pilotcs::periodic_crosscorr(seq, seq, lag);
      CHECK(std::abs(corr - cplx(-1.0 / m, 0.0)) < 1e-9);
    }
  }
}

TEST_CASE("a different lfsr seed rotates the same m-sequence") {
  pilotcs::LfsrSpec base = pilotcs::LfsrSpec::primitive(5);
  pilotcs::LfsrSpec rotated = base;
  rotated.seed_state = {1, 0, 0, 1, 0};
  const PeriodicSequence a = pilotcs::m_sequence(base);
  const PeriodicSequence b = pilotcs::m_sequence(rotated);
  bool found_shift = false;
  for (int shift = 0; shift < a.period() && !found_shift; ++shift)
    found_shift = cyclic_shift(a, shift) == b;
  CHECK(found_shift);
}

TEST_CASE("lfsr validation rejects malformed and non-primitive specs") {
  pilotcs::LfsrSpec bad_taps;
  bad_taps.taps = {3, 1};
  bad_taps.degree = 4;  // largest tap disagrees with the degree
  bad_taps.seed_state = {1, 1, 1, 1};
  CHECK_THROWS_AS(pilotcs::m_sequence(bad_taps), std::invalid_argument);

  pilotcs::LfsrSpec zero_seed = pilotcs::LfsrSpec::primitive(4);
  zero_seed.seed_state.assign(4, 0);
  CHECK_THROWS_AS(pilotcs::m_sequence(zero_seed), std::invalid_argument);

  pilotcs::LfsrSpec reducible;  // x^4 + x^2 + 1 = (x^2 + x + 1)^2
  reducible.taps = {4, 2};
  reducible.degree = 4;
  reducible.seed_state = {1, 1, 1, 1};
  CHECK_THROWS_AS(pilotcs::m_sequence(reducible), std::domain_error);

  CHECK_THROWS_AS(pilotcs::LfsrSpec::primitive(11), std::invalid_argument);
}

TEST_CASE("gold families from preferred pairs") {
  const pilotcs::SequenceFamily family = pilotcs::gold_family(5);
  CHECK(family.size() == 33);
  CHECK(family.period() == 31);
  // all nontrivial correlation values of a preferred pair construction
  // lie in {-1, -t, t-2}/M with t = 2^((s+2)/2) + 1 = 9
  const double t_value = 9.0;
  for (int i = 0; i < family.size(); ++i) {
    for (int j = i; j < family.size(); ++j) {
      for (int lag = (i == j ? 1 : 0); lag < 31; ++lag) {
        const double value =
            31.0 * pilotcs::periodic_crosscorr(family.sequences[static_cast<std::size_t>(i)],
                                               family.sequences[static_cast<std::size_t>(j)], lag)
                       .real();
        const bool allowed = std::abs(value + 1.0) < 1e-9 ||
                             std::abs(value + t_value) < 1e-9 ||
                             std::abs(value - (t_value - 2.0)) < 1e-9;
        if (!allowed) {
          INFO("pair (" << i << "," << j << ") lag " << lag << " value " << value);
          REQUIRE(allowed);
        }
      }
    }
  }
  CHECK_THROWS_AS(pilotcs::gold_preferred_pair(4), std::domain_error);
  CHECK_THROWS_AS(pilotcs::gold_preferred_pair(6), std::invalid_argument);
}

TEST_CASE("small-set kasami family for degree 4") {
  const pilotcs::SequenceFamily family = pilotcs::kasami_family(4);
  CHECK(family.size() == 4);  // 2^(s/2)
  CHECK(family.period() == 15);
  const double peak = std::max(family.theta_a, family.theta_c.value_or(0.0));
  CHECK(peak == Catch::Approx(5.0 / 15.0).epsilon(1e-12));
  CHECK_THROWS_AS(pilotcs::kasami_family(5), std::invalid_argument);
  CHECK_THROWS_AS(pilotcs::kasami_family(2), std::invalid_argument);
}
