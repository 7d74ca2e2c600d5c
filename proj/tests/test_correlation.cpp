// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <span>

#include "pilotcs/correlation.hpp"
#include "pilotcs/rng.hpp"
#include "pilotcs/seqgen.hpp"

namespace {

using pilotcs::cplx;
using pilotcs::cvec;
using pilotcs::PeriodicSequence;

PeriodicSequence random_sequence(int m, std::uint64_t seed) {
  pilotcs::Rng rng(seed);
  cvec x(static_cast<std::size_t>(m));
  for (cplx& v : x) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  return PeriodicSequence::normalized(std::move(x));
}

}  // namespace

TEST_CASE("fft crosscorrelation matches the direct sum at every lag") {
  for (int m : {8, 15, 64, 255}) {
    const PeriodicSequence a = random_sequence(m, 10 + static_cast<std::uint64_t>(m));
    const PeriodicSequence b = random_sequence(m, 20 + static_cast<std::uint64_t>(m));
    const cvec fast = pilotcs::crosscorr_all_lags(a, b);
    INFO("m = " << m);
    for (int lag = 0; lag < m; ++lag) {
      const cplx direct = pilotcs::periodic_crosscorr(a, b, lag);
      CHECK(std::abs(fast[static_cast<std::size_t>(lag)] - direct) < 1e-11);
    }
  }
}

TEST_CASE("crosscorrelation conjugate symmetry between swapped arguments") {
  const int m = 24;
  const PeriodicSequence a = random_sequence(m, 3);
  const PeriodicSequence b = random_sequence(m, 4);
  const cvec ab = pilotcs::crosscorr_all_lags(a, b);
  const cvec ba = pilotcs::crosscorr_all_lags(b, a);
  for (int lag = 0; lag < m; ++lag) {
    const int neg = (m - lag) % m;
    CHECK(std::abs(ab[static_cast<std::size_t>(lag)] -
                   std::conj(ba[static_cast<std::size_t>(neg)])) < 1e-11);
  }
}

TEST_CASE("unit-energy sequences have unit zero-lag autocorrelation and bounded cross terms") {
  const int m = 33;
  const PeriodicSequence a = random_sequence(m, 5);
  const PeriodicSequence b = random_sequence(m, 6);
  CHECK(std::abs(pilotcs::periodic_crosscorr(a, a, 0) - cplx(1.0, 0.0)) < 1e-12);
  for (int lag = 0; lag < m; ++lag)
    CHECK(std::abs(pilotcs::periodic_crosscorr(a, b, lag)) <= 1.0 + 1e-12);
}

TEST_CASE("welch bound closed-form values") {
  CHECK(pilotcs::welch_bound(255, 510) == Catch::Approx(std::sqrt(1.0 / 509.0)).epsilon(1e-14));
  CHECK(pilotcs::welch_bound(64, 64) == 0.0);
  CHECK(pilotcs::welch_bound(1, 2) == Catch::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(pilotcs::welch_bound(10, 5), std::invalid_argument);
}

TEST_CASE("fzc family profile: ideal autocorrelation, crosscorrelation 1/sqrt(M)") {
  for (int m : {15, 255}) {
    const pilotcs::SequenceFamily family = pilotcs::fzc_family(m);
    INFO("m = " << m);
    CHECK(family.theta_a < 1e-12);
    REQUIRE(family.theta_c.has_value());
    CHECK(std::abs(*family.theta_c - 1.0 / std::sqrt(static_cast<double>(m))) < 1e-10);
  }
}

TEST_CASE("sarwate bound is met with equality by fzc families") {
  for (int m : {15, 255}) {
    const pilotcs::SequenceFamily family = pilotcs::fzc_family(m);
    const pilotcs::CorrelationProfile profile = pilotcs::correlation_profile(family);
    const double target = 1.0 / (static_cast<double>(m) * static_cast<double>(m));
    INFO("m = " << m);
    CHECK(std::abs(pilotcs::sarwate_lhs(profile) - target) < 1e-14 * target);
  }
}

TEST_CASE("gold family of degree 5 has the classic 9/31 profile") {
  const pilotcs::SequenceFamily family = pilotcs::gold_family(5);
  CHECK(family.size() == 33);
  CHECK(family.theta_a == Catch::Approx(9.0 / 31.0).epsilon(1e-12));
  REQUIRE(family.theta_c.has_value());
  CHECK(*family.theta_c == Catch::Approx(9.0 / 31.0).epsilon(1e-12));
}

TEST_CASE("single-member families have no crosscorrelation statistic") {
  const pilotcs::PeriodicSequence a = random_sequence(16, 8);
  std::vector<pilotcs::PeriodicSequence> members{a};
  const pilotcs::CorrelationProfile profile =
      pilotcs::correlation_profile(std::span<const pilotcs::PeriodicSequence>(members));
  CHECK_FALSE(profile.theta_c.has_value());
  CHECK_THROWS_AS(pilotcs::sarwate_lhs(profile), std::invalid_argument);
}
