// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <sstream>

#include "pilotcs/harness.hpp"

namespace {

using pilotcs::cplx;
using pilotcs::cvec;
using pilotcs::ExperimentConfig;

constexpr double kInf = std::numeric_limits<double>::infinity();

// tiny sweep that solves in well under a second
ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.m = 15;
  cfg.l = 5;
  cfg.t = 3;  // q = 1
  cfg.k_list = {2};
  cfg.snr_db_list = {kInf};
  cfg.trials = 3;
  cfg.base_seed = 7;
  cfg.output_path.clear();
  return cfg;
}

}  // namespace

TEST_CASE("config text parses every key") {
  std::stringstream text(
      "# comment line\n"
      "family = fzc\n"
      "m = 15\n"
      "l = 5\n"
      "t = 3\n"
      "k_list = 2, 4\n"
      "snr_db_list = 10, 20, inf\n"
      "trials = 9\n"
      "seed = 12345\n"
      "magnitude = rayleigh\n"
      "lambda_factor = 0.8\n"
      "rel_tol = 1e-7\n"
      "max_iters = 500\n"
      "continuation_steps = 12\n"
      "debias = true\n"
      "out = sweep.csv\n"
      "trial_out = detail.csv\n");
  const ExperimentConfig cfg = pilotcs::parse_config(text);
  CHECK(cfg.family_kind == pilotcs::FamilyKind::fzc);
  CHECK(cfg.m == 15);
  CHECK(cfg.l == 5);
  CHECK(cfg.t == 3);
  CHECK(cfg.k_list == std::vector<int>{2, 4});
  REQUIRE(cfg.snr_db_list.size() == 3);
  CHECK(cfg.snr_db_list[0] == 10.0);
  CHECK(cfg.snr_db_list[1] == 20.0);
  CHECK(std::isinf(cfg.snr_db_list[2]));
  CHECK(cfg.trials == 9);
  CHECK(cfg.base_seed == 12345);
  CHECK(cfg.magnitude == pilotcs::MagnitudeModel::rayleigh);
  CHECK(cfg.lambda_factor == 0.8);
  CHECK(cfg.solver.rel_tol == 1e-7);
  CHECK(cfg.solver.max_iters == 500);
  CHECK(cfg.solver.continuation_steps == 12);
  CHECK(cfg.solver.debias);  // sweep default is off, so the key must flip it
  CHECK(cfg.output_path == "sweep.csv");
  CHECK(cfg.trial_output_path == "detail.csv");
}

TEST_CASE("config parser rejects unknown keys and malformed lines") {
  std::stringstream unknown("mystery = 3\n");
  CHECK_THROWS_AS(pilotcs::parse_config(unknown), std::invalid_argument);
  std::stringstream malformed("trials 3\n");
  CHECK_THROWS_AS(pilotcs::parse_config(malformed), std::invalid_argument);
  std::stringstream bad_number("trials = three\n");
  CHECK_THROWS_AS(pilotcs::parse_config(bad_number), std::invalid_argument);
}

TEST_CASE("degree key derives the period and the noiseless flag overrides snr") {
  std::stringstream text("family = gold\ndegree = 5\nl = 31\nt = 2\nnoiseless = true\n");
  const ExperimentConfig cfg = pilotcs::parse_config(text);
  CHECK(cfg.m == 31);
  REQUIRE(cfg.snr_db_list.size() == 1);
  CHECK(std::isinf(cfg.snr_db_list[0]));
}

TEST_CASE("config validation names the violated condition") {
  ExperimentConfig cfg = tiny_config();
  cfg.l = 4;  // 15 % 4 != 0
  CHECK_THROWS_WITH(pilotcs::validate_config(cfg),
                    Catch::Matchers::ContainsSubstring("m_divisible_by_l"));
  cfg = tiny_config();
  cfg.t = 2;  // t*L = 10 not a multiple of 15
  CHECK_THROWS_WITH(pilotcs::validate_config(cfg),
                    Catch::Matchers::ContainsSubstring("t_l_multiple_of_m"));
  cfg = tiny_config();
  cfg.trials = 0;
  CHECK_THROWS_WITH(pilotcs::validate_config(cfg),
                    Catch::Matchers::ContainsSubstring("trials_positive"));
  cfg = tiny_config();
  cfg.k_list = {40};  // N = 15
  CHECK_THROWS_WITH(pilotcs::validate_config(cfg), Catch::Matchers::ContainsSubstring("k_in_range"));
  cfg = tiny_config();
  cfg.m = 16;
  CHECK_THROWS_WITH(pilotcs::validate_config(cfg), Catch::Matchers::ContainsSubstring("fzc_period_odd"));
  cfg = tiny_config();
  cfg.family_kind = pilotcs::FamilyKind::gold;
  cfg.degree = 5;  // m stays 15 but 2^5-1 = 31
  CHECK_THROWS_WITH(pilotcs::validate_config(cfg),
                    Catch::Matchers::ContainsSubstring("period_matches_degree"));
}

TEST_CASE("metric formulas on hand-built cases") {
  pilotcs::SparseChannel channel;
  channel.length = 10;
  channel.support = {2, 5};
  channel.coefficients = {cplx(1.0, 0.0), cplx(0.0, -1.0)};

  const pilotcs::TrialResult perfect =
      pilotcs::compute_metrics(channel, channel.dense(), channel.support);
  CHECK(perfect.mse == 0.0);
  CHECK(perfect.rel_err == 0.0);
  CHECK(perfect.support_precision == 1.0);
  CHECK(perfect.support_recall == 1.0);

  const cvec zeros(10, cplx(0.0, 0.0));
  const pilotcs::TrialResult miss = pilotcs::compute_metrics(channel, zeros, {});
  CHECK(miss.mse == Catch::Approx(2.0 / 10.0).epsilon(1e-15));  // ||h||^2 = K
  CHECK(miss.rel_err == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(miss.support_precision == 0.0);
  CHECK(miss.support_recall == 0.0);

  pilotcs::SparseChannel empty;
  empty.length = 10;
  const pilotcs::TrialResult vacuous = pilotcs::compute_metrics(empty, zeros, {});
  CHECK(vacuous.support_precision == 1.0);
  CHECK(vacuous.support_recall == 1.0);

  const pilotcs::TrialResult partial = pilotcs::compute_metrics(channel, channel.dense(), {2, 7});
  CHECK(partial.support_precision == 0.5);
  CHECK(partial.support_recall == 0.5);
}

TEST_CASE("metrics agree with an independently coded formula on random pairs") {
  pilotcs::Rng rng(404);
  for (int round = 0; round < 5; ++round) {
    const pilotcs::SparseChannel channel = pilotcs::generate_sparse_channel(
        30, 6, pilotcs::MagnitudeModel::rayleigh, 500 + static_cast<std::uint64_t>(round));
    cvec estimate(30);
    for (cplx& v : estimate) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const pilotcs::TrialResult metrics = pilotcs::compute_metrics(channel, estimate, {});
    // second route: accumulate per-entry squared error the slow way
    const cvec dense = channel.dense();
    double total = 0.0;
    for (int i = 0; i < 30; ++i) {
      const double dr = dense[static_cast<std::size_t>(i)].real() - estimate[static_cast<std::size_t>(i)].real();
      const double di = dense[static_cast<std::size_t>(i)].imag() - estimate[static_cast<std::size_t>(i)].imag();
      total += dr * dr + di * di;
    }
    CHECK(metrics.mse == Catch::Approx(total / 30.0).epsilon(1e-12));
    CHECK(metrics.rel_err ==
          Catch::Approx(std::sqrt(total / channel.energy())).epsilon(1e-12));
  }
}

TEST_CASE("experiment runs are deterministic and worker-count independent") {
  const ExperimentConfig cfg = tiny_config();
  const pilotcs::AggregateResult first = pilotcs::run_experiment(cfg, 1);
  const pilotcs::AggregateResult second = pilotcs::run_experiment(cfg, 1);
  const pilotcs::AggregateResult parallel = pilotcs::run_experiment(cfg, 4);
  CHECK(pilotcs::aggregate_csv(first) == pilotcs::aggregate_csv(second));
  CHECK(pilotcs::trial_csv(first) == pilotcs::trial_csv(second));
  CHECK(pilotcs::aggregate_csv(first) == pilotcs::aggregate_csv(parallel));
  CHECK(pilotcs::trial_csv(first) == pilotcs::trial_csv(parallel));
}

TEST_CASE("removing a sweep cell does not change the others") {
  ExperimentConfig wide = tiny_config();
  wide.k_list = {2, 3};
  ExperimentConfig narrow = tiny_config();
  narrow.k_list = {3};
  const pilotcs::AggregateResult full = pilotcs::run_experiment(wide, 1);
  const pilotcs::AggregateResult sliced = pilotcs::run_experiment(narrow, 1);
  REQUIRE(full.rows.size() == 2);
  REQUIRE(sliced.rows.size() == 1);
  const pilotcs::AggregateRow& from_full = full.rows[1];  // K = 3 row
  const pilotcs::AggregateRow& alone = sliced.rows[0];
  CHECK(from_full.k == alone.k);
  CHECK(from_full.mean_mse == alone.mean_mse);
  CHECK(from_full.median_mse == alone.median_mse);
  CHECK(from_full.exact_rate == alone.exact_rate);
  CHECK(from_full.mean_iters == alone.mean_iters);
}

TEST_CASE("aggregate rows agree with their trial rows") {
  ExperimentConfig cfg = tiny_config();
  cfg.trials = 4;
  cfg.snr_db_list = {20.0};
  const pilotcs::AggregateResult result = pilotcs::run_experiment(cfg, 1);
  REQUIRE(result.rows.size() == 1);
  REQUIRE(result.trial_rows.size() == 4);
  double sum = 0.0;
  double iters = 0.0;
  int exact = 0;
  std::vector<double> mses;
  for (const pilotcs::TrialResult& trial : result.trial_rows) {
    sum += trial.mse;
    iters += trial.solver_iterations;
    if (trial.rel_err < 1e-4) ++exact;
    mses.push_back(trial.mse);
  }
  std::sort(mses.begin(), mses.end());
  CHECK(result.rows[0].mean_mse == Catch::Approx(sum / 4.0).epsilon(1e-15));
  CHECK(result.rows[0].median_mse == Catch::Approx(0.5 * (mses[1] + mses[2])).epsilon(1e-15));
  CHECK(result.rows[0].exact_rate == Catch::Approx(exact / 4.0).epsilon(1e-15));
  CHECK(result.rows[0].mean_iters == Catch::Approx(iters / 4.0).epsilon(1e-15));
}

TEST_CASE("csv headers follow the documented schemas") {
  const pilotcs::AggregateResult result = pilotcs::run_experiment(tiny_config(), 1);
  const std::string aggregate = pilotcs::aggregate_csv(result);
  const std::string detail = pilotcs::trial_csv(result);
  CHECK(aggregate.rfind("K,snr_db,trials,mean_mse,median_mse,exact_rate,mean_iters\n", 0) == 0);
  CHECK(detail.rfind("K,snr_db,trial,mse,rel_err,precision,recall,iters,converged\n", 0) == 0);
  // one aggregate row per cell plus header
  CHECK(std::count(aggregate.begin(), aggregate.end(), '\n') == 2);
  CHECK(std::count(detail.begin(), detail.end(), '\n') == 4);
}

TEST_CASE("noiseless tiny sweep recovers exactly in every trial") {
  const pilotcs::AggregateResult result = pilotcs::run_experiment(tiny_config(), 1);
  REQUIRE(result.rows.size() == 1);
  CHECK(result.rows[0].exact_rate == 1.0);
}

TEST_CASE("analysis of the reference configuration") {
  ExperimentConfig cfg;  // defaults are the reference configuration
  cfg.output_path.clear();
  const pilotcs::AnalysisReport report = pilotcs::analyze_config(cfg);
  CHECK(report.m == 255);
  CHECK(report.n == 510);
  CHECK(report.q == 2);
  CHECK(std::abs(report.coherence - 1.0 / std::sqrt(255.0)) < 1e-10);
  CHECK(std::abs(report.spectral_norm_sq - 2.0) < 1e-10);
  CHECK(report.margin_k == 140);  // defaults to the largest K in the sweep
  CHECK(report.sandwiches_hold());
  const std::string text = pilotcs::report_text(report);
  CHECK(text.find("coherence") != std::string::npos);
  CHECK(text.find("sandwiches_hold") != std::string::npos);
  const std::string csv = pilotcs::report_csv(report);
  CHECK(csv.rfind("m,n,q,", 0) == 0);
}
