// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo experiment engine: flat key-value configuration, seeded
// trial execution over a (K, SNR) grid, MSE and support metrics, and
// deterministic CSV emission. Trial seed streams are keyed by the cell
// coordinates themselves, so removing a cell from the sweep never
// changes another cell's results and workers never change output bytes.

#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "pilotcs/channel.hpp"
#include "pilotcs/correlation.hpp"
#include "pilotcs/measurement.hpp"
#include "pilotcs/pilot.hpp"
#include "pilotcs/recovery.hpp"
#include "pilotcs/rng.hpp"
#include "pilotcs/seqgen.hpp"

namespace pilotcs {

struct ExperimentConfig {
  FamilyKind family_kind = FamilyKind::fzc;
  int m = 255;     // sequence period; derived from degree for LFSR kinds
  int degree = 0;  // register length for mseq/gold/kasami families
  int l = 51;
  int t = 10;
  std::vector<int> k_list{60, 80, 100, 120, 140};
  std::vector<double> snr_db_list{10.0, 20.0, 30.0};  // +inf entry = noiseless
  int trials = 50;
  std::uint64_t base_seed = 1;
  MagnitudeModel magnitude = MagnitudeModel::unit;
  double lambda_factor = 1.0;  // noisy lambda = factor * sigma * sqrt(2 ln N)
  // MSE sweeps report the shrinkage estimate itself; least-squares debiasing
  // stays off here because it destabilizes saturated supports at high SNR
  SolverConfig solver = [] {
    SolverConfig cfg;
    cfg.debias = false;
    return cfg;
  }();
  std::string output_path = "results.csv";
  std::string trial_output_path;  // per-trial detail, empty = skip

  int n() const { return t * l; }
};

namespace detail {

inline bool lfsr_kind(FamilyKind kind) { return kind != FamilyKind::fzc; }

}  // namespace detail

/// Throws invalid_argument naming the first violated condition.
inline void validate_config(const ExperimentConfig& cfg) {
  const auto fail = [](const std::string& condition, const std::string& detail) {
    throw std::invalid_argument("config violates " + condition + ": " + detail);
  };
  if (detail::lfsr_kind(cfg.family_kind)) {
    if (cfg.degree < 2) fail("degree_required", "LFSR families need degree >= 2");
    if (cfg.m != (1 << cfg.degree) - 1)
      fail("period_matches_degree", "expected m = 2^degree - 1 = " +
                                        std::to_string((1 << cfg.degree) - 1) + ", got " +
                                        std::to_string(cfg.m));
  } else {
    if (cfg.m < 3 || cfg.m % 2 == 0)
      fail("fzc_period_odd", "fzc family needs odd m >= 3, got " + std::to_string(cfg.m));
  }
  if (cfg.l < 1 || cfg.l > cfg.m) fail("l_in_range", "need 1 <= L <= M");
  if (cfg.m % cfg.l != 0)
    fail("m_divisible_by_l", std::to_string(cfg.m) + " % " + std::to_string(cfg.l) + " != 0");
  if (cfg.t < 1) fail("t_positive", "need t >= 1");
  if ((static_cast<long long>(cfg.t) * cfg.l) % cfg.m != 0)
    fail("t_l_multiple_of_m", "t*L = " + std::to_string(cfg.t * cfg.l) +
                                  " is not a multiple of M = " + std::to_string(cfg.m));
  if (cfg.trials < 1) fail("trials_positive", "need trials >= 1");
  if (cfg.k_list.empty()) fail("k_list_nonempty", "at least one K required");
  for (int k : cfg.k_list)
    if (k < 1 || k > cfg.n())
      fail("k_in_range", "need 1 <= K <= N = " + std::to_string(cfg.n()) + ", got " +
                             std::to_string(k));
  if (cfg.snr_db_list.empty()) fail("snr_list_nonempty", "at least one SNR required");
  for (double snr : cfg.snr_db_list)
    if (std::isnan(snr)) fail("snr_finite_or_inf", "NaN SNR entry");
  if (!(cfg.lambda_factor > 0.0)) fail("lambda_factor_positive", "need lambda_factor > 0");
  cfg.solver.validate();
}

inline SequenceFamily family_from_config(const ExperimentConfig& cfg) {
  switch (cfg.family_kind) {
    case FamilyKind::fzc:
      return fzc_family(cfg.m);
    case FamilyKind::m_sequence:
      return m_sequence_family(LfsrSpec::primitive(cfg.degree));
    case FamilyKind::gold:
      return gold_family(cfg.degree);
    case FamilyKind::kasami:
      return kasami_family(cfg.degree);
  }
  throw std::invalid_argument("config violates family_known: unrecognized family kind");
}

inline PilotPlan plan_from_config(const ExperimentConfig& cfg) {
  return assign_pilots(family_from_config(cfg), cfg.t, cfg.m, cfg.l);
}

// ---------------------------------------------------------------------------
// flat key-value configuration text

namespace detail {

inline std::string strip(const std::string& text) {
  std::size_t first = 0;
  std::size_t last = text.size();
  while (first < last && std::isspace(static_cast<unsigned char>(text[first]))) ++first;
  while (last > first && std::isspace(static_cast<unsigned char>(text[last - 1]))) --last;
  return text.substr(first, last - first);
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream stream(text);
  while (std::getline(stream, item, ',')) {
    item = strip(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

inline double parse_real(const std::string& token) {
  if (token == "inf" || token == "+inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double value = std::stod(token, &used);
  if (used != token.size()) throw std::invalid_argument("trailing characters in number: " + token);
  return value;
}

inline long long parse_integer(const std::string& token) {
  std::size_t used = 0;
  const long long value = std::stoll(token, &used);
  if (used != token.size()) throw std::invalid_argument("trailing characters in integer: " + token);
  return value;
}

inline bool parse_flag(const std::string& token) {
  if (token == "true" || token == "1" || token == "yes") return true;
  if (token == "false" || token == "0" || token == "no") return false;
  throw std::invalid_argument("expected boolean, got: " + token);
}

}  // namespace detail

/// One `key = value` per line; `#` starts a comment; lists are
/// comma-separated. Unknown keys are rejected so typos fail loudly.
inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  int line_number = 0;
  bool noiseless = false;
  while (std::getline(in, line)) {
    ++line_number;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::strip(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_number) +
                                  ": expected key = value");
    const std::string key = detail::strip(line.substr(0, eq));
    const std::string value = detail::strip(line.substr(eq + 1));
    try {
      if (key == "family") {
        cfg.family_kind = family_kind_from_string(value);
      } else if (key == "m") {
        cfg.m = static_cast<int>(detail::parse_integer(value));
      } else if (key == "degree") {
        cfg.degree = static_cast<int>(detail::parse_integer(value));
        cfg.m = (1 << cfg.degree) - 1;
      } else if (key == "l") {
        cfg.l = static_cast<int>(detail::parse_integer(value));
      } else if (key == "t") {
        cfg.t = static_cast<int>(detail::parse_integer(value));
      } else if (key == "k_list") {
        cfg.k_list.clear();
        for (const std::string& item : detail::split_list(value))
          cfg.k_list.push_back(static_cast<int>(detail::parse_integer(item)));
      } else if (key == "snr_db_list") {
        cfg.snr_db_list.clear();
        for (const std::string& item : detail::split_list(value))
          cfg.snr_db_list.push_back(detail::parse_real(item));
      } else if (key == "noiseless") {
        noiseless = detail::parse_flag(value);
      } else if (key == "trials") {
        cfg.trials = static_cast<int>(detail::parse_integer(value));
      } else if (key == "seed") {
        cfg.base_seed = static_cast<std::uint64_t>(detail::parse_integer(value));
      } else if (key == "magnitude") {
        cfg.magnitude = magnitude_model_from_string(value);
      } else if (key == "lambda_factor") {
        cfg.lambda_factor = detail::parse_real(value);
      } else if (key == "lambda") {
        cfg.solver.lambda = detail::parse_real(value);
      } else if (key == "continuation_steps") {
        cfg.solver.continuation_steps = static_cast<int>(detail::parse_integer(value));
      } else if (key == "max_iters") {
        cfg.solver.max_iters = static_cast<int>(detail::parse_integer(value));
      } else if (key == "rel_tol") {
        cfg.solver.rel_tol = detail::parse_real(value);
      } else if (key == "debias") {
        cfg.solver.debias = detail::parse_flag(value);
      } else if (key == "support_threshold") {
        cfg.solver.support_threshold = detail::parse_real(value);
      } else if (key == "out") {
        cfg.output_path = value;
      } else if (key == "trial_out") {
        cfg.trial_output_path = value;
      } else {
        throw std::invalid_argument("unknown key: " + key);
      }
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& error) {
      throw std::invalid_argument("config line " + std::to_string(line_number) + " (" + key +
                                  "): " + error.what());
    }
  }
  if (noiseless) cfg.snr_db_list = {std::numeric_limits<double>::infinity()};
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  return parse_config(in);
}

// ---------------------------------------------------------------------------
// metrics

struct TrialResult {
  int k = 0;
  double snr_db = 0.0;
  int trial_index = 0;
  double mse = 0.0;
  double rel_err = 0.0;
  double support_precision = 0.0;
  double support_recall = 0.0;
  int solver_iterations = 0;
  bool converged = false;
};

struct AggregateRow {
  int k = 0;
  double snr_db = 0.0;
  int trials = 0;
  double mean_mse = 0.0;
  double median_mse = 0.0;
  double exact_rate = 0.0;  // fraction with rel_err < 1e-4
  double mean_iters = 0.0;
};

struct AggregateResult {
  std::vector<AggregateRow> rows;        // sorted by (K, snr)
  std::vector<TrialResult> trial_rows;   // sorted by (K, snr, trial)
};

/// mse = ||h - estimate||^2 / N, rel_err = ||h - estimate|| / ||h||,
/// precision/recall of the estimated support against the true one.
inline TrialResult compute_metrics(const SparseChannel& truth, const cvec& estimate,
                                   const std::vector<int>& support_estimate) {
  if (static_cast<int>(estimate.size()) != truth.length)
    throw std::invalid_argument("compute_metrics: estimate length != channel length");
  TrialResult result;
  const cvec dense = truth.dense();
  double err_sq = 0.0;
  double truth_sq = 0.0;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    err_sq += std::norm(dense[i] - estimate[i]);
    truth_sq += std::norm(dense[i]);
  }
  result.mse = err_sq / static_cast<double>(truth.length);
  if (truth_sq > 0.0) {
    result.rel_err = std::sqrt(err_sq / truth_sq);
  } else {
    result.rel_err = err_sq > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  std::vector<int> common;
  std::set_intersection(truth.support.begin(), truth.support.end(), support_estimate.begin(),
                        support_estimate.end(), std::back_inserter(common));
  const double hits = static_cast<double>(common.size());
  result.support_precision = support_estimate.empty() ? (truth.support.empty() ? 1.0 : 0.0)
                                                      : hits / static_cast<double>(support_estimate.size());
  result.support_recall =
      truth.support.empty() ? 1.0 : hits / static_cast<double>(truth.support.size());
  return result;
}

// ---------------------------------------------------------------------------
// seeded trial execution

namespace detail {

inline std::uint64_t snr_key(double snr_db) { return std::bit_cast<std::uint64_t>(snr_db); }

}  // namespace detail

/// One seeded trial: draw channel, measure, corrupt, recover, score.
/// Seed streams depend only on (base_seed, K, snr, trial), never on the
/// position of the cell inside the sweep.
inline TrialResult run_trial(const MeasurementOperator& op, const ExperimentConfig& cfg, int k,
                             double snr_db, int trial) {
  const std::uint64_t channel_seed =
      mix_seed({cfg.base_seed, static_cast<std::uint64_t>(k), detail::snr_key(snr_db),
                static_cast<std::uint64_t>(trial), 0});
  const std::uint64_t noise_seed =
      mix_seed({cfg.base_seed, static_cast<std::uint64_t>(k), detail::snr_key(snr_db),
                static_cast<std::uint64_t>(trial), 1});
  const SparseChannel channel = generate_sparse_channel(cfg.n(), k, cfg.magnitude, channel_seed);
  const cvec clean = op.forward(channel.dense());

  RecoveryResult recovery;
  if (std::isinf(snr_db) && snr_db > 0.0) {
    recovery = basis_pursuit(op, clean, cfg.solver);
  } else {
    const auto [noisy, noise] = add_awgn(clean, snr_db, noise_seed);
    SolverConfig solver = cfg.solver;
    solver.lambda = cfg.lambda_factor * std::sqrt(noise.realized_sigma_sq) *
                    std::sqrt(2.0 * std::log(static_cast<double>(cfg.n())));
    recovery = lasso(op, noisy, solver);
  }

  TrialResult result = compute_metrics(channel, recovery.estimate, recovery.support_estimate);
  result.k = k;
  result.snr_db = snr_db;
  result.trial_index = trial;
  result.solver_iterations = recovery.iterations;
  result.converged = recovery.converged;
  return result;
}

/// Full sweep over k_list x snr_db_list x trials. Workers > 1 run trials
/// concurrently; the reduction is ordered by (K, snr, trial), so output
/// is byte-identical for any worker count.
inline AggregateResult run_experiment(const ExperimentConfig& cfg, int workers = 1) {
  validate_config(cfg);
  const PilotPlan plan = plan_from_config(cfg);
  const MeasurementOperator op = MeasurementOperator::from_plan(plan);

  std::vector<int> ks = cfg.k_list;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  std::vector<double> snrs = cfg.snr_db_list;
  std::sort(snrs.begin(), snrs.end());
  snrs.erase(std::unique(snrs.begin(), snrs.end()), snrs.end());

  struct Task {
    int k;
    double snr_db;
    int trial;
  };
  std::vector<Task> tasks;
  tasks.reserve(ks.size() * snrs.size() * static_cast<std::size_t>(cfg.trials));
  for (int k : ks)
    for (double snr : snrs)
      for (int trial = 0; trial < cfg.trials; ++trial) tasks.push_back({k, snr, trial});

  std::vector<TrialResult> slots(tasks.size());
  const int thread_count =
      std::max(1, std::min(workers, static_cast<int>(tasks.size())));
  if (thread_count == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i)
      slots[i] = run_trial(op, cfg, tasks[i].k, tasks[i].snr_db, tasks[i].trial);
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const auto worker = [&]() {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        try {
          slots[i] = run_trial(op, cfg, tasks[i].k, tasks[i].snr_db, tasks[i].trial);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int w = 0; w < thread_count; ++w) pool.emplace_back(worker);
    for (std::thread& thread : pool) thread.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  AggregateResult result;
  result.trial_rows = std::move(slots);
  std::size_t offset = 0;
  for (int k : ks) {
    for (double snr : snrs) {
      AggregateRow row;
      row.k = k;
      row.snr_db = snr;
      row.trials = cfg.trials;
      std::vector<double> mses;
      mses.reserve(static_cast<std::size_t>(cfg.trials));
      double iter_sum = 0.0;
      int exact = 0;
      for (int trial = 0; trial < cfg.trials; ++trial) {
        const TrialResult& tr = result.trial_rows[offset + static_cast<std::size_t>(trial)];
        mses.push_back(tr.mse);
        iter_sum += static_cast<double>(tr.solver_iterations);
        if (tr.rel_err < 1e-4) ++exact;
      }
      offset += static_cast<std::size_t>(cfg.trials);
      double sum = 0.0;
      for (double v : mses) sum += v;
      row.mean_mse = sum / static_cast<double>(cfg.trials);
      std::sort(mses.begin(), mses.end());
      const std::size_t mid = mses.size() / 2;
      row.median_mse =
          mses.size() % 2 == 1 ? mses[mid] : 0.5 * (mses[mid - 1] + mses[mid]);
      row.exact_rate = static_cast<double>(exact) / static_cast<double>(cfg.trials);
      row.mean_iters = iter_sum / static_cast<double>(cfg.trials);
      result.rows.push_back(row);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// CSV emission

namespace detail {

inline std::string format_real(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

}  // namespace detail

inline std::string aggregate_csv(const AggregateResult& result) {
  std::string out = "K,snr_db,trials,mean_mse,median_mse,exact_rate,mean_iters\n";
  for (const AggregateRow& row : result.rows) {
    out += std::to_string(row.k);
    out += ',';
    out += detail::format_real(row.snr_db);
    out += ',';
    out += std::to_string(row.trials);
    out += ',';
    out += detail::format_real(row.mean_mse);
    out += ',';
    out += detail::format_real(row.median_mse);
    out += ',';
    out += detail::format_real(row.exact_rate);
    out += ',';
    out += detail::format_real(row.mean_iters);
    out += '\n';
  }
  return out;
}

inline std::string trial_csv(const AggregateResult& result) {
  std::string out = "K,snr_db,trial,mse,rel_err,precision,recall,iters,converged\n";
  for (const TrialResult& row : result.trial_rows) {
    out += std::to_string(row.k);
    out += ',';
    out += detail::format_real(row.snr_db);
    out += ',';
    out += std::to_string(row.trial_index);
    out += ',';
    out += detail::format_real(row.mse);
    out += ',';
    out += detail::format_real(row.rel_err);
    out += ',';
    out += detail::format_real(row.support_precision);
    out += ',';
    out += detail::format_real(row.support_recall);
    out += ',';
    out += std::to_string(row.solver_iterations);
    out += ',';
    out += row.converged ? '1' : '0';
    out += '\n';
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

/// Sweep plus CSV emission to the configured paths.
inline AggregateResult run_experiment_to_files(const ExperimentConfig& cfg, int workers = 1) {
  AggregateResult result = run_experiment(cfg, workers);
  if (!cfg.output_path.empty()) write_text_file(cfg.output_path, aggregate_csv(result));
  if (!cfg.trial_output_path.empty()) write_text_file(cfg.trial_output_path, trial_csv(result));
  return result;
}

// ---------------------------------------------------------------------------
// analysis reports

/// Operator-level report for the configured family; margin_k defaults to
/// the largest K in the sweep.
inline AnalysisReport analyze_config(const ExperimentConfig& cfg, long long margin_k = 0,
                                     double c0 = 1.0) {
  validate_config(cfg);
  const PilotPlan plan = plan_from_config(cfg);
  const MeasurementOperator op = MeasurementOperator::from_plan(plan);
  if (margin_k == 0) margin_k = *std::max_element(cfg.k_list.begin(), cfg.k_list.end());
  return analyze_operator(op, margin_k, c0);
}

inline std::string report_text(const AnalysisReport& report) {
  std::ostringstream out;
  const auto line = [&out](const char* label, const std::string& value) {
    out << label;
    for (std::size_t i = std::string(label).size(); i < 24; ++i) out << ' ';
    out << value << '\n';
  };
  line("M", std::to_string(report.m));
  line("N", std::to_string(report.n));
  line("q", std::to_string(report.q));
  line("coherence", detail::format_real(report.coherence));
  line("welch_bound", detail::format_real(report.welch));
  line("spectral_norm_sq", detail::format_real(report.spectral_norm_sq));
  line("spectral_lower", detail::format_real(report.spectral_lower));
  line("spectral_upper", detail::format_real(report.spectral_upper));
  line("theta_a", detail::format_real(report.theta_a));
  line("theta_c", report.theta_c ? detail::format_real(*report.theta_c) : std::string("n/a"));
  line("margin_k", std::to_string(report.margin_k));
  line("c0", detail::format_real(report.c0));
  line("guarantee_margin", detail::format_real(report.guarantee_margin));
  line("sandwiches_hold", report.sandwiches_hold() ? "yes" : "no");
  return out.str();
}

inline std::string report_csv(const AnalysisReport& report) {
  std::string out =
      "m,n,q,coherence,welch_bound,spectral_norm_sq,spectral_lower,spectral_upper,theta_a,theta_c,"
      "margin_k,c0,guarantee_margin,sandwiches_hold\n";
  out += std::to_string(report.m);
  out += ',';
  out += std::to_string(report.n);
  out += ',';
  out += std::to_string(report.q);
  out += ',';
  out += detail::format_real(report.coherence);
  out += ',';
  out += detail::format_real(report.welch);
  out += ',';
  out += detail::format_real(report.spectral_norm_sq);
  out += ',';
  out += detail::format_real(report.spectral_lower);
  out += ',';
  out += detail::format_real(report.spectral_upper);
  out += ',';
  out += detail::format_real(report.theta_a);
  out += ',';
  out += report.theta_c ? detail::format_real(*report.theta_c) : std::string("nan");
  out += ',';
  out += std::to_string(report.margin_k);
  out += ',';
  out += detail::format_real(report.c0);
  out += ',';
  out += detail::format_real(report.guarantee_margin);
  out += ',';
  out += report.sandwiches_hold() ? '1' : '0';
  out += '\n';
  return out;
}

}  // namespace pilotcs
