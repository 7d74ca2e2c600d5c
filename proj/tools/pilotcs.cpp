// SPDX-License-Identifier: Apache-2.0
//
// pilotcs command line tool.
//
//   sequences  emit a sequence family and its pilot assignment manifest
//   analyze    print coherence / spectral-norm report for the operator
//   recover    run one seeded recovery instance and report metrics
//   simulate   run the full Monte Carlo sweep and write CSV results
//
// Exit codes: 0 success, 1 validation or runtime error, 2 analysis
// bound violation (analyze only).

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pilotcs/pilotcs.hpp"

namespace {

int resolve_workers(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("PILOTCS_WORKERS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && parsed > 0) return static_cast<int>(parsed);
  }
  return 1;
}

pilotcs::ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return pilotcs::ExperimentConfig{};
  return pilotcs::parse_config_file(path);
}

std::string format_complex(const pilotcs::cplx& value) {
  char buffer[80];
  std::snprintf(buffer, sizeof buffer, "%.17g%+.17gj", value.real(), value.imag());
  return buffer;
}

void write_family_file(const pilotcs::SequenceFamily& family, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  char header[160];
  std::snprintf(header, sizeof header, "%s %d %d %.17g %.17g\n",
                pilotcs::to_string(family.kind).c_str(), family.period(), family.size(),
                family.theta_a, family.theta_c.value_or(std::nan("")));
  out << header;
  for (const pilotcs::PeriodicSequence& seq : family.sequences) {
    for (std::size_t k = 0; k < seq.values().size(); ++k) {
      if (k > 0) out << ',';
      out << format_complex(seq.values()[k]);
    }
    out << '\n';
  }
}

int run_sequences(const std::string& config_path, std::string out_path, std::string manifest_path) {
  pilotcs::ExperimentConfig cfg = load_config(config_path);
  pilotcs::validate_config(cfg);
  const pilotcs::SequenceFamily family = pilotcs::family_from_config(cfg);
  const pilotcs::PilotPlan plan = pilotcs::assign_pilots(family, cfg.t, cfg.m, cfg.l);
  if (out_path.empty()) out_path = "family.txt";
  if (manifest_path.empty()) manifest_path = out_path + ".manifest";
  write_family_file(family, out_path);
  std::ofstream manifest(manifest_path, std::ios::binary);
  if (!manifest) throw std::runtime_error("cannot open output file: " + manifest_path);
  pilotcs::write_manifest(plan, manifest);
  std::cout << "wrote " << family.size() << " sequences to " << out_path << " and manifest to "
            << manifest_path << "\n";
  return 0;
}

int run_analyze(const std::string& config_path, long long margin_k, double c0, bool as_csv,
                const std::string& out_path) {
  const pilotcs::ExperimentConfig cfg = load_config(config_path);
  const pilotcs::AnalysisReport report = pilotcs::analyze_config(cfg, margin_k, c0);
  const std::string rendered =
      as_csv ? pilotcs::report_csv(report) : pilotcs::report_text(report);
  if (out_path.empty()) {
    std::cout << rendered;
  } else {
    pilotcs::write_text_file(out_path, rendered);
  }
  if (!report.sandwiches_hold()) {
    std::cerr << "analysis bounds violated\n";
    return 2;
  }
  return 0;
}

int run_recover(const std::string& config_path, std::optional<std::uint64_t> seed,
                std::optional<int> k_opt, std::optional<double> snr_opt, int trial,
                const std::string& channel_path, const std::string& out_path) {
  pilotcs::ExperimentConfig cfg = load_config(config_path);
  if (seed) cfg.base_seed = *seed;
  pilotcs::validate_config(cfg);
  const pilotcs::PilotPlan plan = pilotcs::plan_from_config(cfg);
  const pilotcs::MeasurementOperator op = pilotcs::MeasurementOperator::from_plan(plan);
  const double snr_db = snr_opt.value_or(cfg.snr_db_list.front());

  pilotcs::SparseChannel channel;
  if (!channel_path.empty()) {
    std::ifstream in(channel_path);
    if (!in) throw std::runtime_error("cannot open channel file: " + channel_path);
    channel = pilotcs::read_channel(in);
    if (channel.length != cfg.n())
      throw std::invalid_argument("channel length " + std::to_string(channel.length) +
                                  " does not match N = " + std::to_string(cfg.n()));
  } else {
    const int k = k_opt.value_or(cfg.k_list.front());
    const std::uint64_t channel_seed = pilotcs::mix_seed(
        {cfg.base_seed, static_cast<std::uint64_t>(k),
         pilotcs::detail::snr_key(snr_db), static_cast<std::uint64_t>(trial), 0});
    channel = pilotcs::generate_sparse_channel(cfg.n(), k, cfg.magnitude, channel_seed);
  }

  const pilotcs::cvec clean = op.forward(channel.dense());
  pilotcs::RecoveryResult recovery;
  if (std::isinf(snr_db) && snr_db > 0.0) {
    recovery = pilotcs::basis_pursuit(op, clean, cfg.solver);
  } else {
    const std::uint64_t noise_seed = pilotcs::mix_seed(
        {cfg.base_seed, static_cast<std::uint64_t>(channel.sparsity()),
         pilotcs::detail::snr_key(snr_db), static_cast<std::uint64_t>(trial), 1});
    const auto [noisy, noise] = pilotcs::add_awgn(clean, snr_db, noise_seed);
    pilotcs::SolverConfig solver = cfg.solver;
    solver.lambda = cfg.lambda_factor * std::sqrt(noise.realized_sigma_sq) *
                    std::sqrt(2.0 * std::log(static_cast<double>(cfg.n())));
    recovery = pilotcs::lasso(op, noisy, solver);
  }

  const pilotcs::TrialResult metrics =
      pilotcs::compute_metrics(channel, recovery.estimate, recovery.support_estimate);
  char line[256];
  std::snprintf(line, sizeof line,
                "K %d\nsnr_db %.12g\nmse %.12g\nrel_err %.12g\nprecision %.12g\nrecall %.12g\n"
                "iters %d\nconverged %d\n",
                channel.sparsity(), snr_db, metrics.mse, metrics.rel_err,
                metrics.support_precision, metrics.support_recall, recovery.iterations,
                recovery.converged ? 1 : 0);
  std::cout << line;

  if (!out_path.empty()) {
    pilotcs::SparseChannel estimate;
    estimate.length = cfg.n();
    estimate.support = recovery.support_estimate;
    estimate.coefficients.reserve(recovery.support_estimate.size());
    for (int index : recovery.support_estimate)
      estimate.coefficients.push_back(recovery.estimate[static_cast<std::size_t>(index)]);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    pilotcs::write_channel(estimate, out);
  }
  return 0;
}

int run_simulate(const std::string& config_path, std::optional<std::uint64_t> seed, int workers,
                 const std::string& out_path, const std::string& trial_out_path) {
  pilotcs::ExperimentConfig cfg = load_config(config_path);
  if (seed) cfg.base_seed = *seed;
  if (!out_path.empty()) cfg.output_path = out_path;
  if (!trial_out_path.empty()) cfg.trial_output_path = trial_out_path;
  const pilotcs::AggregateResult result =
      pilotcs::run_experiment_to_files(cfg, resolve_workers(workers));
  std::cout << "wrote " << result.rows.size() << " cells x " << cfg.trials << " trials to "
            << cfg.output_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic pilot sequences for compressive channel estimation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string manifest_path;
  std::string trial_out_path;
  std::string channel_path;
  std::uint64_t seed_value = 0;
  bool seed_given = false;
  int workers = 0;
  long long margin_k = 0;
  double c0 = 1.0;
  bool as_csv = false;
  int k_value = 0;
  bool k_given = false;
  double snr_value = 0.0;
  bool snr_given = false;
  int trial = 0;

  CLI::App* sequences = app.add_subcommand("sequences", "emit family and pilot manifest");
  sequences->add_option("--config", config_path, "experiment config file");
  sequences->add_option("--out", out_path, "family output path (default family.txt)");
  sequences->add_option("--manifest", manifest_path, "manifest output path");

  CLI::App* analyze = app.add_subcommand("analyze", "operator coherence and norm report");
  analyze->add_option("--config", config_path, "experiment config file");
  analyze->add_option("--k", margin_k, "sparsity for the guarantee margin");
  analyze->add_option("--c0", c0, "log factor in the guarantee margin");
  analyze->add_flag("--csv", as_csv, "emit CSV instead of aligned text");
  analyze->add_option("--out", out_path, "write report here instead of stdout");

  CLI::App* recover = app.add_subcommand("recover", "single seeded recovery instance");
  recover->add_option("--config", config_path, "experiment config file");
  recover->add_option("--seed", seed_value, "override base seed");
  recover->add_option("--k", k_value, "sparsity of the generated channel");
  recover->add_option("--snr", snr_value, "SNR in dB (inf = noiseless)");
  recover->add_option("--trial", trial, "trial index for the seed stream");
  recover->add_option("--channel", channel_path, "read the true channel from this file");
  recover->add_option("--out", out_path, "write the recovered channel here");

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo sweep with CSV output");
  simulate->add_option("--config", config_path, "experiment config file");
  simulate->add_option("--seed", seed_value, "override base seed");
  simulate->add_option("--workers", workers, "worker threads (default PILOTCS_WORKERS or 1)");
  simulate->add_option("--out", out_path, "aggregate CSV path (overrides config)");
  simulate->add_option("--trial-out", trial_out_path, "per-trial CSV path (overrides config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& error) {
    std::cerr << error.what() << "\n";
    return 1;
  }

  seed_given = recover->count("--seed") > 0 || simulate->count("--seed") > 0;
  k_given = recover->count("--k") > 0;
  snr_given = recover->count("--snr") > 0;

  try {
    if (sequences->parsed()) return run_sequences(config_path, out_path, manifest_path);
    if (analyze->parsed()) return run_analyze(config_path, margin_k, c0, as_csv, out_path);
    if (recover->parsed())
      return run_recover(config_path,
                         seed_given ? std::optional<std::uint64_t>(seed_value) : std::nullopt,
                         k_given ? std::optional<int>(k_value) : std::nullopt,
                         snr_given ? std::optional<double>(snr_value) : std::nullopt, trial,
                         channel_path, out_path);
    if (simulate->parsed())
      return run_simulate(config_path,
                          seed_given ? std::optional<std::uint64_t>(seed_value) : std::nullopt,
                          workers, out_path, trial_out_path);
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  return 0;
}
