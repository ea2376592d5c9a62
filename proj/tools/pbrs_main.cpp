// Command-line front end: equivalence verification sweeps and gridworld
// initialization experiments.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pbrs/error.hpp"
#include "pbrs/experiment.hpp"
#include "pbrs/verification.hpp"

namespace {

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::string out;
  bool verbose = false;
  bool exact_mode = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--seed", flags.seed, "Base seed");
  cmd->add_option("--trials", flags.trials, "Number of trials (seeds per configuration for verify)");
  cmd->add_option("--out", flags.out, "CSV output path");
  cmd->add_flag("--verbose", flags.verbose, "Dump per-step lockstep CSV to stdout / echo config");
  cmd->add_flag("--exact-mode", flags.exact_mode, "Canonical summation order; require bitwise equality");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw pbrs::ConfigError("cannot write '" + path + "'");
  return out;
}

int verify_updates(const CommonFlags& flags) {
  pbrs::UpdateSweepOptions options;
  if (flags.seed) options.base_seed = *flags.seed;
  if (flags.trials) options.n_seeds = *flags.trials;
  options.exact_mode = flags.exact_mode;

  std::ofstream csv;
  if (!flags.out.empty()) {
    csv = open_out(flags.out);
    csv << "gamma,seed_index,algorithm,alpha,lambda,trace_kind,watkins_cut,max_delta_divergence,"
           "max_td_divergence,max_delta_magnitude,td_bit_mismatches,passed\n";
  }
  std::size_t failures = 0;
  double worst_delta = 0.0, worst_td = 0.0;
  const auto rows = pbrs::run_update_equivalence_sweep(
      options,
      [&](const pbrs::UpdateSweepRow& row) {
        const auto& c = row.config;
        worst_delta = std::max(worst_delta, row.report.max_delta_divergence);
        worst_td = std::max(worst_td, row.report.max_td_divergence);
        if (csv.is_open())
          csv << c.gamma << ',' << row.seed_index << ',' << to_string(c.algorithm) << ',' << c.alpha << ','
              << c.lambda << ',' << to_string(c.trace_kind) << ',' << c.watkins_cut << ',' << std::setprecision(17)
              << row.report.max_delta_divergence << ',' << row.report.max_td_divergence << ','
              << row.report.max_delta_magnitude << ',' << row.report.td_bit_mismatches << ',' << row.passed
              << std::setprecision(6) << '\n';
        if (!row.passed) {
          ++failures;
          std::cerr << "FAIL gamma=" << c.gamma << " seed=" << row.seed_index << " " << to_string(c.algorithm)
                    << " alpha=" << c.alpha << " lambda=" << c.lambda << " " << to_string(c.trace_kind)
                    << (c.watkins_cut ? " watkins" : "") << " dQ=" << row.report.max_delta_divergence
                    << " delta=" << row.report.max_td_divergence << " max|dQ|=" << row.report.max_delta_magnitude
                    << '\n';
        }
      },
      flags.verbose ? &std::cout : nullptr);

  std::cerr << "theorem1: " << rows.size() - failures << "/" << rows.size() << " runs passed"
            << (flags.exact_mode ? " (exact mode)" : "") << "; max |dQ - dQ'| = " << worst_delta
            << ", max |delta - delta'| = " << worst_td << '\n';
  return failures == 0 ? 0 : 1;
}

int verify_policies(const CommonFlags& flags) {
  pbrs::PolicySweepOptions options;
  if (flags.seed) options.base_seed = *flags.seed;
  if (flags.trials) options.n_seeds = *flags.trials;
  options.exact_mode = flags.exact_mode;

  std::ofstream csv;
  if (!flags.out.empty()) {
    csv = open_out(flags.out);
    csv << "environment,policy,seed_index,algorithm,lambda,trajectories_identical,max_policy_divergence,"
           "max_delta_divergence,near_boundary_draws,passed\n";
  }
  std::size_t failures = 0;
  const auto rows = pbrs::run_policy_equivalence_sweep(
      options,
      [&](const pbrs::PolicySweepRow& row) {
        if (csv.is_open())
          csv << row.environment << ',' << row.policy << ',' << row.seed_index << ','
              << to_string(row.config.algorithm) << ',' << row.config.lambda << ','
              << row.report.trajectories_identical << ',' << std::setprecision(17)
              << row.report.max_policy_divergence << ',' << row.report.max_delta_divergence
              << std::setprecision(6) << ',' << row.report.near_boundary_draws << ',' << row.passed << '\n';
        if (!row.passed) {
          ++failures;
          std::cerr << "FAIL " << row.environment << " " << row.policy << " seed=" << row.seed_index << " "
                    << to_string(row.config.algorithm) << " lambda=" << row.config.lambda
                    << " identical=" << row.report.trajectories_identical
                    << " tv=" << row.report.max_policy_divergence
                    << " boundary_draws=" << row.report.near_boundary_draws << '\n';
        }
      },
      flags.verbose ? &std::cout : nullptr);

  std::cerr << "theorem2: " << rows.size() - failures << "/" << rows.size() << " runs passed\n";
  return failures == 0 ? 0 : 1;
}

pbrs::ExperimentConfig load_config(const std::string& path, const CommonFlags& flags) {
  pbrs::ExperimentConfig config = pbrs::load_experiment_config(path);
  if (flags.seed) config.base_seed = *flags.seed;
  if (flags.trials) config.n_trials = *flags.trials;
  if (flags.exact_mode) config.learner.exact_mode = true;
  config.validate();
  if (flags.verbose) std::cerr << pbrs::to_json(config) << '\n';
  return config;
}

void emit_csv(const std::vector<pbrs::LabeledTrial>& rows, const std::string& path) {
  if (path.empty()) {
    pbrs::write_trials_csv(std::cout, rows);
  } else {
    std::ofstream out = open_out(path);
    pbrs::write_trials_csv(out, rows);
  }
}

int experiment_run(const std::string& path, const CommonFlags& flags) {
  const pbrs::ExperimentConfig config = load_config(path, flags);
  const auto results = pbrs::run_experiment(config);
  std::vector<pbrs::LabeledTrial> rows;
  const std::string scheme = pbrs::scheme_label(config);
  for (std::size_t i = 0; i < results.size(); ++i) rows.push_back({i, scheme, results[i]});
  emit_csv(rows, flags.out);
  std::cerr << scheme << ": median steps_to_first_goal = " << pbrs::median_steps_to_first_goal(results) << '\n';
  return 0;
}

int experiment_pair(const std::string& path, const CommonFlags& flags) {
  const pbrs::ExperimentConfig config = load_config(path, flags);
  const pbrs::PairedResults paired = pbrs::run_equivalence_experiment(config);
  std::vector<pbrs::LabeledTrial> rows;
  for (std::size_t i = 0; i < paired.shaped.size(); ++i) rows.push_back({i, "shaped", paired.shaped[i]});
  for (std::size_t i = 0; i < paired.initialized.size(); ++i) rows.push_back({i, "initialized", paired.initialized[i]});
  emit_csv(rows, flags.out);
  std::cerr << "pair(" << paired.potential << "): arms " << (paired.identical() ? "identical" : "DIFFER") << '\n';
  return paired.identical() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Potential-based shaping vs. Q-value initialization"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string config_path;

  auto* verify = app.add_subcommand("verify", "Run an equivalence verification sweep");
  verify->require_subcommand(1);
  auto* theorem1 = verify->add_subcommand("theorem1", "Update equivalence on random off-policy scripts");
  auto* theorem2 = verify->add_subcommand("theorem2", "Policy equivalence on coupled on-policy runs");
  add_common_flags(theorem1, flags);
  add_common_flags(theorem2, flags);

  auto* experiment = app.add_subcommand("experiment", "Gridworld initialization experiments");
  experiment->require_subcommand(1);
  auto* run = experiment->add_subcommand("run", "Run one configured scheme");
  auto* pair = experiment->add_subcommand("pair", "Run the shaped and initialized arms on shared seeds");
  for (auto* cmd : {run, pair}) {
    cmd->add_option("config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
    add_common_flags(cmd, flags);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (theorem1->parsed()) return verify_updates(flags);
    if (theorem2->parsed()) return verify_policies(flags);
    if (run->parsed()) return experiment_run(config_path, flags);
    if (pair->parsed()) return experiment_pair(config_path, flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
