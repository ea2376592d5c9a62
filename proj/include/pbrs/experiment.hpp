#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pbrs/learner.hpp"
#include "pbrs/mdp.hpp"
#include "pbrs/policy.hpp"
#include "pbrs/shaping.hpp"

namespace pbrs {

struct EnvironmentSpec {
  std::size_t width = 5;
  std::size_t height = 5;
  Cell goal{4, 4};
  Cell start{0, 0};
  double step_reward = -1.0;
  double goal_reward = 0.0;
  double slip_prob = 0.0;
  double gamma = 1.0;
};

struct LearnerSpec {
  Algorithm algorithm = Algorithm::q_learning;
  double alpha = 0.1;
  double lambda = 0.0;
  TraceKind trace_kind = TraceKind::accumulating;
  bool watkins_cut = false;
  bool exact_mode = false;
};

/// Goal-directed gridworld study configuration.
///
/// initialization: "zero" | "constant:<v>" | "optimistic" | "potential:<name>"
/// shaping:        "none" | "potential:<name>"
/// Potential names are "zero", "negated_manhattan_distance_to_goal",
/// "optimal_value", or a key of `potentials` (one value per state, indexed
/// y * width + x).
struct ExperimentConfig {
  EnvironmentSpec environment;
  std::string initialization = "zero";
  std::string shaping = "none";
  std::map<std::string, std::vector<double>> potentials;
  std::string policy = "greedy";
  LearnerSpec learner;
  std::size_t n_episodes = 100;
  std::size_t max_steps_per_episode = 1'000;
  std::size_t max_total_steps = 100'000;
  std::size_t n_trials = 1;
  std::uint64_t base_seed = 0;

  /// Structural validation (ranges, scheme syntax). Throws ConfigError.
  void validate() const;
};

/// Parses the JSON form; unknown keys anywhere are an error.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);
std::string to_json(const ExperimentConfig& config);

struct TrialResult {
  std::size_t steps_to_first_goal = 0;  // total_steps when censored
  bool goal_censored = false;
  std::size_t episodes_to_optimal = 0;  // episodes run when censored
  bool optimal_censored = false;
  std::size_t total_steps = 0;

  bool operator==(const TrialResult&) const = default;
};

/// "none", "goal", "optimal" or "both".
std::string censored_label(const TrialResult& result);

Mdp build_environment(const ExperimentConfig& config);

/// Resolves a named potential against the config's environment.
Potential resolve_potential(const std::string& name, const ExperimentConfig& config, const Mdp& mdp);

/// Upper bound on every Q*: max_reward / (1 - gamma) for gamma < 1, and
/// max_steps_per_episode * max(max_reward, 0) for gamma = 1.
double optimistic_value(const Mdp& mdp, std::size_t max_steps_per_episode);

/// Learner for the config's initialization and shaping schemes.
Learner build_learner(const ExperimentConfig& config, const Mdp& mdp);

/// Runs n_trials seeded trials. Trial i uses seed derive_seed(base_seed, i).
std::vector<TrialResult> run_experiment(const ExperimentConfig& config);

struct PairedResults {
  std::string potential;
  std::vector<TrialResult> shaped;       // shaping with Phi, zero initialization
  std::vector<TrialResult> initialized;  // no shaping, initialization Phi

  bool identical() const { return shaped == initialized; }
};

/// Both arms of the shaping/initialization comparison on shared seeds. The
/// potential is taken from `shaping` or `initialization`, whichever names one.
PairedResults run_equivalence_experiment(const ExperimentConfig& config);

/// "<initialization>/<shaping>", the scheme column of run_experiment output.
std::string scheme_label(const ExperimentConfig& config);

struct LabeledTrial {
  std::size_t trial;
  std::string scheme;
  TrialResult result;
};

void write_trials_csv(std::ostream& out, const std::vector<LabeledTrial>& rows);

/// Median of steps_to_first_goal, censored trials counted at their budget.
double median_steps_to_first_goal(const std::vector<TrialResult>& results);

}  // namespace pbrs
