#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "pbrs/equivalence.hpp"

namespace pbrs {

/// Random potential uniform in [-magnitude, magnitude], zero on terminals.
Potential random_potential(const Mdp& mdp, double magnitude, Rng& rng);

/// Random initial table uniform in [-magnitude, magnitude].
QTable random_q_table(const Mdp& mdp, double magnitude, Rng& rng);

// ---------------------------------------------------------------------------
// Update equivalence over random MDPs and off-policy scripts.

struct UpdateSweepOptions {
  std::size_t n_seeds = 20;
  std::uint64_t base_seed = 0;
  std::size_t n_steps = 10'000;
  std::size_t n_states = 20;
  std::size_t n_actions = 4;
  std::size_t branching = 3;
  std::size_t n_terminal = 2;  // episodic MDPs (gamma = 1) only
  double potential_magnitude = 10.0;
  double q0_magnitude = 5.0;
  std::vector<double> alphas{0.1, 0.5, 1.0};
  std::vector<double> gammas{0.9, 1.0};
  std::vector<double> lambdas{0.0, 0.5, 0.9, 1.0};
  bool include_watkins = true;
  // Exact mode passes only on bit-identical TD errors and dQ tables.
  bool exact_mode = false;
  double tolerance = 1e-9;
};

struct UpdateSweepRow {
  std::size_t seed_index;
  LearnerConfig config;
  LockstepReport report;
  bool passed;
};

/// Runs every (gamma, seed, algorithm, alpha, lambda, trace kind, cut)
/// combination. `on_row` sees each result as it completes; `dump`, when
/// set, receives the per-step CSV of every run.
std::vector<UpdateSweepRow> run_update_equivalence_sweep(
    const UpdateSweepOptions& options, const std::function<void(const UpdateSweepRow&)>& on_row = {},
    std::ostream* dump = nullptr);

// ---------------------------------------------------------------------------
// Policy equivalence under coupled on-policy runs.

struct PolicySweepOptions {
  std::size_t n_seeds = 20;
  std::uint64_t base_seed = 0;
  std::size_t n_steps = 1'000;
  double potential_magnitude = 10.0;
  std::vector<std::string> policies{"greedy", "epsilon:0.1", "boltzmann:1"};
  bool exact_mode = false;
  double policy_tolerance = 1e-12;
  double delta_tolerance = 1e-9;
};

struct PolicySweepRow {
  std::string environment;
  std::string policy;
  std::size_t seed_index;
  LearnerConfig config;
  LockstepReport report;
  bool passed;
};

/// Coupled runs on a slippery 5x5 gridworld and an episodic random MDP,
/// for Q-learning and Sarsa with and without traces.
std::vector<PolicySweepRow> run_policy_equivalence_sweep(
    const PolicySweepOptions& options, const std::function<void(const PolicySweepRow&)>& on_row = {},
    std::ostream* dump = nullptr);

}  // namespace pbrs
