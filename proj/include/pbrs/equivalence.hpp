#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "pbrs/learner.hpp"
#include "pbrs/mdp.hpp"
#include "pbrs/policy.hpp"
#include "pbrs/q_table.hpp"
#include "pbrs/shaping.hpp"

namespace pbrs {

struct ScriptStep {
  Experience experience;
  // Sarsa's a' when s' is non-terminal; ignored by Q-learning.
  std::optional<ActionId> next_action;
};

/// A fixed (possibly off-policy) sequence of experiences.
struct ExperienceScript {
  std::vector<ScriptStep> steps;
};

struct LockstepReport {
  std::size_t steps_run = 0;
  double max_delta_divergence = 0.0;   // max over steps, entries of |dQ - dQ'|
  double max_td_divergence = 0.0;      // max over steps of |delta - delta'|
  double max_policy_divergence = 0.0;  // max TV distance at visited states
  bool trajectories_identical = true;  // coupled mode only
  // Coupled action draws landing within kBoundaryBand of a CDF breakpoint.
  std::size_t near_boundary_draws = 0;
  // Steps at which the two TD errors / dQ tables differ in any bit.
  std::size_t td_bit_mismatches = 0;
  std::size_t delta_bit_mismatches = 0;
  double max_delta_magnitude = 0.0;  // max over steps, entries of |dQ| (learner L)

  static constexpr double kBoundaryBand = 1e-12;
};

/// Header for the per-step CSV dump written when a dump stream is given.
void write_lockstep_dump_header(std::ostream& out);

/// Uniform random non-terminal (s, a) pairs with successors drawn from the
/// MDP; next_action is a uniform action whenever s' is non-terminal.
ExperienceScript make_random_script(const Mdp& mdp, std::size_t n_steps, std::uint64_t seed);

/// Feeds the same script to `shaped` (L) and `initialized` (L') and tracks
/// the divergence of their TD errors and dQ tables after every step.
LockstepReport run_lockstep(Learner shaped, Learner initialized, const Mdp& mdp,
                            const ExperienceScript& script, std::ostream* dump = nullptr);

/// L: shaping = phi, initial table q0. L': no shaping, initial table
/// shift_initialization(q0, phi) (structured form in exact mode).
/// config.shaping must be unset.
LockstepReport run_scripted_lockstep(const Mdp& mdp, const QTable& q0, const Potential& phi,
                                     const LearnerConfig& config, const ExperienceScript& script,
                                     std::ostream* dump = nullptr);

/// Runs both learners on-policy from the MDP's start state with shared
/// random draws. Per step, Q-learning consumes one action draw and then one
/// transition draw; Sarsa consumes a transition draw and then the draw for
/// a' (always, even when s' is terminal), plus one draw for the first
/// action of each episode. Episodes restart at the start state.
LockstepReport run_coupled(Learner shaped, Learner initialized, const Mdp& mdp,
                           const PolicyKind& policy, std::size_t n_steps, std::uint64_t seed,
                           std::ostream* dump = nullptr);

LockstepReport run_coupled_onpolicy(const Mdp& mdp, const QTable& q0, const Potential& phi,
                                    const LearnerConfig& config, const PolicyKind& policy,
                                    std::size_t n_steps, std::uint64_t seed,
                                    std::ostream* dump = nullptr);

/// The (L, L') pair used by the harness for a given base table and potential.
std::pair<Learner, Learner> make_learner_pair(const QTable& q0, const Potential& phi,
                                              const LearnerConfig& config);

}  // namespace pbrs
