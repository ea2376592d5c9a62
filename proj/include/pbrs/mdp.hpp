#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pbrs/rng.hpp"

namespace pbrs {

using StateId = std::size_t;
using ActionId = std::size_t;

/// One support point of a transition distribution.
struct Outcome {
  StateId next;
  double prob;
  double reward;
};

/// The 4-tuple <s, a, r, s'> plus whether s' is terminal.
struct Experience {
  StateId s;
  ActionId a;
  double r;
  StateId s_next;
  bool s_next_terminal;

  bool operator==(const Experience&) const = default;
};

/// Finite MDP with a uniform action count per state.
///
/// Immutable after construction. Transitions are stored sparsely per
/// (state, action) as a list of outcomes whose probabilities sum to one.
/// Terminal states are absorbing with reward 0 under every action.
///
/// gamma == 1 is only meaningful for episodic MDPs in which every policy
/// reaches a terminal state with probability one (or, for stochastic
/// shortest path problems, where improper policies accrue unbounded cost).
/// The built-in constructors check this; user-supplied MDPs are trusted.
class Mdp {
 public:
  static constexpr double kNormalizationTolerance = 1e-12;

  /// `outcomes` is indexed by s * n_actions + a. Throws ContractViolation if
  /// any distribution is malformed or a terminal state is not absorbing.
  Mdp(std::size_t n_states, std::size_t n_actions,
      std::vector<std::vector<Outcome>> outcomes, std::vector<bool> terminal,
      double gamma, StateId start_state = 0);

  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }
  double gamma() const { return gamma_; }
  StateId start_state() const { return start_; }
  bool is_terminal(StateId s) const { return terminal_[s]; }
  const std::vector<bool>& terminal_mask() const { return terminal_; }
  bool has_nonterminal_state() const;

  std::span<const Outcome> outcomes(StateId s, ActionId a) const {
    return outcomes_[s * n_actions_ + a];
  }

  /// Probability of moving to s_next; 0 outside the support.
  double transition_prob(StateId s, ActionId a, StateId s_next) const;

  /// Reward of the (s, a, s_next) outcome; 0 outside the support.
  double reward(StateId s, ActionId a, StateId s_next) const;

  /// Largest reward over all outcomes with positive probability.
  double max_reward() const;

 private:
  std::size_t n_states_;
  std::size_t n_actions_;
  std::vector<std::vector<Outcome>> outcomes_;
  std::vector<bool> terminal_;
  double gamma_;
  StateId start_;
};

/// Samples s' from transition(s, a) by inverse CDF on `u` in [0, 1).
Experience step_with_draw(const Mdp& mdp, StateId s, ActionId a, double u);

/// Consumes exactly one uniform draw from `rng`.
Experience step(const Mdp& mdp, StateId s, ActionId a, Rng& rng);

// ---------------------------------------------------------------------------
// Gridworld

struct Cell {
  std::size_t x;
  std::size_t y;

  bool operator==(const Cell&) const = default;
};

/// Gridworld actions. "up" increases y.
enum class Move : ActionId { up = 0, down = 1, left = 2, right = 3 };
inline constexpr std::size_t kGridActions = 4;

inline StateId grid_state(std::size_t width, Cell c) { return c.y * width + c.x; }
inline Cell grid_cell(std::size_t width, StateId s) { return {s % width, s / width}; }

/// Four-action gridworld. With probability slip_prob the chosen move is
/// replaced by a uniformly random move; walls turn a move into a self
/// transition. Entering the goal pays goal_reward and ends the episode,
/// every other transition pays step_reward.
///
/// gamma == 1 requires step_reward < 0 (or no non-terminal cells) so that
/// policies that never reach the goal have unbounded negative return.
Mdp make_gridworld(std::size_t width, std::size_t height, Cell goal,
                   double step_reward, double goal_reward, double slip_prob,
                   double gamma, Cell start = {0, 0});

// ---------------------------------------------------------------------------
// Random MDPs

/// Non-episodic random MDP: every (s, a) moves to `branching` distinct
/// successors with random probabilities; rewards uniform in [-1, 1].
/// Requires gamma < 1 since no state is terminal.
Mdp make_random_mdp(std::size_t n_states, std::size_t n_actions,
                    std::size_t branching, std::uint64_t seed, double gamma);

/// Episodic variant: the last `n_terminal` states are terminal and every
/// non-terminal (s, a) includes at least one terminal successor, so every
/// policy terminates with probability one and gamma == 1 is permitted.
Mdp make_random_episodic_mdp(std::size_t n_states, std::size_t n_actions,
                             std::size_t branching, std::size_t n_terminal,
                             std::uint64_t seed, double gamma);

}  // namespace pbrs
