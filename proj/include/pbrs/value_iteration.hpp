#pragma once

#include <cstddef>
#include <vector>

#include "pbrs/mdp.hpp"
#include "pbrs/q_table.hpp"

namespace pbrs {

/// One Bellman optimality backup: T(Q)(s, a) = sum_s' p (r + gamma max Q(s', .)),
/// with terminal successors contributing no bootstrap.
QTable bellman_backup(const Mdp& mdp, const QTable& q);

/// Iterates the Bellman optimality operator from Q = 0 until
/// max |Q - T(Q)| <= tol and returns that Q. Throws ConvergenceError
/// after `max_iterations` sweeps (typically an improper episodic MDP).
QTable value_iteration(const Mdp& mdp, double tol, std::size_t max_iterations = 1'000'000);

/// V(s) = max_a Q(s, a), and 0 for terminal states.
std::vector<double> state_values(const Mdp& mdp, const QTable& q);

/// Lowest-index greedy action per state.
std::vector<ActionId> greedy_policy(const QTable& q);

/// For every state, which actions are within `tol` of the row maximum.
std::vector<std::vector<bool>> optimal_action_sets(const QTable& q, double tol);

}  // namespace pbrs
