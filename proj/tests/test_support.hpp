#pragma once

// Independent oracles used by the unit and acceptance suites. Nothing here
// goes through the library's learners or value iteration.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <vector>

#include "pbrs/mdp.hpp"

namespace pbrs::testing {

/// Exact V^pi of a deterministic stationary policy, by solving
/// (I - gamma P_pi) V = R_pi. Terminal states are pinned to 0.
inline std::vector<double> evaluate_policy(const Mdp& mdp, const std::vector<ActionId>& policy) {
  const auto n = static_cast<Eigen::Index>(mdp.n_states());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (StateId s = 0; s < mdp.n_states(); ++s) {
    if (mdp.is_terminal(s)) continue;
    for (const Outcome& o : mdp.outcomes(s, policy[s])) {
      b(s) += o.prob * o.reward;
      if (!mdp.is_terminal(o.next)) a(s, o.next) -= mdp.gamma() * o.prob;
    }
  }
  const Eigen::VectorXd v = a.fullPivLu().solve(b);
  return {v.data(), v.data() + n};
}

struct BruteForceOptimum {
  std::vector<double> values;                  // optimal V
  std::vector<std::vector<ActionId>> optimal;  // every policy attaining it
};

/// Enumerates all n_actions^n_states deterministic policies.
inline BruteForceOptimum brute_force_optimum(const Mdp& mdp, double tie_tol = 1e-9) {
  const std::size_t n = mdp.n_states();
  const std::size_t k = mdp.n_actions();
  std::vector<ActionId> policy(n, 0);
  BruteForceOptimum best;
  best.values.assign(n, -INFINITY);
  while (true) {
    const auto v = evaluate_policy(mdp, policy);
    // An optimal policy dominates in every state; compare on the sum first.
    double sum_v = 0.0, sum_best = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      sum_v += v[s];
      sum_best += best.values[s];
    }
    if (sum_v > sum_best + tie_tol) {
      best.values = v;
      best.optimal = {policy};
    } else if (std::abs(sum_v - sum_best) <= tie_tol) {
      best.optimal.push_back(policy);
    }
    std::size_t pos = 0;
    while (pos < n && ++policy[pos] == k) policy[pos++] = 0;
    if (pos == n) break;
  }
  return best;
}

}  // namespace pbrs::testing
