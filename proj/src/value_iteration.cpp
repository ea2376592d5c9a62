#include "pbrs/value_iteration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pbrs/error.hpp"

namespace pbrs {

QTable bellman_backup(const Mdp& mdp, const QTable& q) {
  const std::vector<double> v = state_values(mdp, q);
  QTable out = QTable::for_mdp(mdp);
  for (StateId s = 0; s < mdp.n_states(); ++s) {
    if (mdp.is_terminal(s)) continue;
    for (ActionId a = 0; a < mdp.n_actions(); ++a) {
      double total = 0.0;
      for (const Outcome& o : mdp.outcomes(s, a)) total += o.prob * (o.reward + mdp.gamma() * v[o.next]);
      out(s, a) = total;
    }
  }
  return out;
}

QTable value_iteration(const Mdp& mdp, double tol, std::size_t max_iterations) {
  require(tol > 0.0, "value_iteration: tolerance must be positive");
  QTable q = QTable::for_mdp(mdp);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    QTable next = bellman_backup(mdp, q);
    const double residual = max_abs_difference(q, next);
    if (!std::isfinite(residual)) break;
    if (residual <= tol) return q;
    q = std::move(next);
  }
  throw ConvergenceError("value_iteration: no convergence within " + std::to_string(max_iterations) +
                         " sweeps");
}

std::vector<double> state_values(const Mdp& mdp, const QTable& q) {
  std::vector<double> v(mdp.n_states(), 0.0);
  for (StateId s = 0; s < mdp.n_states(); ++s) {
    if (mdp.is_terminal(s)) continue;
    const auto row = q.row(s);
    v[s] = *std::max_element(row.begin(), row.end());
  }
  return v;
}

std::vector<ActionId> greedy_policy(const QTable& q) {
  std::vector<ActionId> policy(q.n_states());
  for (StateId s = 0; s < q.n_states(); ++s) policy[s] = argmax_lowest(q.row(s));
  return policy;
}

std::vector<std::vector<bool>> optimal_action_sets(const QTable& q, double tol) {
  std::vector<std::vector<bool>> sets(q.n_states(), std::vector<bool>(q.n_actions(), false));
  for (StateId s = 0; s < q.n_states(); ++s) {
    const auto row = q.row(s);
    const double best = *std::max_element(row.begin(), row.end());
    for (ActionId a = 0; a < q.n_actions(); ++a) sets[s][a] = row[a] >= best - tol;
  }
  return sets;
}

}  // namespace pbrs
