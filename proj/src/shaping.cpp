#include "pbrs/shaping.hpp"

#include <cmath>
#include <string>

#include "pbrs/error.hpp"

namespace pbrs {

Potential::Potential(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) require(std::isfinite(v), "Potential: values must be finite");
}

Potential Potential::for_mdp(const Mdp& mdp, std::vector<double> values) {
  require(values.size() == mdp.n_states(), "Potential: expected one value per state");
  for (StateId s = 0; s < mdp.n_states(); ++s) {
    if (mdp.is_terminal(s) && values[s] != 0.0)
      throw ConfigError("Potential: terminal state " + std::to_string(s) + " must have potential 0");
  }
  return Potential(std::move(values));
}

QTable shift_initialization(const QTable& q0, const Potential& phi) {
  require(q0.n_states() == phi.size(), "shift_initialization: potential and table disagree on state count");
  QTable out = q0;
  for (StateId s = 0; s < out.n_states(); ++s)
    for (double& v : out.row(s)) v += phi(s);
  return out;
}

double discounted_shaping_sum(const Potential& phi, double gamma, std::span<const StateId> trajectory) {
  require(trajectory.size() >= 2, "discounted_shaping_sum: trajectory needs at least one transition");
  // gamma^t * F(s_t, s_t+1) = gamma^(t+1) * phi(s_t+1) - gamma^t * phi(s_t).
  // Each power comes straight from pow rather than a running product, so
  // consecutive terms cancel exactly and no rounding accumulates along the
  // trajectory. At gamma = 1 every term is exact.
  ExactSum sum;
  double discount = 1.0;
  for (std::size_t t = 0; t + 1 < trajectory.size(); ++t) {
    const double next_discount = std::pow(gamma, static_cast<double>(t + 1));
    sum.add(next_discount * phi(trajectory[t + 1]));
    sum.add(-(discount * phi(trajectory[t])));
    discount = next_discount;
  }
  return sum.value();
}

ShapingTable::ShapingTable(std::size_t n_states, std::vector<double> values)
    : n_states_(n_states), values_(std::move(values)) {
  require(values_.size() == n_states_ * n_states_, "ShapingTable: expected n_states^2 entries");
  for (double v : values_) require(std::isfinite(v), "ShapingTable: values must be finite");
}

ShapingTable ShapingTable::from_potential(const Potential& phi, double gamma,
                                          std::span<const double> perturbation) {
  const std::size_t n = phi.size();
  require(perturbation.empty() || perturbation.size() == n * n,
          "ShapingTable: perturbation must have n_states^2 entries");
  std::vector<double> values(n * n);
  for (StateId s = 0; s < n; ++s) {
    for (StateId t = 0; t < n; ++t) {
      values[s * n + t] = shaping_reward(phi, gamma, s, t);
      if (!perturbation.empty()) values[s * n + t] += perturbation[s * n + t];
    }
  }
  return ShapingTable(n, std::move(values));
}

double ShapingTable::cycle_sum(std::span<const StateId> cycle) const {
  require(cycle.size() >= 2 && cycle.front() == cycle.back(), "cycle_sum: sequence is not closed");
  ExactSum sum;
  for (std::size_t t = 0; t + 1 < cycle.size(); ++t) sum.add((*this)(cycle[t], cycle[t + 1]));
  return sum.value();
}

void ExactSum::add(double x) {
  std::size_t kept = 0;
  for (double y : partials_) {
    if (std::abs(x) < std::abs(y)) std::swap(x, y);
    const double hi = x + y;
    const double lo = y - (hi - x);
    if (lo != 0.0) partials_[kept++] = lo;
    x = hi;
  }
  partials_.resize(kept);
  partials_.push_back(x);
}

double ExactSum::value() const {
  // Round the exact multi-part sum to nearest, ties to even.
  std::size_t n = partials_.size();
  if (n == 0) return 0.0;
  double hi = partials_[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials_[--n];
    hi = x + y;
    lo = y - (hi - x);
    if (lo != 0.0) break;
  }
  if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

}  // namespace pbrs
