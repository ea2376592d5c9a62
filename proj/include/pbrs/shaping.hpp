#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pbrs/mdp.hpp"
#include "pbrs/q_table.hpp"

namespace pbrs {

/// State potential Phi used for potential-based shaping.
///
/// Construct through for_mdp() whenever an MDP is at hand: it enforces
/// Phi(terminal) = 0, which update equivalence between shaping and
/// initialization depends on once terminal bootstraps are dropped. The
/// plain constructor only checks finiteness and exists for callers that
/// deliberately break that convention.
class Potential {
 public:
  Potential() = default;
  explicit Potential(std::vector<double> values);

  static Potential for_mdp(const Mdp& mdp, std::vector<double> values);
  static Potential zero(std::size_t n_states) { return Potential(std::vector<double>(n_states, 0.0)); }

  double operator()(StateId s) const { return values_[s]; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }

  bool operator==(const Potential&) const = default;

 private:
  std::vector<double> values_;
};

/// F(s, s') = gamma * Phi(s') - Phi(s).
inline double shaping_reward(const Potential& phi, double gamma, StateId s, StateId s_next) {
  return gamma * phi(s_next) - phi(s);
}

/// Q0'(s, a) = Q0(s, a) + Phi(s). Throws ContractViolation on size mismatch.
QTable shift_initialization(const QTable& q0, const Potential& phi);

/// sum_{t<T} gamma^t F(s_t, s_{t+1}) over a trajectory of T+1 states.
///
/// Terms are accumulated with exact (error-free) summation, so the result
/// is the correctly rounded value of the sum of the rounded terms. At
/// gamma = 1 every term is exact and cycles (s_0 == s_T) give exactly 0.
double discounted_shaping_sum(const Potential& phi, double gamma,
                              std::span<const StateId> trajectory);

/// Arbitrary (not necessarily potential-based) shaping reward table F(s, s').
class ShapingTable {
 public:
  ShapingTable(std::size_t n_states, std::vector<double> values);

  /// The potential-based table of `phi` plus a perturbation.
  static ShapingTable from_potential(const Potential& phi, double gamma,
                                     std::span<const double> perturbation = {});

  double operator()(StateId s, StateId s_next) const { return values_[s * n_states_ + s_next]; }
  std::size_t n_states() const { return n_states_; }

  /// Sum of F around the closed state sequence `cycle` (first == last).
  double cycle_sum(std::span<const StateId> cycle) const;

 private:
  std::size_t n_states_;
  std::vector<double> values_;
};

/// Shewchuk-style exact accumulator: keeps a list of non-overlapping
/// partials and rounds once on read.
class ExactSum {
 public:
  void add(double x);
  double value() const;

 private:
  std::vector<double> partials_;
};

}  // namespace pbrs
