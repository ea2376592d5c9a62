#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pbrs/mdp.hpp"

namespace pbrs {

/// Dense row-major (state x action) table of reals.
class QTable {
 public:
  QTable() = default;
  QTable(std::size_t n_states, std::size_t n_actions, double fill = 0.0)
      : n_states_(n_states), n_actions_(n_actions), values_(n_states * n_actions, fill) {}

  static QTable for_mdp(const Mdp& mdp, double fill = 0.0) {
    return QTable(mdp.n_states(), mdp.n_actions(), fill);
  }

  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(StateId s, ActionId a) { return values_[s * n_actions_ + a]; }
  double operator()(StateId s, ActionId a) const { return values_[s * n_actions_ + a]; }

  std::span<double> row(StateId s) { return {values_.data() + s * n_actions_, n_actions_}; }
  std::span<const double> row(StateId s) const { return {values_.data() + s * n_actions_, n_actions_}; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool same_shape(const QTable& other) const {
    return n_states_ == other.n_states_ && n_actions_ == other.n_actions_;
  }

  bool operator==(const QTable&) const = default;

 private:
  std::size_t n_states_ = 0;
  std::size_t n_actions_ = 0;
  std::vector<double> values_;
};

/// max over entries of |a - b|. Shapes must agree.
double max_abs_difference(const QTable& a, const QTable& b);

/// Greedy action of a row: the first index attaining the maximum.
ActionId argmax_lowest(std::span<const double> row);

}  // namespace pbrs
