#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pbrs/mdp.hpp"
#include "pbrs/rng.hpp"

namespace pbrs {

struct Greedy {};
struct EpsilonGreedy {
  double epsilon;
};
struct Boltzmann {
  double temperature;
};
/// Action 0 iff q_row[0] > 0, otherwise uniform. Depends on absolute
/// Q-values, so it is NOT advantage-based; kept as a counterexample.
struct Threshold {};

using PolicyKind = std::variant<Greedy, EpsilonGreedy, Boltzmann, Threshold>;

/// Parses "greedy", "epsilon:<val>", "boltzmann:<val>" (and "threshold").
PolicyKind parse_policy(std::string_view text);
std::string to_string(const PolicyKind& policy);
bool is_advantage_based(const PolicyKind& policy);

struct ActionDistribution {
  std::vector<double> probs;
};

/// Distribution over actions given the Q-values of one state.
/// Throws ContractViolation for empty or non-finite rows.
ActionDistribution action_distribution(const PolicyKind& policy, std::span<const double> q_row);

/// Inverse-CDF selection with u in [0, 1).
ActionId sample_from(const ActionDistribution& dist, double u);

/// Distance from u to the nearest interior CDF breakpoint of `dist`.
double cdf_margin(const ActionDistribution& dist, double u);

/// Consumes exactly one uniform draw.
ActionId sample_action(const PolicyKind& policy, std::span<const double> q_row, Rng& rng);

double total_variation(const ActionDistribution& p, const ActionDistribution& q);

}  // namespace pbrs
