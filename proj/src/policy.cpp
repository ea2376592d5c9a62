#include "pbrs/policy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "pbrs/error.hpp"
#include "pbrs/q_table.hpp"

namespace pbrs {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double parse_number(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size())
    throw ConfigError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  return value;
}

void check_params(const PolicyKind& policy) {
  if (const auto* e = std::get_if<EpsilonGreedy>(&policy))
    require(e->epsilon >= 0.0 && e->epsilon <= 1.0, "epsilon-greedy: epsilon must lie in [0, 1]");
  if (const auto* b = std::get_if<Boltzmann>(&policy))
    require(b->temperature > 0.0 && std::isfinite(b->temperature),
            "Boltzmann: temperature must be positive and finite");
}

}  // namespace

PolicyKind parse_policy(std::string_view text) {
  PolicyKind policy;
  if (text == "greedy") {
    policy = Greedy{};
  } else if (text == "threshold") {
    policy = Threshold{};
  } else if (text.starts_with("epsilon:")) {
    policy = EpsilonGreedy{parse_number(text.substr(8), "epsilon")};
  } else if (text.starts_with("boltzmann:")) {
    policy = Boltzmann{parse_number(text.substr(10), "temperature")};
  } else {
    throw ConfigError("unknown policy '" + std::string(text) + "'");
  }
  try {
    check_params(policy);
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  return policy;
}

std::string to_string(const PolicyKind& policy) {
  return std::visit(overloaded{
                        [](Greedy) { return std::string("greedy"); },
                        [](EpsilonGreedy e) { return "epsilon:" + std::to_string(e.epsilon); },
                        [](Boltzmann b) { return "boltzmann:" + std::to_string(b.temperature); },
                        [](Threshold) { return std::string("threshold"); },
                    },
                    policy);
}

bool is_advantage_based(const PolicyKind& policy) { return !std::holds_alternative<Threshold>(policy); }

ActionDistribution action_distribution(const PolicyKind& policy, std::span<const double> q_row) {
  require(!q_row.empty(), "action_distribution: empty Q row");
  for (double q : q_row) require(std::isfinite(q), "action_distribution: non-finite Q value");
  check_params(policy);

  const std::size_t n = q_row.size();
  const double uniform = 1.0 / static_cast<double>(n);
  ActionDistribution dist{std::vector<double>(n, 0.0)};

  std::visit(overloaded{
                 [&](Greedy) { dist.probs[argmax_lowest(q_row)] = 1.0; },
                 [&](EpsilonGreedy e) {
                   std::fill(dist.probs.begin(), dist.probs.end(), e.epsilon * uniform);
                   dist.probs[argmax_lowest(q_row)] += 1.0 - e.epsilon;
                 },
                 [&](Boltzmann b) {
                   const double top = *std::max_element(q_row.begin(), q_row.end());
                   double total = 0.0;
                   for (std::size_t a = 0; a < n; ++a) {
                     dist.probs[a] = std::exp((q_row[a] - top) / b.temperature);
                     total += dist.probs[a];
                   }
                   for (double& p : dist.probs) p /= total;
                 },
                 [&](Threshold) {
                   if (q_row[0] > 0.0) {
                     dist.probs[0] = 1.0;
                   } else {
                     std::fill(dist.probs.begin(), dist.probs.end(), uniform);
                   }
                 },
             },
             policy);
  return dist;
}

ActionId sample_from(const ActionDistribution& dist, double u) {
  require(!dist.probs.empty(), "sample_from: empty distribution");
  double cumulative = 0.0;
  ActionId last_supported = 0;
  for (ActionId a = 0; a < dist.probs.size(); ++a) {
    if (dist.probs[a] <= 0.0) continue;
    last_supported = a;
    cumulative += dist.probs[a];
    if (u < cumulative) return a;
  }
  return last_supported;
}

double cdf_margin(const ActionDistribution& dist, double u) {
  double margin = std::numeric_limits<double>::infinity();
  double cumulative = 0.0;
  for (std::size_t a = 0; a + 1 < dist.probs.size(); ++a) {
    cumulative += dist.probs[a];
    if (cumulative <= 0.0 || cumulative >= 1.0) continue;
    margin = std::min(margin, std::abs(u - cumulative));
  }
  return margin;
}

ActionId sample_action(const PolicyKind& policy, std::span<const double> q_row, Rng& rng) {
  return sample_from(action_distribution(policy, q_row), rng.uniform());
}

double total_variation(const ActionDistribution& p, const ActionDistribution& q) {
  require(p.probs.size() == q.probs.size(), "total_variation: size mismatch");
  double total = 0.0;
  for (std::size_t a = 0; a < p.probs.size(); ++a) total += std::abs(p.probs[a] - q.probs[a]);
  return 0.5 * total;
}

}  // namespace pbrs
