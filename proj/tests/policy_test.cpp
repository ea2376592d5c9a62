#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pbrs/error.hpp"
#include "pbrs/policy.hpp"

namespace pbrs {
namespace {

std::vector<double> probs(const PolicyKind& p, std::vector<double> row) { return action_distribution(p, row).probs; }

TEST(ActionDistribution, Greedy) {
  EXPECT_EQ(probs(Greedy{}, {0, 5, 3}), (std::vector<double>{0, 1, 0}));
  EXPECT_EQ(probs(Greedy{}, {2, 7, 7}), (std::vector<double>{0, 1, 0}));  // lowest index wins ties
}

TEST(ActionDistribution, EpsilonGreedy) {
  const auto p = probs(EpsilonGreedy{0.3}, {1, 2});
  EXPECT_NEAR(p[0], 0.15, 1e-15);
  EXPECT_NEAR(p[1], 0.85, 1e-15);
  EXPECT_EQ(probs(EpsilonGreedy{1.0}, {9, 1, 4}), (std::vector<double>(3, 1.0 / 3.0)));
}

TEST(ActionDistribution, Boltzmann) {
  for (double p : probs(Boltzmann{1.0}, {0, 0, 0})) EXPECT_NEAR(p, 1.0 / 3.0, 1e-15);
  for (double c : {-50.0, 0.0, 3.7, 1e3}) {
    const auto p = probs(Boltzmann{1.0}, {c, c + std::log(2.0)});
    EXPECT_NEAR(p[0], 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(p[1], 2.0 / 3.0, 1e-12);
  }
  // Max subtraction keeps huge values finite.
  const auto big = probs(Boltzmann{0.01}, {1e6, 1e6 + 1});
  EXPECT_TRUE(std::isfinite(big[0]));
  EXPECT_NEAR(big[1], 1.0, 1e-12);
}

TEST(ActionDistribution, RejectsBadRows) {
  EXPECT_THROW(action_distribution(Greedy{}, std::vector<double>{}), ContractViolation);
  EXPECT_THROW(action_distribution(Greedy{}, std::vector<double>{1.0, NAN}), ContractViolation);
  EXPECT_THROW(action_distribution(Boltzmann{1.0}, std::vector<double>{INFINITY}), ContractViolation);
  EXPECT_THROW(action_distribution(Boltzmann{0.0}, std::vector<double>{1.0}), ContractViolation);
  EXPECT_THROW(action_distribution(EpsilonGreedy{1.5}, std::vector<double>{1.0}), ContractViolation);
}

TEST(ParsePolicy, ConfigStrings) {
  EXPECT_TRUE(std::holds_alternative<Greedy>(parse_policy("greedy")));
  EXPECT_EQ(std::get<EpsilonGreedy>(parse_policy("epsilon:0.1")).epsilon, 0.1);
  EXPECT_EQ(std::get<Boltzmann>(parse_policy("boltzmann:2.5")).temperature, 2.5);
  EXPECT_FALSE(is_advantage_based(parse_policy("threshold")));
  EXPECT_THROW(parse_policy("softmax:1"), ConfigError);
  EXPECT_THROW(parse_policy("epsilon:"), ConfigError);
  EXPECT_THROW(parse_policy("epsilon:2"), ConfigError);
  EXPECT_THROW(parse_policy("boltzmann:-1"), ConfigError);
}

TEST(SampleAction, ConsumesExactlyOneDraw) {
  for (const PolicyKind& p : {PolicyKind{Greedy{}}, PolicyKind{EpsilonGreedy{0.2}}, PolicyKind{Boltzmann{0.5}}}) {
    Rng rng(3), reference(3);
    const std::vector<double> row{0.1, 0.4, -2.0};
    sample_action(p, row, rng);
    reference.uniform();
    EXPECT_EQ(rng.next_u64(), reference.next_u64());
  }
}

TEST(SampleAction, DeterministicPerSeed) {
  const std::vector<double> row{0.3, 0.2, 0.31, -1};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng a(seed), b(seed);
    EXPECT_EQ(sample_action(Boltzmann{0.1}, row, a), sample_action(Boltzmann{0.1}, row, b));
    Rng g(seed);
    EXPECT_EQ(sample_action(Greedy{}, row, g), 2u);
  }
}

TEST(SampleAction, FullyRandomEpsilonIsUniform) {
  Rng rng(2718);
  const std::vector<double> row{5.0, -5.0};
  int zeros = 0;
  const int n = 10'000;
  for (int i = 0; i < n; ++i) zeros += sample_action(EpsilonGreedy{1.0}, row, rng) == 0;
  EXPECT_NEAR(zeros / static_cast<double>(n), 0.5, 0.02);
}

TEST(SampleFrom, InverseCdf) {
  const ActionDistribution d{{0.2, 0.0, 0.5, 0.3}};
  EXPECT_EQ(sample_from(d, 0.0), 0u);
  EXPECT_EQ(sample_from(d, 0.19), 0u);
  EXPECT_EQ(sample_from(d, 0.2), 2u);
  EXPECT_EQ(sample_from(d, 0.75), 3u);
  EXPECT_EQ(sample_from(d, 0.9999999999999999), 3u);
  EXPECT_NEAR(cdf_margin(d, 0.25), 0.05, 1e-15);
}

TEST(ShiftInvariance, AdvantageBasedPoliciesIgnoreConstants) {
  Rng rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(8);
    std::vector<double> row(n), shifted(n);
    const double c = rng.uniform(-100.0, 100.0);
    for (std::size_t a = 0; a < n; ++a) {
      row[a] = rng.uniform(-10.0, 10.0);
      shifted[a] = row[a] + c;
    }
    EXPECT_EQ(probs(Greedy{}, row), probs(Greedy{}, shifted));
    EXPECT_EQ(probs(EpsilonGreedy{0.25}, row), probs(EpsilonGreedy{0.25}, shifted));
    const auto p = action_distribution(Boltzmann{1.0}, row);
    const auto q = action_distribution(Boltzmann{1.0}, shifted);
    EXPECT_LE(total_variation(p, q), 1e-12);
    double total = 0.0;
    for (double x : p.probs) total += x;
    EXPECT_NEAR(total, 1.0, 1e-12);

    // Coupled draws select the same action unless u sits on a breakpoint.
    const double u = rng.uniform();
    if (cdf_margin(p, u) > 1e-12) {
      EXPECT_EQ(sample_from(p, u), sample_from(q, u));
    }
  }
}

TEST(ShiftInvariance, ThresholdPolicyIsNotAdvantageBased) {
  const std::vector<double> row{-1.0, 0.5};
  const std::vector<double> shifted{9.0, 10.5};
  EXPECT_GT(total_variation(action_distribution(Threshold{}, row), action_distribution(Threshold{}, shifted)), 0.4);
}

}  // namespace
}  // namespace pbrs
