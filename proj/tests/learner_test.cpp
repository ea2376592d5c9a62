#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pbrs/equivalence.hpp"
#include "pbrs/error.hpp"
#include "pbrs/learner.hpp"
#include "pbrs/value_iteration.hpp"

namespace pbrs {
namespace {

LearnerConfig q_config(double alpha, double gamma, double lambda = 0.0) {
  LearnerConfig c;
  c.alpha = alpha;
  c.gamma = gamma;
  c.lambda = lambda;
  return c;
}

TEST(TdError, UnshapedZeroTable) {
  const Learner learner(q_config(0.5, 0.9), QTable(2, 2));
  EXPECT_EQ(learner.td_error({0, 1, 1.0, 1, false}), 1.0);
}

TEST(TdError, ShapedZeroTable) {
  LearnerConfig c = q_config(0.5, 0.9);
  c.shaping = Potential(std::vector<double>{1.0, 2.0});
  const Learner learner(c, QTable(2, 2));
  // 1 + (0.9 * 2 - 1) + 0 - 0
  EXPECT_NEAR(learner.td_error({0, 1, 1.0, 1, false}), 1.8, 1e-15);
}

TEST(TdError, VanishesAtTheOptimalFixedPoint) {
  const Mdp grid = make_gridworld(4, 3, {3, 2}, -1.0, 2.0, 0.0, 0.9);
  const QTable q_star = value_iteration(grid, 1e-13);
  for (Algorithm algorithm : {Algorithm::q_learning, Algorithm::sarsa}) {
    LearnerConfig c = q_config(0.5, 0.9);
    c.algorithm = algorithm;
    const Learner learner(c, q_star);
    Rng rng(0);
    for (StateId s = 0; s < grid.n_states(); ++s) {
      if (grid.is_terminal(s)) continue;
      for (ActionId a = 0; a < grid.n_actions(); ++a) {
        const Experience e = step(grid, s, a, rng);
        std::optional<ActionId> next;
        if (algorithm == Algorithm::sarsa && !e.s_next_terminal) next = argmax_lowest(q_star.row(e.s_next));
        EXPECT_NEAR(learner.td_error(e, next), 0.0, 1e-11);
      }
    }
  }
}

TEST(TdError, NextActionContract) {
  LearnerConfig sarsa = q_config(0.5, 0.9);
  sarsa.algorithm = Algorithm::sarsa;
  const Learner s_learner(sarsa, QTable(2, 2));
  EXPECT_THROW(s_learner.td_error({0, 0, 1.0, 1, false}), ContractViolation);
  EXPECT_NO_THROW(s_learner.td_error({0, 0, 1.0, 1, true}));
  EXPECT_THROW(s_learner.td_error({0, 0, 1.0, 1, true}, ActionId{0}), ContractViolation);

  const Learner q_learner(q_config(0.5, 0.9), QTable(2, 2));
  EXPECT_THROW(q_learner.td_error({0, 0, 1.0, 1, false}, ActionId{1}), ContractViolation);
  EXPECT_THROW(q_learner.td_error({0, 5, 1.0, 1, false}), ContractViolation);
}

TEST(TdError, SarsaBootstrapsOnTheGivenAction) {
  LearnerConfig c = q_config(1.0, 0.5);
  c.algorithm = Algorithm::sarsa;
  QTable q0(2, 2);
  q0(1, 0) = 4.0;
  q0(1, 1) = 10.0;
  const Learner learner(c, q0);
  EXPECT_EQ(learner.td_error({0, 0, 0.0, 1, false}, ActionId{0}), 2.0);
  EXPECT_EQ(learner.td_error({0, 0, 0.0, 1, false}, ActionId{1}), 5.0);
}

TEST(ApplyUpdate, ScalesByAlphaAndTracksDelta) {
  LearnerConfig c = q_config(0.5, 0.9);
  c.shaping = Potential(std::vector<double>{1.0, 2.0});
  Learner learner(c, QTable(2, 2));
  for (double v : learner.delta_table().values()) EXPECT_EQ(v, 0.0);

  const double delta = learner.apply_update({0, 1, 1.0, 1, false});
  EXPECT_NEAR(delta, 1.8, 1e-15);
  EXPECT_NEAR(learner.value(0, 1), 0.9, 1e-15);
  const QTable d = learner.delta_table();
  EXPECT_NEAR(d(0, 1), 0.9, 1e-15);
  EXPECT_EQ(d(0, 0) + d(1, 0) + d(1, 1), 0.0);
}

TEST(ApplyUpdate, OneStepChainLearnsGoalReward) {
  const Mdp grid = make_gridworld(2, 1, {1, 0}, -1.0, 5.0, 0.0, 1.0);
  Learner learner(q_config(1.0, 1.0), QTable::for_mdp(grid));
  Rng rng(0);
  const Experience e = step(grid, 0, static_cast<ActionId>(Move::right), rng);
  ASSERT_TRUE(e.s_next_terminal);
  learner.apply_update(e);
  EXPECT_EQ(learner.value(0, static_cast<ActionId>(Move::right)), 5.0);
}

TEST(ApplyUpdate, ShiftedLearnerStartsWithZeroDelta) {
  const QTable q0(3, 2, 1.0);
  const Potential phi(std::vector<double>{1.0, -2.0, 0.0});
  const Learner learner(q_config(0.3, 0.9), shift_initialization(q0, phi));
  for (double v : learner.delta_table().values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(learner.value(1, 1), -1.0);
}

// Hand-unrolled recursion for lambda = gamma = 1 accumulating traces: each
// visited pair receives alpha times every TD error from its visit onward.
TEST(Traces, FullTraceCreditsAllLaterErrors) {
  // Chain 0 -> 1 -> 2 -> 3 (terminal), one action, rewards 1, -2, 4.
  std::vector<std::vector<Outcome>> outcomes{
      {{1, 1.0, 1.0}}, {{2, 1.0, -2.0}}, {{3, 1.0, 4.0}}, {{3, 1.0, 0.0}}};
  const Mdp chain(4, 1, outcomes, {false, false, false, true}, 1.0);
  QTable q0(4, 1);
  q0(0, 0) = 0.5;
  q0(1, 0) = -1.25;
  q0(2, 0) = 3.0;

  LearnerConfig c = q_config(0.5, 1.0, 1.0);
  Learner learner(c, q0);

  std::vector<double> q{0.5, -1.25, 3.0, 0.0};
  const std::vector<double> rewards{1.0, -2.0, 4.0};
  Rng rng(0);
  StateId s = 0;
  for (int t = 0; t < 3; ++t) {
    const Experience e = step(chain, s, 0, rng);
    const double bootstrap = e.s_next_terminal ? 0.0 : q[e.s_next];
    const double expected_delta = rewards[t] + bootstrap - q[s];
    for (int k = 0; k <= t; ++k) q[k] += 0.5 * expected_delta;
    EXPECT_NEAR(learner.apply_update(e), expected_delta, 1e-14);
    s = e.s_next;
  }
  for (StateId k = 0; k < 3; ++k) EXPECT_NEAR(learner.value(k, 0), q[k], 1e-14);
  for (double e : learner.traces().values()) EXPECT_EQ(e, 0.0);  // reset at the terminal step
}

TEST(Traces, AccumulatingVersusReplacingOnRevisit) {
  for (TraceKind kind : {TraceKind::accumulating, TraceKind::replacing}) {
    LearnerConfig c = q_config(0.1, 1.0, 1.0);
    c.trace_kind = kind;
    Learner learner(c, QTable(2, 1));
    learner.apply_update({0, 0, 0.0, 0, false});
    learner.apply_update({0, 0, 0.0, 0, false});
    EXPECT_EQ(learner.traces()(0, 0), kind == TraceKind::accumulating ? 2.0 : 1.0);
  }
}

TEST(Traces, DecayByGammaLambda) {
  Learner learner(q_config(0.1, 0.9, 0.5), QTable(3, 2));
  learner.apply_update({0, 1, 0.0, 1, false});
  EXPECT_DOUBLE_EQ(learner.traces()(0, 1), 0.45);
  learner.apply_update({1, 0, 0.0, 2, false});
  EXPECT_DOUBLE_EQ(learner.traces()(0, 1), 0.45 * 0.45);
  EXPECT_DOUBLE_EQ(learner.traces()(1, 0), 0.45);
}

TEST(Traces, WatkinsCutAfterExploratoryAction) {
  QTable q0(2, 2);
  q0(0, 0) = 1.0;  // action 0 is greedy in state 0
  for (bool cut : {false, true}) {
    LearnerConfig c = q_config(0.1, 1.0, 1.0);
    c.watkins_cut = cut;
    Learner learner(c, q0);
    learner.apply_update({1, 0, 0.0, 0, false});  // greedy (tie) in state 1
    EXPECT_EQ(learner.traces()(1, 0), 1.0);
    learner.apply_update({0, 1, 0.0, 1, false});  // exploratory in state 0
    EXPECT_EQ(learner.traces()(1, 0), cut ? 0.0 : 1.0);
    EXPECT_EQ(learner.traces()(0, 1), 1.0);
  }
}

TEST(Learner, BookkeepingIdentityHoldsExactly) {
  const Mdp mdp = make_random_mdp(8, 3, 3, 4, 0.9);
  Rng rng(8);
  QTable q0 = QTable::for_mdp(mdp);
  for (double& v : q0.values()) v = rng.uniform(-3.0, 3.0);
  Learner learner(q_config(0.7, 0.9, 0.8), q0);
  const ExperienceScript script = make_random_script(mdp, 500, 3);
  for (const ScriptStep& st : script.steps) {
    learner.apply_update(st.experience);
    const QTable q = learner.q_table();
    const auto d = learner.delta_table().values();
    const auto init = learner.q0().values();
    const auto v = q.values();
    for (std::size_t i = 0; i < v.size(); ++i) ASSERT_EQ(d[i] + init[i], v[i]);
  }
}

TEST(Learner, StaysFiniteWithoutTraces) {
  for (double alpha : {0.1, 1.0}) {
    for (Algorithm algorithm : {Algorithm::q_learning, Algorithm::sarsa}) {
      const Mdp mdp = make_random_mdp(20, 4, 3, 77, 0.9);
      LearnerConfig c = q_config(alpha, 0.9);
      c.algorithm = algorithm;
      c.shaping = Potential(std::vector<double>(20, 0.0));
      Learner learner(c, QTable::for_mdp(mdp, 50.0));
      const ExperienceScript script = make_random_script(mdp, 100'000, 5);
      for (const ScriptStep& st : script.steps)
        learner.apply_update(st.experience, algorithm == Algorithm::sarsa ? st.next_action : std::nullopt);
      for (double v : learner.q_table().values()) {
        ASSERT_TRUE(std::isfinite(v));
        EXPECT_LE(std::abs(v), 50.0 + 1.0 / (1.0 - 0.9));
      }
    }
  }
}

TEST(Learner, StructuredInitMatchesShiftedTable) {
  const QTable base(3, 2, 0.25);
  const Potential phi(std::vector<double>{1.5, -4.0, 0.0});
  LearnerConfig c = q_config(0.2, 0.9);
  c.exact_mode = true;
  const Learner structured(c, base, phi);
  EXPECT_EQ(structured.q0(), shift_initialization(base, phi));
}

TEST(Learner, AdvantageRowDropsTheOffsetInExactMode) {
  const QTable base(2, 3, 0.0);
  const Potential phi(std::vector<double>{28.0, 0.0});
  LearnerConfig c = q_config(0.1, 1.0);
  c.exact_mode = true;
  Learner learner(c, base, phi);
  // Self-loops at gamma 1 keep the offset out of the TD error; the two
  // updates differ by less than an ulp of 28.
  learner.apply_update({0, 0, 1e-15, 0, false});
  learner.apply_update({0, 1, 2e-15, 0, false});
  std::vector<double> full(3), advantage(3);
  learner.q_row(0, full);
  learner.advantage_row(0, advantage);
  EXPECT_EQ(full[0], full[1]);  // rounding made a tie
  EXPECT_LT(advantage[0], advantage[1]);
  EXPECT_EQ(argmax_lowest(advantage), 1u);

  c.exact_mode = false;
  const Learner plain(c, shift_initialization(base, phi));
  plain.advantage_row(0, advantage);
  plain.q_row(0, full);
  EXPECT_EQ(advantage, full);
}

TEST(LearnerConfig, Validation) {
  EXPECT_THROW(Learner(q_config(0.0, 0.9), QTable(1, 1)), ContractViolation);
  EXPECT_THROW(Learner(q_config(1.5, 0.9), QTable(1, 1)), ContractViolation);
  EXPECT_THROW(Learner(q_config(0.5, 0.9, 1.5), QTable(1, 1)), ContractViolation);
  LearnerConfig c = q_config(0.5, 0.9);
  c.shaping = Potential::zero(3);
  EXPECT_THROW(Learner(c, QTable(2, 2)), ContractViolation);
  EXPECT_EQ(parse_algorithm("sarsa"), Algorithm::sarsa);
  EXPECT_THROW(parse_trace_kind("dutch"), ConfigError);
}

}  // namespace
}  // namespace pbrs
