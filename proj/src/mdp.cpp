#include "pbrs/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pbrs/error.hpp"

namespace pbrs {

Mdp::Mdp(std::size_t n_states, std::size_t n_actions,
         std::vector<std::vector<Outcome>> outcomes, std::vector<bool> terminal,
         double gamma, StateId start_state)
    : n_states_(n_states),
      n_actions_(n_actions),
      outcomes_(std::move(outcomes)),
      terminal_(std::move(terminal)),
      gamma_(gamma),
      start_(start_state) {
  require(n_states_ >= 1 && n_actions_ >= 1, "Mdp: need at least one state and one action");
  require(outcomes_.size() == n_states_ * n_actions_, "Mdp: outcome table has wrong size");
  require(terminal_.size() == n_states_, "Mdp: terminal mask has wrong size");
  require(gamma_ >= 0.0 && gamma_ <= 1.0, "Mdp: gamma must lie in [0, 1]");
  require(start_ < n_states_, "Mdp: start state out of range");

  for (StateId s = 0; s < n_states_; ++s) {
    for (ActionId a = 0; a < n_actions_; ++a) {
      const auto& row = outcomes_[s * n_actions_ + a];
      const std::string where = " at (" + std::to_string(s) + ", " + std::to_string(a) + ")";
      require(!row.empty(), "Mdp: empty transition distribution" + where);
      double total = 0.0;
      for (const Outcome& o : row) {
        require(o.next < n_states_, "Mdp: successor out of range" + where);
        require(std::isfinite(o.prob) && o.prob >= 0.0, "Mdp: invalid probability" + where);
        require(std::isfinite(o.reward), "Mdp: non-finite reward" + where);
        total += o.prob;
      }
      require(std::abs(total - 1.0) <= kNormalizationTolerance,
              "Mdp: transition distribution does not sum to 1" + where);
      if (terminal_[s]) {
        require(row.size() == 1 && row[0].next == s && row[0].prob == 1.0 && row[0].reward == 0.0,
                "Mdp: terminal state must be absorbing with reward 0" + where);
      }
    }
  }
}

bool Mdp::has_nonterminal_state() const {
  return std::find(terminal_.begin(), terminal_.end(), false) != terminal_.end();
}

double Mdp::transition_prob(StateId s, ActionId a, StateId s_next) const {
  double p = 0.0;
  for (const Outcome& o : outcomes(s, a))
    if (o.next == s_next) p += o.prob;
  return p;
}

double Mdp::reward(StateId s, ActionId a, StateId s_next) const {
  for (const Outcome& o : outcomes(s, a))
    if (o.next == s_next) return o.reward;
  return 0.0;
}

double Mdp::max_reward() const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& row : outcomes_)
    for (const Outcome& o : row)
      if (o.prob > 0.0) best = std::max(best, o.reward);
  return best;
}

Experience step_with_draw(const Mdp& mdp, StateId s, ActionId a, double u) {
  require(s < mdp.n_states() && a < mdp.n_actions(), "step: state or action out of range");
  require(!mdp.is_terminal(s), "step: cannot act from a terminal state");
  const auto row = mdp.outcomes(s, a);
  const Outcome* chosen = nullptr;
  double cumulative = 0.0;
  for (const Outcome& o : row) {
    if (o.prob <= 0.0) continue;
    chosen = &o;
    cumulative += o.prob;
    if (u < cumulative) break;
  }
  // u beyond the rounded CDF total falls on the last supported outcome.
  return {s, a, chosen->reward, chosen->next, mdp.is_terminal(chosen->next)};
}

Experience step(const Mdp& mdp, StateId s, ActionId a, Rng& rng) {
  return step_with_draw(mdp, s, a, rng.uniform());
}

namespace {

std::vector<Outcome> absorbing(StateId s) { return {Outcome{s, 1.0, 0.0}}; }

Cell moved(Cell c, Move m, std::size_t width, std::size_t height) {
  switch (m) {
    case Move::up:
      if (c.y + 1 < height) ++c.y;
      break;
    case Move::down:
      if (c.y > 0) --c.y;
      break;
    case Move::left:
      if (c.x > 0) --c.x;
      break;
    case Move::right:
      if (c.x + 1 < width) ++c.x;
      break;
  }
  return c;
}

// Random probabilities over `k` outcomes, each strictly positive.
std::vector<double> random_simplex(std::size_t k, Rng& rng) {
  std::vector<double> w(k);
  for (double& x : w) x = 1.0 - rng.uniform();
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return w;
}

// `k` distinct indices from [0, n) by partial Fisher-Yates.
std::vector<std::size_t> choose_distinct(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.uniform_index(n - i)]);
  pool.resize(k);
  return pool;
}

}  // namespace

Mdp make_gridworld(std::size_t width, std::size_t height, Cell goal, double step_reward,
                   double goal_reward, double slip_prob, double gamma, Cell start) {
  require(width >= 1 && height >= 1, "make_gridworld: width and height must be >= 1");
  if (goal.x >= width || goal.y >= height)
    throw ConfigError("make_gridworld: goal cell lies outside the grid");
  if (start.x >= width || start.y >= height)
    throw ConfigError("make_gridworld: start cell lies outside the grid");
  require(slip_prob >= 0.0 && slip_prob <= 1.0, "make_gridworld: slip_prob must lie in [0, 1]");
  require(std::isfinite(step_reward) && std::isfinite(goal_reward),
          "make_gridworld: rewards must be finite");

  const std::size_t n = width * height;
  const StateId goal_state = grid_state(width, goal);
  if (gamma == 1.0 && n > 1 && !(step_reward < 0.0))
    throw ConfigError("make_gridworld: gamma = 1 requires a negative step_reward");

  std::vector<bool> terminal(n, false);
  terminal[goal_state] = true;

  std::vector<std::vector<Outcome>> outcomes(n * kGridActions);
  for (StateId s = 0; s < n; ++s) {
    for (ActionId a = 0; a < kGridActions; ++a) {
      auto& row = outcomes[s * kGridActions + a];
      if (terminal[s]) {
        row = absorbing(s);
        continue;
      }
      const Cell here = grid_cell(width, s);
      for (ActionId m = 0; m < kGridActions; ++m) {
        double p = slip_prob / static_cast<double>(kGridActions);
        if (m == a) p += 1.0 - slip_prob;
        if (p <= 0.0) continue;
        const StateId next = grid_state(width, moved(here, static_cast<Move>(m), width, height));
        auto it = std::find_if(row.begin(), row.end(), [&](const Outcome& o) { return o.next == next; });
        if (it != row.end()) {
          it->prob += p;
        } else {
          row.push_back({next, p, next == goal_state ? goal_reward : step_reward});
        }
      }
    }
  }
  return Mdp(n, kGridActions, std::move(outcomes), std::move(terminal), gamma,
             grid_state(width, start));
}

Mdp make_random_mdp(std::size_t n_states, std::size_t n_actions, std::size_t branching,
                    std::uint64_t seed, double gamma) {
  require(n_states >= 1 && n_actions >= 1, "make_random_mdp: need at least one state and action");
  require(branching >= 1 && branching <= n_states, "make_random_mdp: branching must lie in [1, n_states]");
  require(gamma >= 0.0 && gamma < 1.0, "make_random_mdp: non-episodic MDP requires gamma < 1");

  Rng rng(seed);
  std::vector<std::vector<Outcome>> outcomes(n_states * n_actions);
  for (auto& row : outcomes) {
    const auto successors = choose_distinct(n_states, branching, rng);
    const auto probs = random_simplex(branching, rng);
    for (std::size_t k = 0; k < branching; ++k)
      row.push_back({successors[k], probs[k], rng.uniform(-1.0, 1.0)});
  }
  return Mdp(n_states, n_actions, std::move(outcomes), std::vector<bool>(n_states, false), gamma);
}

Mdp make_random_episodic_mdp(std::size_t n_states, std::size_t n_actions, std::size_t branching,
                             std::size_t n_terminal, std::uint64_t seed, double gamma) {
  require(n_actions >= 1, "make_random_episodic_mdp: need at least one action");
  require(n_terminal >= 1 && n_terminal < n_states,
          "make_random_episodic_mdp: need at least one terminal and one non-terminal state");
  require(branching >= 1 && branching <= n_states,
          "make_random_episodic_mdp: branching must lie in [1, n_states]");

  const std::size_t first_terminal = n_states - n_terminal;
  std::vector<bool> terminal(n_states, false);
  for (StateId s = first_terminal; s < n_states; ++s) terminal[s] = true;

  Rng rng(seed);
  std::vector<std::vector<Outcome>> outcomes(n_states * n_actions);
  for (StateId s = 0; s < n_states; ++s) {
    for (ActionId a = 0; a < n_actions; ++a) {
      auto& row = outcomes[s * n_actions + a];
      if (terminal[s]) {
        row = absorbing(s);
        continue;
      }
      auto successors = choose_distinct(n_states, branching, rng);
      const bool reaches_terminal = std::any_of(successors.begin(), successors.end(),
                                                [&](StateId x) { return terminal[x]; });
      if (!reaches_terminal) successors.back() = first_terminal + rng.uniform_index(n_terminal);
      const auto probs = random_simplex(branching, rng);
      for (std::size_t k = 0; k < branching; ++k)
        row.push_back({successors[k], probs[k], rng.uniform(-1.0, 1.0)});
    }
  }
  return Mdp(n_states, n_actions, std::move(outcomes), std::move(terminal), gamma);
}

}  // namespace pbrs
