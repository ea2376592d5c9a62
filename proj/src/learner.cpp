#include "pbrs/learner.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pbrs/error.hpp"

namespace pbrs {

std::string_view to_string(Algorithm algorithm) {
  return algorithm == Algorithm::q_learning ? "q_learning" : "sarsa";
}

std::string_view to_string(TraceKind kind) {
  return kind == TraceKind::accumulating ? "accumulating" : "replacing";
}

Algorithm parse_algorithm(std::string_view text) {
  if (text == "q_learning") return Algorithm::q_learning;
  if (text == "sarsa") return Algorithm::sarsa;
  throw ConfigError("unknown algorithm '" + std::string(text) + "'");
}

TraceKind parse_trace_kind(std::string_view text) {
  if (text == "accumulating") return TraceKind::accumulating;
  if (text == "replacing") return TraceKind::replacing;
  throw ConfigError("unknown trace kind '" + std::string(text) + "'");
}

void LearnerConfig::validate() const {
  require(alpha > 0.0 && alpha <= 1.0, "LearnerConfig: alpha must lie in (0, 1]");
  require(gamma >= 0.0 && gamma <= 1.0, "LearnerConfig: gamma must lie in [0, 1]");
  require(lambda >= 0.0 && lambda <= 1.0, "LearnerConfig: lambda must lie in [0, 1]");
}

Learner::Learner(LearnerConfig config, QTable q0)
    : Learner(std::move(config), std::move(q0), Potential()) {}

Learner::Learner(LearnerConfig config, QTable base, Potential offset)
    : config_(std::move(config)), base_(std::move(base)) {
  config_.validate();
  const std::size_t n = base_.n_states();
  require(n >= 1 && base_.n_actions() >= 1, "Learner: empty Q-table");
  if (offset.size() == 0) {
    offset_.assign(n, 0.0);
  } else {
    require(offset.size() == n, "Learner: offset and table disagree on state count");
    offset_.assign(offset.values().begin(), offset.values().end());
  }
  if (config_.shaping)
    require(config_.shaping->size() == n, "Learner: shaping potential and table disagree on state count");
  if (config_.arbitrary_shaping)
    require(config_.arbitrary_shaping->n_states() == n, "Learner: shaping table and Q-table disagree on state count");

  q0_ = base_;
  for (StateId s = 0; s < n; ++s)
    for (double& v : q0_.row(s)) v += offset_[s];
  delta_ = QTable(n, base_.n_actions(), 0.0);
  traces_ = QTable(n, base_.n_actions(), 0.0);
}

std::vector<double> Learner::q_row(StateId s) const {
  std::vector<double> out(q0_.n_actions());
  q_row(s, out);
  return out;
}

void Learner::q_row(StateId s, std::span<double> out) const {
  const auto init = q0_.row(s);
  const auto change = delta_.row(s);
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = init[a] + change[a];
}

void Learner::advantage_row(StateId s, std::span<double> out) const {
  if (!config_.exact_mode) return q_row(s, out);
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = canonical_value(s, a);
}

QTable Learner::q_table() const {
  QTable q = q0_;
  auto v = q.values();
  const auto d = delta_.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += d[i];
  return q;
}

bool Learner::is_greedy(StateId s, ActionId a) const {
  const std::size_t n_actions = q0_.n_actions();
  const double mine = config_.exact_mode ? canonical_value(s, a) : value(s, a);
  for (ActionId b = 0; b < n_actions; ++b) {
    const double other = config_.exact_mode ? canonical_value(s, b) : value(s, b);
    if (other > mine) return false;
  }
  return true;
}

void Learner::check_experience(const Experience& exp, std::optional<ActionId> next_action) const {
  const std::size_t n_states = q0_.n_states();
  const std::size_t n_actions = q0_.n_actions();
  require(exp.s < n_states && exp.s_next < n_states && exp.a < n_actions,
          "Learner: experience indices out of range");
  const bool needs_next = config_.algorithm == Algorithm::sarsa && !exp.s_next_terminal;
  if (needs_next) {
    require(next_action.has_value(), "Learner: Sarsa needs the next action for a non-terminal successor");
    require(*next_action < n_actions, "Learner: next action out of range");
  } else {
    require(!next_action.has_value(), "Learner: next action given where none is used");
  }
}

double Learner::bootstrap(const Experience& exp, std::optional<ActionId> next_action) const {
  if (exp.s_next_terminal) return 0.0;
  const StateId s = exp.s_next;
  auto read = [&](ActionId a) { return config_.exact_mode ? canonical_value(s, a) : value(s, a); };
  if (config_.algorithm == Algorithm::sarsa) return read(*next_action);
  double best = read(0);
  for (ActionId a = 1; a < q0_.n_actions(); ++a) best = std::max(best, read(a));
  return best;
}

double Learner::td_error(const Experience& exp, std::optional<ActionId> next_action) const {
  check_experience(exp, next_action);
  const double gamma = config_.gamma;
  double r = exp.r;
  if (config_.arbitrary_shaping) r += (*config_.arbitrary_shaping)(exp.s, exp.s_next);
  const double b = bootstrap(exp, next_action);

  if (config_.exact_mode) {
    const double shape_s = config_.shaping ? (*config_.shaping)(exp.s) : 0.0;
    const double shape_next = config_.shaping ? (*config_.shaping)(exp.s_next) : 0.0;
    const double p_s = shape_s + offset_[exp.s];
    // The initial offset of s' only enters through the bootstrap.
    const double p_next = shape_next + (exp.s_next_terminal ? 0.0 : offset_[exp.s_next]);
    return (r + (gamma * p_next - p_s)) + gamma * b - canonical_value(exp.s, exp.a);
  }

  const double f = config_.shaping ? shaping_reward(*config_.shaping, gamma, exp.s, exp.s_next) : 0.0;
  return ((r + f) + gamma * b) - value(exp.s, exp.a);
}

double Learner::apply_update(const Experience& exp, std::optional<ActionId> next_action) {
  const double delta = td_error(exp, next_action);
  const double step = config_.alpha * delta;

  if (config_.lambda == 0.0) {
    delta_(exp.s, exp.a) += step;
    return delta;
  }

  if (config_.watkins_cut && config_.algorithm == Algorithm::q_learning && !is_greedy(exp.s, exp.a))
    std::fill(traces_.values().begin(), traces_.values().end(), 0.0);

  double& e = traces_(exp.s, exp.a);
  e = config_.trace_kind == TraceKind::accumulating ? e + 1.0 : 1.0;

  auto d = delta_.values();
  auto tr = traces_.values();
  const double decay = config_.gamma * config_.lambda;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (tr[i] == 0.0) continue;
    d[i] += step * tr[i];
    tr[i] *= decay;
  }
  if (exp.s_next_terminal) std::fill(tr.begin(), tr.end(), 0.0);
  return delta;
}

}  // namespace pbrs
