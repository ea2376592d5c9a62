#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pbrs/mdp.hpp"
#include "pbrs/q_table.hpp"
#include "pbrs/shaping.hpp"

namespace pbrs {

enum class Algorithm { q_learning, sarsa };
enum class TraceKind { accumulating, replacing };

std::string_view to_string(Algorithm algorithm);
std::string_view to_string(TraceKind kind);
Algorithm parse_algorithm(std::string_view text);
TraceKind parse_trace_kind(std::string_view text);

struct LearnerConfig {
  Algorithm algorithm = Algorithm::q_learning;
  double alpha = 0.1;
  double gamma = 1.0;
  double lambda = 0.0;  // 0 disables eligibility traces
  TraceKind trace_kind = TraceKind::accumulating;
  bool watkins_cut = false;  // Q-learning with traces only
  std::optional<Potential> shaping;
  // Non-potential shaping F(s, s'); only used to demonstrate what breaks
  // equivalence. Added on top of `shaping` when both are set.
  std::optional<ShapingTable> arbitrary_shaping;
  // Evaluate the TD error in a canonical term order (see Learner).
  bool exact_mode = false;

  void validate() const;
};

/// Tabular TD learner (Q-learning or Sarsa, optional traces and shaping).
///
/// The learner stores the cumulative change dQ separately from the frozen
/// initial table, and reads Q(s, a) as q0(s, a) + dQ(s, a). The initial
/// table may carry a per-state offset (the shifted initialization
/// Q0 + Phi); in normal mode it is folded into q0 at construction.
///
/// In exact mode the TD error is evaluated as
///   (r + (gamma * P(s') - P(s))) + gamma * B - (base(s, a) + dQ(s, a))
/// where P = shaping potential + initial offset and B bootstraps on
/// base + dQ. A shaped learner and its shifted-initialization twin then
/// perform bit-identical arithmetic whenever their dQ tables agree.
class Learner {
 public:
  Learner(LearnerConfig config, QTable q0);
  /// Initial table base(s, a) + offset(s), kept in structured form.
  Learner(LearnerConfig config, QTable base, Potential offset);

  const LearnerConfig& config() const { return config_; }

  /// delta = r + F(s, s') + gamma * B - Q(s, a) with B = 0 at terminal s',
  /// max_a' Q(s', a') for Q-learning and Q(s', next_action) for Sarsa.
  /// next_action must be given iff the learner runs Sarsa and s' is
  /// non-terminal.
  double td_error(const Experience& exp, std::optional<ActionId> next_action = std::nullopt) const;

  /// Applies one TD update (with traces when lambda > 0). Returns delta.
  double apply_update(const Experience& exp, std::optional<ActionId> next_action = std::nullopt);

  /// Q - Q0, elementwise.
  const QTable& delta_table() const { return delta_; }
  /// The initial table, including any offset.
  const QTable& q0() const { return q0_; }
  const QTable& traces() const { return traces_; }

  double value(StateId s, ActionId a) const { return q0_(s, a) + delta_(s, a); }
  std::vector<double> q_row(StateId s) const;
  void q_row(StateId s, std::span<double> out) const;
  // A row with the same within-row differences as q_row(s). In exact mode
  // the per-state initialization offset is left out, so two learners that
  // differ only in that offset see bit-identical rows. Only policies that
  // depend on differences alone may read it.
  void advantage_row(StateId s, std::span<double> out) const;
  QTable q_table() const;

  /// Whether `a` attains the row maximum in state s.
  bool is_greedy(StateId s, ActionId a) const;

 private:
  double canonical_value(StateId s, ActionId a) const { return base_(s, a) + delta_(s, a); }
  double bootstrap(const Experience& exp, std::optional<ActionId> next_action) const;
  void check_experience(const Experience& exp, std::optional<ActionId> next_action) const;

  LearnerConfig config_;
  QTable base_;
  std::vector<double> offset_;
  QTable q0_;
  QTable delta_;
  QTable traces_;
};

}  // namespace pbrs
