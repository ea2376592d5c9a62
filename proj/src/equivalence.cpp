#include "pbrs/equivalence.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <iomanip>

#include "pbrs/error.hpp"

namespace pbrs {

namespace {

// Running maximum in which NaN is sticky.
void track_max(double& acc, double value) {
  if (std::isnan(acc)) return;
  if (std::isnan(value) || value > acc) acc = value;
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

bool same_bits(const QTable& a, const QTable& b) {
  return std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(double)) == 0;
}

double max_magnitude(const QTable& q) {
  double worst = 0.0;
  for (double v : q.values()) track_max(worst, std::abs(v));
  return worst;
}

// Folds one lockstep step into the report.
void record_step(LockstepReport& report, const Learner& l, const Learner& lp, double d, double d_prime) {
  track_max(report.max_td_divergence, std::abs(d - d_prime));
  track_max(report.max_delta_divergence, max_abs_difference(l.delta_table(), lp.delta_table()));
  track_max(report.max_delta_magnitude, max_magnitude(l.delta_table()));
  if (!same_bits(d, d_prime)) ++report.td_bit_mismatches;
  if (!same_bits(l.delta_table(), lp.delta_table())) ++report.delta_bit_mismatches;
  ++report.steps_run;
}

void check_learner_fits(const Learner& learner, const Mdp& mdp) {
  require(learner.q0().n_states() == mdp.n_states() && learner.q0().n_actions() == mdp.n_actions(),
          "lockstep: learner table does not match the MDP");
}

void check_step(const ScriptStep& step, const Mdp& mdp, Algorithm algorithm) {
  const Experience& e = step.experience;
  require(e.s < mdp.n_states() && e.s_next < mdp.n_states() && e.a < mdp.n_actions(),
          "lockstep: script step out of the MDP's bounds");
  require(!mdp.is_terminal(e.s), "lockstep: script step starts in a terminal state");
  require(e.s_next_terminal == mdp.is_terminal(e.s_next), "lockstep: script terminal flag disagrees with the MDP");
  if (algorithm == Algorithm::sarsa && !e.s_next_terminal)
    require(step.next_action.has_value() && *step.next_action < mdp.n_actions(),
            "lockstep: Sarsa script step lacks a valid next action");
}

void dump_row(std::ostream* dump, std::size_t t, const Experience& e, double d, double d_prime) {
  if (dump == nullptr) return;
  *dump << t << ',' << e.s << ',' << e.a << ',' << std::setprecision(17) << e.r << ',' << e.s_next << ','
        << d << ',' << d_prime << ',' << std::abs(d - d_prime) << '\n';
}

}  // namespace

void write_lockstep_dump_header(std::ostream& out) {
  out << "step,s,a,r,s_next,delta_L,delta_Lprime,abs_diff\n";
}

ExperienceScript make_random_script(const Mdp& mdp, std::size_t n_steps, std::uint64_t seed) {
  require(mdp.has_nonterminal_state(), "make_random_script: MDP has no non-terminal state");
  std::vector<StateId> starts;
  for (StateId s = 0; s < mdp.n_states(); ++s)
    if (!mdp.is_terminal(s)) starts.push_back(s);

  Rng rng(seed);
  ExperienceScript script;
  script.steps.reserve(n_steps);
  for (std::size_t t = 0; t < n_steps; ++t) {
    const StateId s = starts[rng.uniform_index(starts.size())];
    const ActionId a = rng.uniform_index(mdp.n_actions());
    const Experience e = step(mdp, s, a, rng);
    std::optional<ActionId> next;
    if (!e.s_next_terminal) next = rng.uniform_index(mdp.n_actions());
    script.steps.push_back({e, next});
  }
  return script;
}

std::pair<Learner, Learner> make_learner_pair(const QTable& q0, const Potential& phi,
                                              const LearnerConfig& config) {
  require(!config.shaping.has_value(), "lockstep: config.shaping must be unset; the harness assigns it");
  require(phi.size() == q0.n_states(), "lockstep: potential and table disagree on state count");
  LearnerConfig shaped_config = config;
  shaped_config.shaping = phi;
  Learner shaped(shaped_config, q0);
  if (config.exact_mode) return {std::move(shaped), Learner(config, q0, phi)};
  return {std::move(shaped), Learner(config, shift_initialization(q0, phi))};
}

LockstepReport run_lockstep(Learner shaped, Learner initialized, const Mdp& mdp,
                            const ExperienceScript& script, std::ostream* dump) {
  check_learner_fits(shaped, mdp);
  check_learner_fits(initialized, mdp);
  const Algorithm algorithm = shaped.config().algorithm;
  require(initialized.config().algorithm == algorithm, "lockstep: learners run different algorithms");
  for (const ScriptStep& step : script.steps) check_step(step, mdp, algorithm);

  LockstepReport report;
  for (const ScriptStep& step : script.steps) {
    const Experience& e = step.experience;
    std::optional<ActionId> next;
    if (algorithm == Algorithm::sarsa && !e.s_next_terminal) next = step.next_action;
    const double d = shaped.apply_update(e, next);
    const double d_prime = initialized.apply_update(e, next);
    dump_row(dump, report.steps_run, e, d, d_prime);
    record_step(report, shaped, initialized, d, d_prime);
  }
  return report;
}

LockstepReport run_scripted_lockstep(const Mdp& mdp, const QTable& q0, const Potential& phi,
                                     const LearnerConfig& config, const ExperienceScript& script,
                                     std::ostream* dump) {
  auto [shaped, initialized] = make_learner_pair(q0, phi, config);
  return run_lockstep(std::move(shaped), std::move(initialized), mdp, script, dump);
}

namespace {

// One learner's side of a coupled run.
struct Walker {
  Learner learner;
  StateId s;
  std::optional<ActionId> pending;  // Sarsa's already chosen action
  std::vector<double> row;

  ActionDistribution distribution(const PolicyKind& policy, StateId at) {
    if (is_advantage_based(policy)) learner.advantage_row(at, row);
    else learner.q_row(at, row);
    return action_distribution(policy, row);
  }
};

}  // namespace

LockstepReport run_coupled(Learner shaped, Learner initialized, const Mdp& mdp, const PolicyKind& policy,
                           std::size_t n_steps, std::uint64_t seed, std::ostream* dump) {
  check_learner_fits(shaped, mdp);
  check_learner_fits(initialized, mdp);
  const Algorithm algorithm = shaped.config().algorithm;
  require(initialized.config().algorithm == algorithm, "coupled: learners run different algorithms");
  require(!mdp.is_terminal(mdp.start_state()), "coupled: start state is terminal");

  const std::size_t n_actions = mdp.n_actions();
  Walker l{std::move(shaped), mdp.start_state(), std::nullopt, std::vector<double>(n_actions)};
  Walker lp{std::move(initialized), mdp.start_state(), std::nullopt, std::vector<double>(n_actions)};
  Rng rng(seed);
  LockstepReport report;

  // Chooses an action for both walkers at their states from one shared draw.
  auto choose = [&](StateId at_l, StateId at_lp) {
    const double u = rng.uniform();
    const ActionDistribution dist = l.distribution(policy, at_l);
    const ActionDistribution dist_p = lp.distribution(policy, at_lp);
    if (report.trajectories_identical && at_l == at_lp) {
      track_max(report.max_policy_divergence, total_variation(dist, dist_p));
      if (cdf_margin(dist, u) < LockstepReport::kBoundaryBand) ++report.near_boundary_draws;
    }
    const ActionId a = sample_from(dist, u);
    const ActionId a_p = sample_from(dist_p, u);
    if (a != a_p) report.trajectories_identical = false;
    return std::pair{a, a_p};
  };

  for (std::size_t t = 0; t < n_steps; ++t) {
    if (algorithm == Algorithm::q_learning || !l.pending) {
      auto [a, a_p] = choose(l.s, lp.s);
      l.pending = a;
      lp.pending = a_p;
    }
    const double u_env = rng.uniform();
    const Experience e = step_with_draw(mdp, l.s, *l.pending, u_env);
    const Experience e_p = step_with_draw(mdp, lp.s, *lp.pending, u_env);
    if (!(e == e_p)) report.trajectories_identical = false;

    std::optional<ActionId> next, next_p;
    if (algorithm == Algorithm::sarsa) {
      // The draw is consumed even when s' is terminal and no a' is needed.
      auto [a, a_p] = choose(e.s_next, e_p.s_next);
      if (!e.s_next_terminal) next = a;
      if (!e_p.s_next_terminal) next_p = a_p;
    }

    const double d = l.learner.apply_update(e, next);
    const double d_p = lp.learner.apply_update(e_p, next_p);
    dump_row(dump, t, e, d, d_p);
    record_step(report, l.learner, lp.learner, d, d_p);

    l.s = e.s_next_terminal ? mdp.start_state() : e.s_next;
    lp.s = e_p.s_next_terminal ? mdp.start_state() : e_p.s_next;
    l.pending = next;
    lp.pending = next_p;
  }
  return report;
}

LockstepReport run_coupled_onpolicy(const Mdp& mdp, const QTable& q0, const Potential& phi,
                                    const LearnerConfig& config, const PolicyKind& policy,
                                    std::size_t n_steps, std::uint64_t seed, std::ostream* dump) {
  auto [shaped, initialized] = make_learner_pair(q0, phi, config);
  return run_coupled(std::move(shaped), std::move(initialized), mdp, policy, n_steps, seed, dump);
}

}  // namespace pbrs
