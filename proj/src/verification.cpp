#include "pbrs/verification.hpp"

#include <cmath>

namespace pbrs {

Potential random_potential(const Mdp& mdp, double magnitude, Rng& rng) {
  std::vector<double> values(mdp.n_states(), 0.0);
  for (StateId s = 0; s < mdp.n_states(); ++s) {
    const double v = rng.uniform(-magnitude, magnitude);
    if (!mdp.is_terminal(s)) values[s] = v;
  }
  return Potential::for_mdp(mdp, std::move(values));
}

QTable random_q_table(const Mdp& mdp, double magnitude, Rng& rng) {
  QTable q = QTable::for_mdp(mdp);
  for (double& v : q.values()) v = rng.uniform(-magnitude, magnitude);
  return q;
}

namespace {

struct Variant {
  Algorithm algorithm;
  double lambda;
  TraceKind trace_kind;
  bool watkins_cut;
};

std::vector<Variant> trace_variants(const std::vector<double>& lambdas, bool include_watkins) {
  std::vector<Variant> out;
  for (Algorithm algorithm : {Algorithm::q_learning, Algorithm::sarsa}) {
    for (double lambda : lambdas) {
      for (TraceKind kind : {TraceKind::accumulating, TraceKind::replacing}) {
        out.push_back({algorithm, lambda, kind, false});
        if (include_watkins && algorithm == Algorithm::q_learning && lambda > 0.0)
          out.push_back({algorithm, lambda, kind, true});
      }
    }
  }
  return out;
}

}  // namespace

std::vector<UpdateSweepRow> run_update_equivalence_sweep(
    const UpdateSweepOptions& options, const std::function<void(const UpdateSweepRow&)>& on_row,
    std::ostream* dump) {
  std::vector<UpdateSweepRow> rows;
  const auto variants = trace_variants(options.lambdas, options.include_watkins);
  if (dump) write_lockstep_dump_header(*dump);

  for (double gamma : options.gammas) {
    for (std::size_t i = 0; i < options.n_seeds; ++i) {
      const std::uint64_t seed = derive_seed(options.base_seed, i);
      const Mdp mdp = gamma < 1.0
                          ? make_random_mdp(options.n_states, options.n_actions, options.branching, seed, gamma)
                          : make_random_episodic_mdp(options.n_states, options.n_actions, options.branching,
                                                     options.n_terminal, seed, gamma);
      Rng rng(derive_seed(seed, 1));
      const Potential phi = random_potential(mdp, options.potential_magnitude, rng);
      const QTable q0 = random_q_table(mdp, options.q0_magnitude, rng);
      const ExperienceScript script = make_random_script(mdp, options.n_steps, derive_seed(seed, 2));

      for (double alpha : options.alphas) {
        for (const Variant& v : variants) {
          LearnerConfig config;
          config.algorithm = v.algorithm;
          config.alpha = alpha;
          config.gamma = gamma;
          config.lambda = v.lambda;
          config.trace_kind = v.trace_kind;
          config.watkins_cut = v.watkins_cut;
          config.exact_mode = options.exact_mode;

          UpdateSweepRow row{i, config, run_scripted_lockstep(mdp, q0, phi, config, script, dump), false};
          if (options.exact_mode) {
            row.passed = row.report.td_bit_mismatches == 0 && row.report.delta_bit_mismatches == 0;
          } else {
            row.passed = row.report.max_td_divergence <= options.tolerance &&
                         row.report.max_delta_divergence <= options.tolerance;
          }
          if (on_row) on_row(row);
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

std::vector<PolicySweepRow> run_policy_equivalence_sweep(
    const PolicySweepOptions& options, const std::function<void(const PolicySweepRow&)>& on_row,
    std::ostream* dump) {
  std::vector<PolicySweepRow> rows;
  if (dump) write_lockstep_dump_header(*dump);

  const std::vector<Variant> variants{
      {Algorithm::q_learning, 0.0, TraceKind::accumulating, false},
      {Algorithm::q_learning, 0.9, TraceKind::accumulating, true},
      {Algorithm::sarsa, 0.0, TraceKind::accumulating, false},
      {Algorithm::sarsa, 0.9, TraceKind::replacing, false},
  };

  for (const std::string& environment : {std::string("gridworld5x5"), std::string("random_episodic")}) {
    for (std::size_t i = 0; i < options.n_seeds; ++i) {
      const std::uint64_t seed = derive_seed(options.base_seed, i);
      const bool grid = environment == "gridworld5x5";
      const Mdp mdp = grid ? make_gridworld(5, 5, {4, 4}, -1.0, 0.0, 0.1, 0.95)
                           : make_random_episodic_mdp(20, 4, 3, 2, seed, 1.0);
      Rng rng(derive_seed(seed, 3));
      const Potential phi = random_potential(mdp, options.potential_magnitude, rng);
      // Zero tables on the gridworld exercise tie-breaking; random ones elsewhere.
      const QTable q0 = grid ? QTable::for_mdp(mdp) : random_q_table(mdp, 1.0, rng);

      for (const std::string& policy_text : options.policies) {
        const PolicyKind policy = parse_policy(policy_text);
        for (const Variant& v : variants) {
          LearnerConfig config;
          config.algorithm = v.algorithm;
          config.alpha = 0.5;
          config.gamma = mdp.gamma();
          config.lambda = v.lambda;
          config.trace_kind = v.trace_kind;
          config.watkins_cut = v.watkins_cut;
          config.exact_mode = options.exact_mode;
          PolicySweepRow row{environment, policy_text, i, config,
                             run_coupled_onpolicy(mdp, q0, phi, config, policy, options.n_steps,
                                                  derive_seed(seed, 4), dump),
                             false};
          row.passed = row.report.trajectories_identical &&
                       row.report.max_policy_divergence <= options.policy_tolerance &&
                       row.report.max_delta_divergence <= options.delta_tolerance;
          if (on_row) on_row(row);
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

}  // namespace pbrs
