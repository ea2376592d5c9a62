#include "pbrs/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"
#include "pbrs/error.hpp"
#include "pbrs/q_table.hpp"
#include "pbrs/value_iteration.hpp"

namespace pbrs {

namespace {

using nlohmann::json;

constexpr double kOracleTolerance = 1e-10;
constexpr double kOptimalSetTolerance = 1e-6;

std::optional<std::string> potential_name(const std::string& scheme) {
  constexpr std::string_view prefix = "potential:";
  if (scheme.starts_with(prefix) && scheme.size() > prefix.size()) return scheme.substr(prefix.size());
  return std::nullopt;
}

double parse_constant(const std::string& scheme) {
  const std::string_view text = std::string_view(scheme).substr(9);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(value))
    throw ConfigError("invalid constant initialization '" + scheme + "'");
  return value;
}

void reject_unknown_keys(const json& object, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
  if (!object.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& [key, value] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const json& object, const char* key, T& out, const std::string& where) {
  if (!object.contains(key)) return;
  try {
    out = object.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

Cell read_cell(const json& object, const char* key, Cell fallback, const std::string& where) {
  if (!object.contains(key)) return fallback;
  std::vector<std::size_t> xy;
  read(object, key, xy, where);
  if (xy.size() != 2) throw ConfigError(where + "." + key + ": expected [x, y]");
  return {xy[0], xy[1]};
}

bool greedy_is_optimal(const Learner& learner, const Mdp& mdp,
                       const std::vector<std::vector<bool>>& optimal, std::vector<double>& row) {
  for (StateId s = 0; s < mdp.n_states(); ++s) {
    if (mdp.is_terminal(s)) continue;
    learner.advantage_row(s, row);
    if (!optimal[s][argmax_lowest(row)]) return false;
  }
  return true;
}

// Same draw protocol as the coupled harness: Q-learning takes an action
// draw then a transition draw; Sarsa takes a transition draw then the a'
// draw, plus one draw for the first action of each episode.
TrialResult run_trial(Learner learner, const Mdp& mdp, const PolicyKind& policy,
                      const std::vector<std::vector<bool>>& optimal, const ExperimentConfig& config,
                      std::uint64_t seed) {
  Rng rng(seed);
  TrialResult result;
  std::optional<std::size_t> first_goal;
  std::optional<std::size_t> optimal_at;
  std::size_t steps = 0;
  std::size_t episodes = 0;
  std::vector<double> row(mdp.n_actions());
  const bool sarsa = learner.config().algorithm == Algorithm::sarsa;

  const bool advantage_based = is_advantage_based(policy);
  auto choose = [&](StateId s) {
    const double u = rng.uniform();
    if (advantage_based) learner.advantage_row(s, row);
    else learner.q_row(s, row);
    return sample_from(action_distribution(policy, row), u);
  };

  if (mdp.is_terminal(mdp.start_state())) first_goal = 0;

  while (episodes < config.n_episodes && steps < config.max_total_steps && !mdp.is_terminal(mdp.start_state())) {
    ++episodes;
    StateId s = mdp.start_state();
    std::optional<ActionId> pending;
    for (std::size_t t = 0; t < config.max_steps_per_episode && steps < config.max_total_steps; ++t) {
      if (!sarsa || !pending) pending = choose(s);
      const Experience e = step(mdp, s, *pending, rng);
      std::optional<ActionId> next;
      if (sarsa) {
        const ActionId a_next = choose(e.s_next);
        if (!e.s_next_terminal) next = a_next;
      }
      learner.apply_update(e, next);
      ++steps;
      if (e.s_next_terminal) {
        if (!first_goal) first_goal = steps;
        break;
      }
      s = e.s_next;
      pending = next;
    }
    if (!optimal_at && greedy_is_optimal(learner, mdp, optimal, row)) optimal_at = episodes;
  }

  result.total_steps = steps;
  result.goal_censored = !first_goal.has_value();
  result.steps_to_first_goal = first_goal.value_or(steps);
  result.optimal_censored = !optimal_at.has_value();
  result.episodes_to_optimal = optimal_at.value_or(episodes);
  return result;
}

}  // namespace

void ExperimentConfig::validate() const {
  const auto& env = environment;
  if (env.width < 1 || env.height < 1) throw ConfigError("environment: width and height must be >= 1");
  if (env.goal.x >= env.width || env.goal.y >= env.height) throw ConfigError("environment: goal outside the grid");
  if (env.start.x >= env.width || env.start.y >= env.height) throw ConfigError("environment: start outside the grid");
  if (!(env.slip_prob >= 0.0 && env.slip_prob <= 1.0)) throw ConfigError("environment: slip_prob must lie in [0, 1]");
  if (!(env.gamma >= 0.0 && env.gamma <= 1.0)) throw ConfigError("environment: gamma must lie in [0, 1]");
  if (!(learner.alpha > 0.0 && learner.alpha <= 1.0)) throw ConfigError("learner: alpha must lie in (0, 1]");
  if (!(learner.lambda >= 0.0 && learner.lambda <= 1.0)) throw ConfigError("learner: lambda must lie in [0, 1]");
  if (n_trials < 1) throw ConfigError("n_trials must be >= 1");
  if (n_episodes < 1) throw ConfigError("n_episodes must be >= 1");
  if (max_steps_per_episode < 1) throw ConfigError("max_steps_per_episode must be >= 1");

  const bool init_ok = initialization == "zero" || initialization == "optimistic" ||
                       initialization.starts_with("constant:") || potential_name(initialization).has_value();
  if (!init_ok) throw ConfigError("unknown initialization scheme '" + initialization + "'");
  if (initialization.starts_with("constant:")) parse_constant(initialization);
  if (shaping != "none" && !potential_name(shaping)) throw ConfigError("unknown shaping scheme '" + shaping + "'");
  parse_policy(policy);
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  reject_unknown_keys(doc,
                      {"environment", "initialization", "shaping", "potentials", "policy", "learner", "n_episodes",
                       "max_steps_per_episode", "max_total_steps", "n_trials", "base_seed"},
                      "config");

  ExperimentConfig config;
  if (doc.contains("environment")) {
    const json& env = doc["environment"];
    reject_unknown_keys(env, {"width", "height", "goal", "start", "step_reward", "goal_reward", "slip_prob", "gamma"},
                        "environment");
    auto& e = config.environment;
    read(env, "width", e.width, "environment");
    read(env, "height", e.height, "environment");
    // The default goal follows the grid's far corner unless given.
    e.goal = {e.width - 1, e.height - 1};
    e.goal = read_cell(env, "goal", e.goal, "environment");
    e.start = read_cell(env, "start", e.start, "environment");
    read(env, "step_reward", e.step_reward, "environment");
    read(env, "goal_reward", e.goal_reward, "environment");
    read(env, "slip_prob", e.slip_prob, "environment");
    read(env, "gamma", e.gamma, "environment");
  }
  if (doc.contains("learner")) {
    const json& l = doc["learner"];
    reject_unknown_keys(l, {"algorithm", "alpha", "lambda", "trace_kind", "watkins_cut", "exact_mode"}, "learner");
    std::string algorithm(to_string(config.learner.algorithm));
    std::string trace_kind(to_string(config.learner.trace_kind));
    read(l, "algorithm", algorithm, "learner");
    read(l, "trace_kind", trace_kind, "learner");
    config.learner.algorithm = parse_algorithm(algorithm);
    config.learner.trace_kind = parse_trace_kind(trace_kind);
    read(l, "alpha", config.learner.alpha, "learner");
    read(l, "lambda", config.learner.lambda, "learner");
    read(l, "watkins_cut", config.learner.watkins_cut, "learner");
    read(l, "exact_mode", config.learner.exact_mode, "learner");
  }
  if (doc.contains("potentials")) {
    if (!doc["potentials"].is_object()) throw ConfigError("potentials: expected an object of arrays");
    read(doc, "potentials", config.potentials, "config");
  }
  read(doc, "initialization", config.initialization, "config");
  read(doc, "shaping", config.shaping, "config");
  read(doc, "policy", config.policy, "config");
  read(doc, "n_episodes", config.n_episodes, "config");
  read(doc, "max_steps_per_episode", config.max_steps_per_episode, "config");
  read(doc, "max_total_steps", config.max_total_steps, "config");
  read(doc, "n_trials", config.n_trials, "config");
  read(doc, "base_seed", config.base_seed, "config");
  config.validate();
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str());
}

std::string to_json(const ExperimentConfig& config) {
  const auto& e = config.environment;
  json doc = {
      {"environment",
       {{"width", e.width},
        {"height", e.height},
        {"goal", {e.goal.x, e.goal.y}},
        {"start", {e.start.x, e.start.y}},
        {"step_reward", e.step_reward},
        {"goal_reward", e.goal_reward},
        {"slip_prob", e.slip_prob},
        {"gamma", e.gamma}}},
      {"initialization", config.initialization},
      {"shaping", config.shaping},
      {"potentials", config.potentials},
      {"policy", config.policy},
      {"learner",
       {{"algorithm", std::string(to_string(config.learner.algorithm))},
        {"alpha", config.learner.alpha},
        {"lambda", config.learner.lambda},
        {"trace_kind", std::string(to_string(config.learner.trace_kind))},
        {"watkins_cut", config.learner.watkins_cut},
        {"exact_mode", config.learner.exact_mode}}},
      {"n_episodes", config.n_episodes},
      {"max_steps_per_episode", config.max_steps_per_episode},
      {"max_total_steps", config.max_total_steps},
      {"n_trials", config.n_trials},
      {"base_seed", config.base_seed},
  };
  return doc.dump(2);
}

std::string censored_label(const TrialResult& result) {
  if (result.goal_censored && result.optimal_censored) return "both";
  if (result.goal_censored) return "goal";
  if (result.optimal_censored) return "optimal";
  return "none";
}

Mdp build_environment(const ExperimentConfig& config) {
  const auto& e = config.environment;
  return make_gridworld(e.width, e.height, e.goal, e.step_reward, e.goal_reward, e.slip_prob, e.gamma, e.start);
}

Potential resolve_potential(const std::string& name, const ExperimentConfig& config, const Mdp& mdp) {
  if (name == "zero") return Potential::zero(mdp.n_states());
  if (name == "negated_manhattan_distance_to_goal") {
    const auto& e = config.environment;
    std::vector<double> values(mdp.n_states());
    for (StateId s = 0; s < mdp.n_states(); ++s) {
      const Cell c = grid_cell(e.width, s);
      const auto dx = c.x > e.goal.x ? c.x - e.goal.x : e.goal.x - c.x;
      const auto dy = c.y > e.goal.y ? c.y - e.goal.y : e.goal.y - c.y;
      values[s] = -static_cast<double>(dx + dy);
    }
    return Potential::for_mdp(mdp, std::move(values));
  }
  if (name == "optimal_value") return Potential::for_mdp(mdp, state_values(mdp, value_iteration(mdp, kOracleTolerance)));
  const auto it = config.potentials.find(name);
  if (it == config.potentials.end()) throw ConfigError("unknown potential '" + name + "'");
  if (it->second.size() != mdp.n_states())
    throw ConfigError("potential '" + name + "' needs " + std::to_string(mdp.n_states()) + " values");
  for (double v : it->second)
    if (!std::isfinite(v)) throw ConfigError("potential '" + name + "' has a non-finite value");
  return Potential::for_mdp(mdp, it->second);
}

double optimistic_value(const Mdp& mdp, std::size_t max_steps_per_episode) {
  const double top = mdp.max_reward();
  if (mdp.gamma() < 1.0) return top / (1.0 - mdp.gamma());
  return static_cast<double>(max_steps_per_episode) * std::max(top, 0.0);
}

Learner build_learner(const ExperimentConfig& config, const Mdp& mdp) {
  LearnerConfig lc;
  lc.algorithm = config.learner.algorithm;
  lc.alpha = config.learner.alpha;
  lc.gamma = mdp.gamma();
  lc.lambda = config.learner.lambda;
  lc.trace_kind = config.learner.trace_kind;
  lc.watkins_cut = config.learner.watkins_cut;
  lc.exact_mode = config.learner.exact_mode;
  if (const auto name = potential_name(config.shaping)) lc.shaping = resolve_potential(*name, config, mdp);

  const std::string& init = config.initialization;
  if (const auto name = potential_name(init)) {
    const Potential phi = resolve_potential(*name, config, mdp);
    if (lc.exact_mode) return Learner(lc, QTable::for_mdp(mdp), phi);
    return Learner(lc, shift_initialization(QTable::for_mdp(mdp), phi));
  }
  double fill = 0.0;
  if (init == "optimistic") fill = optimistic_value(mdp, config.max_steps_per_episode);
  else if (init.starts_with("constant:")) fill = parse_constant(init);
  else if (init != "zero") throw ConfigError("unknown initialization scheme '" + init + "'");
  return Learner(lc, QTable::for_mdp(mdp, fill));
}

std::vector<TrialResult> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Mdp mdp = build_environment(config);
  const PolicyKind policy = parse_policy(config.policy);
  const auto optimal = optimal_action_sets(value_iteration(mdp, kOracleTolerance), kOptimalSetTolerance);
  const Learner prototype = build_learner(config, mdp);

  std::vector<TrialResult> results;
  results.reserve(config.n_trials);
  for (std::size_t i = 0; i < config.n_trials; ++i)
    results.push_back(run_trial(prototype, mdp, policy, optimal, config, derive_seed(config.base_seed, i)));
  return results;
}

PairedResults run_equivalence_experiment(const ExperimentConfig& config) {
  const auto from_shaping = potential_name(config.shaping);
  const auto from_init = potential_name(config.initialization);
  if (from_shaping && from_init && *from_shaping != *from_init)
    throw ConfigError("pair: shaping and initialization name different potentials");
  if (!from_shaping && !from_init) throw ConfigError("pair: config must name a potential");
  const std::string name = from_shaping ? *from_shaping : *from_init;

  ExperimentConfig shaped = config;
  shaped.initialization = "zero";
  shaped.shaping = "potential:" + name;
  ExperimentConfig initialized = config;
  initialized.initialization = "potential:" + name;
  initialized.shaping = "none";
  return {name, run_experiment(shaped), run_experiment(initialized)};
}

std::string scheme_label(const ExperimentConfig& config) { return config.initialization + "/" + config.shaping; }

void write_trials_csv(std::ostream& out, const std::vector<LabeledTrial>& rows) {
  out << "trial,scheme,steps_to_first_goal,episodes_to_optimal,total_steps,censored\n";
  for (const auto& row : rows) {
    const TrialResult& r = row.result;
    out << row.trial << ',' << row.scheme << ',' << r.steps_to_first_goal << ',' << r.episodes_to_optimal << ','
        << r.total_steps << ',' << censored_label(r) << '\n';
  }
}

double median_steps_to_first_goal(const std::vector<TrialResult>& results) {
  require(!results.empty(), "median_steps_to_first_goal: no results");
  std::vector<std::size_t> steps;
  steps.reserve(results.size());
  for (const auto& r : results) steps.push_back(r.steps_to_first_goal);
  std::sort(steps.begin(), steps.end());
  const std::size_t mid = steps.size() / 2;
  if (steps.size() % 2 == 1) return static_cast<double>(steps[mid]);
  return 0.5 * (static_cast<double>(steps[mid - 1]) + static_cast<double>(steps[mid]));
}

}  // namespace pbrs
