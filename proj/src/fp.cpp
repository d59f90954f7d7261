#include "sgplay/fp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "sgplay/equilibrium.hpp"

namespace sgplay {
namespace {

std::vector<int> select_actions(const Game& game, const FPState& fp, int state, std::span<const ValueVector> u,
                                TieBreaker& tie) {
  std::vector<int> actions(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    actions[i] = best_response(game, i, state, u[i], fp.x.state(state), tie).action;
  }
  return actions;
}

// x <- x + step * (e_a - x); step == 1 overwrites with e_a exactly.
void move_toward_pure(std::span<double> x, int a, double step) {
  if (step == 1.0) {
    std::fill(x.begin(), x.end(), 0.0);
    x[a] = 1.0;
    return;
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double target = static_cast<int>(k) == a ? 1.0 : 0.0;
    x[k] += step * (target - x[k]);
  }
}

// f^i_{s,u^i}(x_s) for every player and state, from the pre-update state.
std::vector<ValueVector> auxiliary_values(const Game& game, const FPState& fp) {
  std::vector<ValueVector> f(game.num_players(), ValueVector(game.num_states()));
  for (int i = 0; i < game.num_players(); ++i) {
    for (int s = 0; s < game.num_states(); ++s) f[i][s] = shapley_payoff(game, i, s, fp.u[i], fp.x.state(s));
  }
  return f;
}

std::vector<ValueVector> resolve_prior(const Game& game, const std::vector<ValueVector>& prior) {
  const int players = game.num_players();
  const auto n = static_cast<std::size_t>(game.num_states());
  if (prior.empty()) return std::vector<ValueVector>(players, ValueVector(n, 0.0));
  for (const auto& row : prior) {
    if (row.size() != n) throw std::invalid_argument("prior u has wrong dimension");
  }
  if (prior.size() == static_cast<std::size_t>(players)) return prior;
  if (prior.size() != 1) throw std::invalid_argument("prior u needs one row or one row per player");
  std::vector<ValueVector> u(players, prior[0]);
  // Zero-sum: player 1 tracks the negated payoff.
  if (players == 2 && classify(game, 1e-9).zero_sum) {
    for (double& v : u[1]) v = -v;
  }
  return u;
}

double max_abs(const std::vector<ValueVector>& u) {
  double m = 0.0;
  for (const auto& row : u) {
    for (double v : row) m = std::max(m, std::abs(v));
  }
  return m;
}

std::string procedure_tag(FPProcedure p) {
  switch (p) {
    case FPProcedure::kSynchronous:
      return "sfp";
    case FPProcedure::kAsynchronous:
      return "afp";
    case FPProcedure::kVisitIndexed:
      return "afp-visit";
  }
  return "unknown";
}

TieBreaker make_tie(const RunConfig& config) {
  return config.tie_rule == TieBreaker::Rule::kSeededRandom ? TieBreaker::seeded(config.seed ^ 0x5eed5eedULL)
                                                            : TieBreaker::lowest_index();
}

}  // namespace

FPState make_fp_state(const Game& game, const MixedProfile& x0, const ValueVector& u0, int initial_state) {
  return make_fp_state(game, x0, std::vector<ValueVector>(game.num_players(), u0), initial_state);
}

FPState make_fp_state(const Game& game, const MixedProfile& x0, std::vector<ValueVector> u0, int initial_state) {
  if (u0.size() != static_cast<std::size_t>(game.num_players())) {
    throw std::invalid_argument("need one prior row per player");
  }
  if (initial_state < 0 || initial_state >= game.num_states()) throw std::out_of_range("initial state");
  FPState fp;
  fp.x = x0;
  fp.u = std::move(u0);
  fp.counts.assign(game.num_states(), 0);
  fp.visit_weight.assign(game.num_states(), 0.0);
  fp.current_state = initial_state;
  return fp;
}

void sfp_step(const Game& game, FPState& fp, const StepSchedule& schedule, TieBreaker& tie) {
  const double alpha = schedule.alpha(fp.n);
  const double sigma = fp.sigma + alpha;
  const double ratio = alpha / sigma;
  const auto f = auxiliary_values(game, fp);
  std::vector<std::vector<int>> actions(game.num_states());
  for (int s = 0; s < game.num_states(); ++s) actions[s] = select_actions(game, fp, s, fp.u, tie);
  for (int i = 0; i < game.num_players(); ++i) {
    for (int s = 0; s < game.num_states(); ++s) fp.u[i][s] += ratio * (f[i][s] - fp.u[i][s]);
  }
  const double step = 1.0 / static_cast<double>(fp.n + 1);
  for (int s = 0; s < game.num_states(); ++s) {
    ++fp.counts[s];
    for (int i = 0; i < game.num_players(); ++i) move_toward_pure(fp.x.at(s, i), actions[s][i], step);
  }
  fp.sigma = sigma;
  ++fp.n;
}

void afp_step(const Game& game, FPState& fp, const StepSchedule& schedule, std::mt19937_64& rng, TieBreaker& tie,
              ActionTiming timing) {
  const int s = fp.current_state;
  std::vector<int> actions = (timing == ActionTiming::kAfterUpdate && fp.pending)
                                 ? *fp.pending
                                 : select_actions(game, fp, s, fp.u, tie);
  const double alpha = schedule.alpha(fp.n);
  const double sigma = fp.sigma + alpha;
  const double ratio = alpha / sigma;
  const auto f = auxiliary_values(game, fp);
  const std::vector<ValueVector> old_u = fp.u;
  for (int i = 0; i < game.num_players(); ++i) {
    for (int t = 0; t < game.num_states(); ++t) fp.u[i][t] += ratio * (f[i][t] - fp.u[i][t]);
  }
  const double step = 1.0 / static_cast<double>(++fp.counts[s]);
  for (int i = 0; i < game.num_players(); ++i) move_toward_pure(fp.x.at(s, i), actions[i], step);
  fp.sigma = sigma;
  fp.current_state = sample_transition(game, s, game.joint().flat(actions), rng);
  ++fp.n;
  if (timing == ActionTiming::kAfterUpdate) {
    fp.pending = select_actions(game, fp, fp.current_state, old_u, tie);
  } else {
    fp.pending.reset();
  }
}

void afp_visit_indexed_step(const Game& game, FPState& fp, const DivisorSchedule& weights, std::mt19937_64& rng,
                            TieBreaker& tie, ActionTiming timing) {
  const int s = fp.current_state;
  std::vector<int> actions = (timing == ActionTiming::kAfterUpdate && fp.pending)
                                 ? *fp.pending
                                 : select_actions(game, fp, s, fp.u, tie);
  const std::vector<ValueVector> old_u = fp.u;
  const std::int64_t visit = fp.counts[s]++;
  const double a = weights(static_cast<double>(visit));
  fp.visit_weight[s] += 1.0 / a;
  const double coef = 1.0 / (a * fp.visit_weight[s]);
  for (int i = 0; i < game.num_players(); ++i) {
    const double f = shapley_payoff(game, i, s, old_u[i], fp.x.state(s));
    fp.u[i][s] += coef * (f - fp.u[i][s]);
  }
  const double step = 1.0 / static_cast<double>(fp.counts[s]);
  for (int i = 0; i < game.num_players(); ++i) move_toward_pure(fp.x.at(s, i), actions[i], step);
  fp.current_state = sample_transition(game, s, game.joint().flat(actions), rng);
  ++fp.n;
  if (timing == ActionTiming::kAfterUpdate) {
    fp.pending = select_actions(game, fp, fp.current_state, old_u, tie);
  } else {
    fp.pending.reset();
  }
}

FPRun run_fp(const Game& game, const RunConfig& config) {
  if (config.steps < 1) throw std::invalid_argument("steps must be at least 1");
  std::set<std::string> warned;
  auto warn = [&](const std::string& msg) {
    if (config.warn && warned.insert(msg).second) config.warn(msg);
  };
  if (config.procedure != FPProcedure::kSynchronous && !is_ergodic(game).ergodic) {
    warn("game is not ergodic; asynchronous fictitious play may leave states unexplored");
  }
  if (config.procedure == FPProcedure::kVisitIndexed && config.visit_weights.preset() == DivisorSchedule::Preset::kLinear) {
    warn("visit weights a(k) = k + 1 give a double exponential slowdown; convergence within this budget is not expected");
  }

  const MixedProfile x0 = config.prior_x.value_or(MixedProfile::pure(game, 0));
  FPRun run;
  run.final_state = make_fp_state(game, x0, resolve_prior(game, config.prior_u), config.initial_state);
  FPState& fp = run.final_state;
  const bool per_player = config.per_player_priors;
  const RecordLayout layout = layout_for(game, per_player, false);
  const bool has_state = config.procedure != FPProcedure::kSynchronous;
  apply_layout(run.trajectory, layout, has_state);
  run.trajectory.metadata = {{"procedure", procedure_tag(config.procedure)},
                             {"seed", std::to_string(config.seed)},
                             {"schedule", config.schedule.tag()},
                             {"visit_weights", config.visit_weights.tag()},
                             {"game", std::to_string(fingerprint(game))},
                             {"steps", std::to_string(config.steps)}};

  auto record = [&] {
    std::optional<int> state;
    if (has_state) state = fp.current_state;
    run.trajectory.records.push_back(
        make_record(game, fp.u, fp.x, static_cast<double>(fp.n), state, layout));
  };

  std::mt19937_64 rng(config.seed);
  TieBreaker tie = make_tie(config);
  run.max_abs_u = max_abs(fp.u);
  record();
  for (std::int64_t k = 0; k < config.steps; ++k) {
    switch (config.procedure) {
      case FPProcedure::kSynchronous:
        sfp_step(game, fp, config.schedule, tie);
        break;
      case FPProcedure::kAsynchronous:
        afp_step(game, fp, config.schedule, rng, tie, config.action_timing);
        break;
      case FPProcedure::kVisitIndexed:
        afp_visit_indexed_step(game, fp, config.visit_weights, rng, tie, config.action_timing);
        break;
    }
    run.max_simplex_violation = std::max(run.max_simplex_violation, fp.x.simplex_violation());
    run.max_abs_u = std::max(run.max_abs_u, max_abs(fp.u));
    const bool last = k + 1 == config.steps;
    if (last || (config.record_stride > 0 && fp.n % config.record_stride == 0)) record();
  }
  return run;
}

std::int64_t doubling_trigger(double alpha, double beta_minus, double M, double delta, const StepSchedule& schedule,
                              std::int64_t limit) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (!(beta_minus > 0.0 && beta_minus <= 1.0)) throw std::invalid_argument("beta_minus must lie in (0, 1]");
  if (!(M > 0.0)) throw std::invalid_argument("M must be positive");
  // exp(-beta * S_n) * 2M <= 4 delta M alpha  <=>  S_n >= log(1 / (2 delta alpha)) / beta.
  const double needed = std::log(1.0 / (2.0 * delta * alpha)) / beta_minus;
  double sum = 0.0;
  double sigma = 0.0;
  for (std::int64_t n = 0; n < limit; ++n) {
    sigma += schedule.alpha(n);
    sum += alpha / sigma;
    if (sum >= needed) return n;
  }
  return limit;
}

double calibrate_beta_minus(const Game& game, std::uint64_t seed, std::int64_t steps) {
  std::mt19937_64 rng(seed);
  std::vector<std::int64_t> visits(game.num_states(), 0);
  int state = 0;
  for (std::int64_t k = 0; k < steps; ++k) {
    ++visits[state];
    const int joint = std::min(static_cast<int>(uniform01(rng) * game.num_joint_actions()), game.num_joint_actions() - 1);
    state = sample_transition(game, state, joint, rng);
  }
  const auto least = *std::min_element(visits.begin(), visits.end());
  const double freq = static_cast<double>(least) / static_cast<double>(steps);
  return std::clamp(freq, 1.0 / static_cast<double>(steps), 1.0);
}

DoublingRun run_doubling_zero_sum(const Game& game, const RunConfig& config, double beta_minus) {
  if (game.num_players() != 2 || !classify(game, 1e-9).zero_sum) {
    throw std::invalid_argument("doubling-trick fictitious play requires a two-player zero-sum game");
  }
  if (config.steps < 1) throw std::invalid_argument("steps must be at least 1");
  if (!is_ergodic(game).ergodic && config.warn) config.warn("game is not ergodic");

  DoublingRun run;
  const MixedProfile x0 = config.prior_x.value_or(MixedProfile::pure(game, 0));
  run.final_state = make_fp_state(game, x0, resolve_prior(game, config.prior_u), config.initial_state);
  FPState& fp = run.final_state;
  const RecordLayout layout = layout_for(game, config.per_player_priors, false);
  apply_layout(run.trajectory, layout, true);

  run.beta_minus = beta_minus > 0.0 ? beta_minus : calibrate_beta_minus(game, config.seed);
  double gamma0 = 0.0;
  for (int s = 0; s < game.num_states(); ++s) {
    gamma0 = std::max(gamma0, std::abs(shapley_payoff(game, 0, s, fp.u[0], fp.x.state(s))));
  }
  run.M = std::max({max_abs(fp.u), gamma0, game.max_abs_reward()}) + 1.0;
  run.alpha = 1.0;
  std::int64_t trigger =
      doubling_trigger(run.alpha, run.beta_minus, run.M, game.delta(), config.schedule, config.steps + 1);

  run.trajectory.metadata = {{"procedure", "doubling-zs"},
                             {"seed", std::to_string(config.seed)},
                             {"schedule", config.schedule.tag()},
                             {"game", std::to_string(fingerprint(game))},
                             {"steps", std::to_string(config.steps)}};

  std::mt19937_64 rng(config.seed);
  TieBreaker tie = make_tie(config);
  auto record = [&] {
    run.trajectory.records.push_back(
        make_record(game, fp.u, fp.x, static_cast<double>(fp.n), fp.current_state, layout));
  };
  run.max_abs_u = max_abs(fp.u);
  record();

  std::vector<int> actions = select_actions(game, fp, fp.current_state, fp.u, tie);
  double sigma = 0.0;
  for (std::int64_t k = 0; k < config.steps; ++k) {
    const std::int64_t n = fp.n;
    const int s = fp.current_state;
    const auto f = auxiliary_values(game, fp);
    const std::vector<ValueVector> old_u = fp.u;
    // x_{n+1,s_n} = x_{n,s_n} + (a_n - x_{n,s_n}) / (n + 1)
    ++fp.counts[s];
    const double step = 1.0 / static_cast<double>(n + 1);
    for (int i = 0; i < 2; ++i) move_toward_pure(fp.x.at(s, i), actions[i], step);
    // u_{n+1,s} = u_{n,s} + (alpha / sigma_n) (f_{s,u_n}(x_{n,s}) - u_{n,s}) at every s
    sigma += config.schedule.alpha(n);
    const double ratio = run.alpha / sigma;
    for (int i = 0; i < 2; ++i) {
      for (int t = 0; t < game.num_states(); ++t) fp.u[i][t] += ratio * (f[i][t] - fp.u[i][t]);
    }
    fp.sigma = sigma;
    fp.current_state = sample_transition(game, s, game.joint().flat(actions), rng);
    ++fp.n;
    // a_{n+1} in br_{s,u_n}(x_{n+1,s})
    actions = select_actions(game, fp, fp.current_state, old_u, tie);
    if (n > trigger) {
      run.alpha /= 2.0;
      run.halvings.push_back(n);
      trigger = doubling_trigger(run.alpha, run.beta_minus, run.M, game.delta(), config.schedule, config.steps + 1);
    }
    run.max_simplex_violation = std::max(run.max_simplex_violation, fp.x.simplex_violation());
    run.max_abs_u = std::max(run.max_abs_u, max_abs(fp.u));
    const bool last = k + 1 == config.steps;
    if (last || (config.record_stride > 0 && fp.n % config.record_stride == 0)) record();
  }
  fp.pending = actions;
  run.final_duality_gap.resize(game.num_states());
  for (int s = 0; s < game.num_states(); ++s) run.final_duality_gap[s] = duality_gap(game, fp.u[0], fp.x, s);
  run.trajectory.metadata["halvings"] = std::to_string(run.halvings.size());
  return run;
}

}  // namespace sgplay
