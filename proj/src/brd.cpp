#include "sgplay/brd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sgplay/kernels.hpp"

namespace sgplay {
namespace {

std::string variant_tag(BRDVariant v) {
  switch (v) {
    case BRDVariant::kSynchronous:
      return "sbrd";
    case BRDVariant::kAsynchronous:
      return "abrd";
    case BRDVariant::kFullyAsynchronous:
      return "abrd-full";
  }
  return "unknown";
}

}  // namespace

void validate_config(const IntegratorConfig& cfg) {
  if (!(cfg.h > 0.0 && cfg.h <= 1.0)) throw std::invalid_argument("Euler step h must lie in (0, 1]");
  if (!(cfg.horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (cfg.record_stride < 0) throw std::invalid_argument("record stride must be non-negative");
  // beta <= 1 and a >= 1, so h <= 1 keeps every move convex.
}

BRDState make_brd_state(const Game& game, const MixedProfile& x0, std::vector<ValueVector> u0) {
  if (u0.size() != static_cast<std::size_t>(game.num_players())) {
    throw std::invalid_argument("need one estimate row per player");
  }
  BRDState brd;
  brd.x = x0;
  brd.u = std::move(u0);
  brd.occupancy.assign(game.num_states(), 0.0);
  return brd;
}

void euler_step(const Game& game, BRDState& brd, const DivisorSchedule& divisor, const RateSchedule& rates,
                const IntegratorConfig& cfg, TieBreaker& tie) {
  const int n = game.num_states();
  const int players = game.num_players();
  const double h = cfg.h;
  const double t = brd.t;

  std::vector<double> beta(n, 1.0);
  if (cfg.variant != BRDVariant::kSynchronous) {
    for (int s = 0; s < n; ++s) beta[s] = rates(s, t);
  }

  // Right-hand sides at the pre-step state.
  std::vector<ValueVector> du(players, ValueVector(n));
  std::vector<std::vector<int>> br(n, std::vector<int>(players));
  for (int s = 0; s < n; ++s) {
    double step;
    if (cfg.variant == BRDVariant::kFullyAsynchronous) {
      step = h * beta[s] / divisor(brd.occupancy[s]);
    } else {
      step = h * 1.0 / divisor(t);
    }
    for (int i = 0; i < players; ++i) {
      const double f = shapley_payoff(game, i, s, brd.u[i], brd.x.state(s));
      du[i][s] = step * (f - brd.u[i][s]);
      br[s][i] = best_response(game, i, s, brd.u[i], brd.x.state(s), tie).action;
    }
  }

  std::vector<double> target;
  for (int s = 0; s < n; ++s) {
    for (int i = 0; i < players; ++i) {
      auto xi = brd.x.at(s, i);
      target.assign(xi.size(), 0.0);
      target[br[s][i]] = 1.0;
      kernels::lerp(h * beta[s], target, xi);
    }
  }
  for (int i = 0; i < players; ++i) {
    for (int s = 0; s < n; ++s) brd.u[i][s] += du[i][s];
  }
  if (cfg.variant == BRDVariant::kFullyAsynchronous) {
    for (int s = 0; s < n; ++s) brd.occupancy[s] += h * beta[s];
  }
  ++brd.step;
  brd.t = static_cast<double>(brd.step) * h;
}

double psi_overestimation(const BRDState& brd, const Game& game) { return overestimation(game, brd.u[0], brd.x); }

BRDRun run_brd(const Game& game, const IntegratorConfig& cfg, const DivisorSchedule& divisor,
               const RateSchedule& rates, std::vector<ValueVector> u0, const MixedProfile& x0) {
  validate_config(cfg);
  const GameClass cls = classify(game, 1e-9);
  if (!cls.team && !cls.zero_sum) {
    throw std::invalid_argument("best-response dynamics need a team (identical-interest) or zero-sum game");
  }
  const int players = game.num_players();
  if (u0.size() == 1 && players > 1) {
    u0.resize(players, u0[0]);
    if (cls.zero_sum && !cls.team) {
      for (double& v : u0[1]) v = -v;
    }
  }
  for (const auto& row : u0) {
    if (row.size() != static_cast<std::size_t>(game.num_states())) {
      throw std::invalid_argument("prior u has wrong dimension");
    }
  }

  BRDRun run;
  run.final_state = make_brd_state(game, x0, std::move(u0));
  BRDState& brd = run.final_state;
  const RecordLayout layout = layout_for(game, cfg.per_player, true);
  apply_layout(run.trajectory, layout, false);
  run.trajectory.metadata = {{"procedure", variant_tag(cfg.variant)},
                             {"h", std::to_string(cfg.h)},
                             {"horizon", std::to_string(cfg.horizon)},
                             {"divisor", divisor.tag()},
                             {"rates", rates.tag()},
                             {"game", std::to_string(fingerprint(game))}};

  auto gamma_abs = [&] {
    double m = 0.0;
    for (int i = 0; i < players; ++i) {
      for (int s = 0; s < game.num_states(); ++s) {
        m = std::max(m, std::abs(shapley_payoff(game, i, s, brd.u[i], brd.x.state(s))));
      }
    }
    return m;
  };
  auto u_abs = [&] {
    double m = 0.0;
    for (const auto& row : brd.u) {
      for (double v : row) m = std::max(m, std::abs(v));
    }
    return m;
  };
  run.max_abs_u = u_abs();
  run.max_abs_gamma = gamma_abs();
  run.bound_M = std::max({run.max_abs_u, run.max_abs_gamma, game.max_abs_reward()}) + 1.0;

  TieBreaker tie = cfg.tie_rule == TieBreaker::Rule::kSeededRandom ? TieBreaker::seeded(cfg.tie_seed)
                                                                  : TieBreaker::lowest_index();
  auto record = [&] {
    run.trajectory.records.push_back(make_record(game, brd.u, brd.x, brd.t, std::nullopt, layout));
  };
  record();
  const auto steps = static_cast<std::int64_t>(std::llround(cfg.horizon / cfg.h));
  for (std::int64_t k = 0; k < steps; ++k) {
    euler_step(game, brd, divisor, rates, cfg, tie);
    run.max_abs_u = std::max(run.max_abs_u, u_abs());
    run.max_abs_gamma = std::max(run.max_abs_gamma, gamma_abs());
    run.max_simplex_violation = std::max(run.max_simplex_violation, brd.x.simplex_violation());
    const bool last = k + 1 == steps;
    if (last || (cfg.record_stride > 0 && brd.step % cfg.record_stride == 0)) record();
  }
  run.report = one_shot_deviation_check(game, brd.x, kDefaultTolerance);
  return run;
}

}  // namespace sgplay
