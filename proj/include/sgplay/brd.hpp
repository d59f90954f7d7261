#pragma once

// Euler integration of continuous-time best-response dynamics.
//
//   synchronous (SBRD)        dx^i_s = br - x^i_s,           du_s = (f_s - u_s) / a(t)
//   asynchronous (ABRD)       dx^i_s = beta_s(t)(br - x^i_s), du_s = (f_s - u_s) / a(t)
//   fully asynchronous        dx^i_s = beta_s(t)(br - x^i_s),
//                             du_s = beta_s(t)(f_s - u_s) / a(B_s),  dB_s = beta_s(t)
//
// The best response is a deterministic (or seeded) selection from the argmax
// set, i.e. a measurable selection of the differential inclusion. All right
// hand sides of a step are evaluated at the pre-step state.

#include <cstdint>
#include <vector>

#include "sgplay/diagnostics.hpp"
#include "sgplay/equilibrium.hpp"
#include "sgplay/game.hpp"
#include "sgplay/schedule.hpp"

namespace sgplay {

enum class BRDVariant { kSynchronous, kAsynchronous, kFullyAsynchronous };

struct IntegratorConfig {
  double h = 0.01;
  double horizon = 200.0;
  // Record every `record_stride` Euler steps; 0 keeps only the endpoints.
  std::int64_t record_stride = 10;
  TieBreaker::Rule tie_rule = TieBreaker::Rule::kLowestIndex;
  std::uint64_t tie_seed = 0;
  BRDVariant variant = BRDVariant::kAsynchronous;
  // Keep one estimate vector per player (team games with differing priors).
  bool per_player = false;
};

// Throws std::invalid_argument unless 0 < h <= 1, horizon > 0 and the Euler
// move h * beta / a stays a convex combination.
void validate_config(const IntegratorConfig& cfg);

struct BRDState {
  std::int64_t step = 0;
  double t = 0.0;
  // [player][state].
  std::vector<ValueVector> u;
  MixedProfile x;
  // B_s = int_0^t beta_s, fully asynchronous variant only.
  std::vector<double> occupancy;
};

BRDState make_brd_state(const Game& game, const MixedProfile& x0, std::vector<ValueVector> u0);

void euler_step(const Game& game, BRDState& brd, const DivisorSchedule& divisor, const RateSchedule& rates,
                const IntegratorConfig& cfg, TieBreaker& tie);

// psi = sum_s (u_s - f_{s,u}(x_s))_+ for player 0's estimates.
double psi_overestimation(const BRDState& brd, const Game& game);

struct BRDRun {
  Trajectory trajectory;
  BRDState final_state;
  EquilibriumReport report;
  // max(|u(0)|, |Gamma(0)|, |r|) + 1.
  double bound_M = 0.0;
  // Largest |u^i_s| and |Gamma^i_s| seen at any step.
  double max_abs_u = 0.0;
  double max_abs_gamma = 0.0;
  double max_simplex_violation = 0.0;
};

// Integrates to the horizon. The game must be a team game (identical interest
// included) or two-player zero-sum; anything else throws std::invalid_argument.
// `u0` is one row (broadcast, negated for player 1 in zero-sum games) or one
// row per player.
BRDRun run_brd(const Game& game, const IntegratorConfig& cfg, const DivisorSchedule& divisor,
               const RateSchedule& rates, std::vector<ValueVector> u0, const MixedProfile& x0);

}  // namespace sgplay
