#pragma once

// Discrete-time fictitious play in the auxiliary Shapley games.
//
// Every procedure keeps, per state, the players' empirical actions x_s and the
// continuation-payoff estimates u. Players best-respond in the auxiliary game
// at (s, u^i) to the opponents' empirical actions.
//
//   synchronous    every state is played and updated at every step
//   asynchronous   only the current state is played; x moves at the current
//                  state, u moves at every state with step alpha_n / sigma_n
//   visit-indexed  as asynchronous, but u moves only at the current state with
//                  weights 1 / a(k) indexed by the visit count

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "sgplay/diagnostics.hpp"
#include "sgplay/game.hpp"
#include "sgplay/schedule.hpp"

namespace sgplay {

enum class FPProcedure { kSynchronous, kAsynchronous, kVisitIndexed };

// When the asynchronous procedures pick the next action. kAfterUpdate chooses
// a_{n+1} at the end of step n against x_{n+1} with the estimates u_n that were
// current before the update (the doubling-trick ordering). kStartOfStep
// chooses a_n at the start of step n against (x_n, u_n).
enum class ActionTiming { kAfterUpdate, kStartOfStep };

struct FPState {
  std::int64_t n = 0;
  MixedProfile x;
  // [player][state].
  std::vector<ValueVector> u;
  std::vector<std::int64_t> counts;
  int current_state = 0;
  // sigma_{n-1}; zero before the first step.
  double sigma = 0.0;
  // Visit-indexed accumulator W_s = sum_k 1 / a(k).
  std::vector<double> visit_weight;
  // Joint action (per-player indices) already chosen for current_state.
  std::optional<std::vector<int>> pending;
};

// Broadcasts a single prior to every player.
FPState make_fp_state(const Game& game, const MixedProfile& x0, const ValueVector& u0, int initial_state = 0);
FPState make_fp_state(const Game& game, const MixedProfile& x0, std::vector<ValueVector> u0,
                      int initial_state = 0);

void sfp_step(const Game& game, FPState& fp, const StepSchedule& schedule, TieBreaker& tie);

void afp_step(const Game& game, FPState& fp, const StepSchedule& schedule, std::mt19937_64& rng,
              TieBreaker& tie, ActionTiming timing = ActionTiming::kAfterUpdate);

void afp_visit_indexed_step(const Game& game, FPState& fp, const DivisorSchedule& weights, std::mt19937_64& rng,
                            TieBreaker& tie, ActionTiming timing = ActionTiming::kAfterUpdate);

struct RunConfig {
  FPProcedure procedure = FPProcedure::kAsynchronous;
  std::int64_t steps = 1000;
  std::uint64_t seed = 0;
  TieBreaker::Rule tie_rule = TieBreaker::Rule::kLowestIndex;
  // Empty means the lowest-index pure profile.
  std::optional<MixedProfile> prior_x;
  // One row broadcast to every player, or one row per player. Empty means 0.
  std::vector<ValueVector> prior_u;
  // Record per-player estimates (required for differing priors).
  bool per_player_priors = false;
  // Record every `record_stride` steps; 0 keeps only the initial and final
  // records.
  std::int64_t record_stride = 0;
  int initial_state = 0;
  ActionTiming action_timing = ActionTiming::kAfterUpdate;
  StepSchedule schedule = StepSchedule::constant_one();
  // Visit weights a(k) for the visit-indexed procedure.
  DivisorSchedule visit_weights = DivisorSchedule::one();
  // Called once per distinct warning.
  std::function<void(const std::string&)> warn;
};

struct FPRun {
  Trajectory trajectory;
  FPState final_state;
  // Largest simplex violation of x and largest |u| seen over all steps.
  double max_simplex_violation = 0.0;
  double max_abs_u = 0.0;
};

FPRun run_fp(const Game& game, const RunConfig& config);

// Smallest n with exp(-beta_minus * sum_{k<=n} alpha / sigma_k) * 2M <= 4 delta M alpha,
// sigma_k from `schedule`. Returns `limit` if no n < limit qualifies.
std::int64_t doubling_trigger(double alpha, double beta_minus, double M, double delta,
                              const StepSchedule& schedule = StepSchedule::constant_one(),
                              std::int64_t limit = 1'000'000'000);

// Empirical minimum state frequency over `steps` transitions of the chain
// driven by uniformly random joint actions, clamped to (0, 1].
double calibrate_beta_minus(const Game& game, std::uint64_t seed, std::int64_t steps = 10'000);

struct DoublingRun {
  Trajectory trajectory;
  FPState final_state;
  double alpha = 1.0;
  double beta_minus = 1.0;
  double M = 0.0;
  // Steps n at which alpha was halved.
  std::vector<std::int64_t> halvings;
  // Duality gap per state at the final profile.
  ValueVector final_duality_gap;
  double max_simplex_violation = 0.0;
  double max_abs_u = 0.0;
};

// FP with the doubling trick for two-player zero-sum games. Throws
// std::invalid_argument for any other game. `beta_minus` <= 0 triggers the
// calibration above.
DoublingRun run_doubling_zero_sum(const Game& game, const RunConfig& config, double beta_minus = 0.0);

}  // namespace sgplay
