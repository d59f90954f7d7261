#pragma once

// Exact discounted values of stationary profiles and (epsilon-)equilibrium
// certification: a one-shot deviation check in the auxiliary games and a
// brute-force enumeration of pure stationary deviations.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "sgplay/game.hpp"

namespace sgplay {

// Gains below this magnitude are reported as zero.
inline constexpr double kGainNoiseFloor = 1e-12;

struct Deviation {
  int player = -1;
  // State of the one-shot deviation, or -1 for a stationary deviation.
  int state = -1;
  // Deviating pure action (one-shot) or pure stationary strategy per state.
  std::vector<int> actions;
  double gain = 0.0;
};

struct EquilibriumReport {
  bool is_epsilon_equilibrium = false;
  double epsilon = 0.0;
  Deviation worst_deviation;
  // Stationary value of the profile for every player, [player][state].
  std::vector<ValueVector> values;
};

class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Solves A z = b in place by Gaussian elimination with partial pivoting; A is
// n x n row-major. Throws SingularSystemError on a zero pivot.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b);

// Unique solution of u_s = (1 - delta) r^i_s(x_s) + delta sum_s' P_ss'(x_s) u_s'.
ValueVector stationary_value(const Game& game, int player, const MixedProfile& x);

EquilibriumReport one_shot_deviation_check(const Game& game, const MixedProfile& x, double epsilon);

inline constexpr std::int64_t kDefaultEnumerationCap = 1'000'000;

// Enumerates every pure stationary strategy of every player. Throws
// std::length_error when |A^i|^|S| exceeds `cap` for some player.
EquilibriumReport brute_deviation_check(const Game& game, const MixedProfile& x, double epsilon,
                                        std::int64_t cap = kDefaultEnumerationCap);

// Delta_s = f_{s,u}(x_s) - u_s for player 0's payoff.
ValueVector bellman_residuals(const Game& game, std::span<const double> u, const MixedProfile& x);

}  // namespace sgplay
