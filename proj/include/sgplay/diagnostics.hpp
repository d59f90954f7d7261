#pragma once

// Convergence measures along learning trajectories and the Trajectory record
// shared by every runner.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgplay/game.hpp"

namespace sgplay {

struct TrajectoryRecord {
  // Step index for discrete runs, time for continuous ones.
  double t = 0.0;
  std::optional<int> state;
  // [player][state]; a single row unless the run keeps per-player estimates.
  std::vector<ValueVector> u;
  ValueVector gamma;
  ValueVector bellman_gap;
  ValueVector opt_gap;
  std::optional<ValueVector> duality_gap;
  std::optional<double> psi;
  std::optional<double> prior_dev;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  std::map<std::string, std::string> metadata;
  // Column layout; fixed for the whole run.
  bool per_player = false;
  bool has_state = false;
  bool has_duality_gap = false;
  bool has_psi = false;
  bool has_prior_dev = false;
};

// Delta^i_s = max_y f^i_{s,u^i}(y, x^{-i}_s) - f^i_{s,u^i}(x_s) for every
// player; u is [player][state] or a single shared row.
std::vector<double> optimality_gap(const Game& game, std::span<const ValueVector> u, const MixedProfile& x,
                                   int state);

// w_s = max_{a1} f_{s,u}(a1, x^2_s) - min_{a2} f_{s,u}(x^1_s, a2) with player
// 0's payoff. Throws std::invalid_argument for non zero-sum games.
double duality_gap(const Game& game, std::span<const double> u, const MixedProfile& x, int state);

// w = min_s (f_{s,u}(x_s) - u_s).
double energy_w(const Game& game, std::span<const double> u, const MixedProfile& x);

// psi = sum_s max(0, u_s - f_{s,u}(x_s)).
double overestimation(const Game& game, std::span<const double> u, const MixedProfile& x);

// max_{i,s} |u^i_s - u^0_s - offsets[i]|.
double prior_deviation(std::span<const ValueVector> u, std::span<const double> offsets);

struct RecordLayout {
  bool per_player = false;
  bool duality_gap = false;
  bool psi = false;
  bool prior_dev = false;
  std::vector<double> offsets;
};

RecordLayout layout_for(const Game& game, bool per_player_estimates, bool continuous);
void apply_layout(Trajectory& traj, const RecordLayout& layout, bool has_state);

TrajectoryRecord make_record(const Game& game, std::span<const ValueVector> u, const MixedProfile& x, double t,
                             std::optional<int> state, const RecordLayout& layout);

struct ConvergenceVerdict {
  bool converged = false;
  // Earliest record index from which every later record satisfies the
  // criterion.
  std::optional<std::size_t> first_index;
};

inline constexpr std::size_t kDefaultWindow = 100;
inline constexpr double kDefaultTolerance = 1e-3;

// Converged iff over the trailing `window` records max_s |Delta_s| <= tol and
// every u_s varies by at most tol. Throws std::invalid_argument when
// window < 2 or the trajectory is shorter than the window.
ConvergenceVerdict detect_convergence(const Trajectory& traj, std::size_t window = kDefaultWindow,
                                      double tol = kDefaultTolerance);

}  // namespace sgplay
