#include "sgplay/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sgplay/kernels.hpp"

namespace sgplay {
namespace {

std::span<const double> row_for(std::span<const ValueVector> u, int player) {
  return u.size() == 1 ? std::span<const double>(u[0]) : std::span<const double>(u[player]);
}

}  // namespace

std::vector<double> optimality_gap(const Game& game, std::span<const ValueVector> u, const MixedProfile& x,
                                   int state) {
  std::vector<double> gaps(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    const auto ui = row_for(u, i);
    const auto payoffs = pure_action_payoffs(game, i, state, ui, x.state(state));
    const double best = *std::max_element(payoffs.begin(), payoffs.end());
    gaps[i] = std::max(0.0, best - shapley_payoff(game, i, state, ui, x.state(state)));
  }
  return gaps;
}

double duality_gap(const Game& game, std::span<const double> u, const MixedProfile& x, int state) {
  if (game.num_players() != 2 || !classify(game, 1e-9).zero_sum) {
    throw std::invalid_argument("duality gap requires a two-player zero-sum game");
  }
  const auto row = pure_action_payoffs(game, 0, state, u, x.state(state));
  // Column player's pure replies, scored with player 0's payoff.
  const auto q = auxiliary_payoffs(game, 0, state, u);
  std::vector<double> w(game.num_joint_actions());
  double col_min = std::numeric_limits<double>::infinity();
  for (int a2 = 0; a2 < game.num_actions(1); ++a2) {
    joint_weights(game, x.state(state), w, 1, a2);
    col_min = std::min(col_min, kernels::dot(w, q));
  }
  const double row_max = *std::max_element(row.begin(), row.end());
  return std::max(0.0, row_max - col_min);
}

double energy_w(const Game& game, std::span<const double> u, const MixedProfile& x) {
  double w = std::numeric_limits<double>::infinity();
  for (int s = 0; s < game.num_states(); ++s) w = std::min(w, shapley_payoff(game, 0, s, u, x.state(s)) - u[s]);
  return w;
}

double overestimation(const Game& game, std::span<const double> u, const MixedProfile& x) {
  double psi = 0.0;
  for (int s = 0; s < game.num_states(); ++s) psi += std::max(0.0, u[s] - shapley_payoff(game, 0, s, u, x.state(s)));
  return psi;
}

double prior_deviation(std::span<const ValueVector> u, std::span<const double> offsets) {
  double dev = 0.0;
  for (std::size_t i = 1; i < u.size(); ++i) {
    for (std::size_t s = 0; s < u[i].size(); ++s) dev = std::max(dev, std::abs(u[i][s] - u[0][s] - offsets[i]));
  }
  return dev;
}

RecordLayout layout_for(const Game& game, bool per_player_estimates, bool continuous) {
  const GameClass cls = classify(game);
  RecordLayout layout;
  layout.per_player = per_player_estimates;
  layout.duality_gap = cls.zero_sum;
  layout.psi = continuous && cls.identical_interest && !per_player_estimates;
  layout.prior_dev = per_player_estimates && cls.team;
  layout.offsets = cls.offsets;
  return layout;
}

void apply_layout(Trajectory& traj, const RecordLayout& layout, bool has_state) {
  traj.per_player = layout.per_player;
  traj.has_state = has_state;
  traj.has_duality_gap = layout.duality_gap;
  traj.has_psi = layout.psi;
  traj.has_prior_dev = layout.prior_dev;
}

TrajectoryRecord make_record(const Game& game, std::span<const ValueVector> u, const MixedProfile& x, double t,
                             std::optional<int> state, const RecordLayout& layout) {
  TrajectoryRecord rec;
  rec.t = t;
  rec.state = state;
  if (layout.per_player) {
    rec.u.assign(u.begin(), u.end());
  } else {
    rec.u.push_back(u[0]);
  }
  const int n = game.num_states();
  const ValueVector& u0 = u[0];
  rec.gamma.resize(n);
  rec.bellman_gap.resize(n);
  rec.opt_gap.resize(n);
  for (int s = 0; s < n; ++s) {
    rec.gamma[s] = shapley_payoff(game, 0, s, u0, x.state(s));
    rec.bellman_gap[s] = rec.gamma[s] - u0[s];
    double total = 0.0;
    for (double g : optimality_gap(game, u, x, s)) total += g;
    rec.opt_gap[s] = total;
  }
  if (layout.duality_gap) {
    ValueVector w(n);
    for (int s = 0; s < n; ++s) w[s] = duality_gap(game, u0, x, s);
    rec.duality_gap = std::move(w);
  }
  if (layout.psi) rec.psi = overestimation(game, u0, x);
  if (layout.prior_dev) rec.prior_dev = prior_deviation(u, layout.offsets);
  return rec;
}

ConvergenceVerdict detect_convergence(const Trajectory& traj, std::size_t window, double tol) {
  if (window < 2) throw std::invalid_argument("convergence window must be at least 2");
  const auto& recs = traj.records;
  if (recs.size() < window) throw std::invalid_argument("trajectory shorter than convergence window");

  // Scan backwards, tracking the range of every u entry over [j, end).
  std::vector<double> lo;
  std::vector<double> hi;
  std::optional<std::size_t> first;
  for (std::size_t j = recs.size(); j-- > 0;) {
    const auto& rec = recs[j];
    bool ok = true;
    for (double d : rec.bellman_gap) ok = ok && std::abs(d) <= tol;
    std::size_t k = 0;
    for (const auto& row : rec.u) {
      for (double v : row) {
        if (k == lo.size()) {
          lo.push_back(v);
          hi.push_back(v);
        } else {
          lo[k] = std::min(lo[k], v);
          hi[k] = std::max(hi[k], v);
        }
        ok = ok && hi[k] - lo[k] <= tol;
        ++k;
      }
    }
    if (!ok) break;
    first = j;
  }
  ConvergenceVerdict verdict;
  if (first && *first + window <= recs.size()) {
    verdict.converged = true;
    verdict.first_index = first;
  }
  return verdict;
}

}  // namespace sgplay
