#include "sgplay/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sgplay/kernels.hpp"

namespace sgplay {
namespace {

double clean_gain(double g) { return g < kGainNoiseFloor ? 0.0 : g; }

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

// Stationary value from per-state rewards r(x) and the induced chain P(x).
ValueVector solve_bellman(const Game& game, const std::vector<double>& chain, const std::vector<double>& reward) {
  const int n = game.num_states();
  const double delta = game.delta();
  std::vector<double> a(static_cast<std::size_t>(n) * n);
  std::vector<double> b(n);
  for (int s = 0; s < n; ++s) {
    for (int t = 0; t < n; ++t) a[s * n + t] = (s == t ? 1.0 : 0.0) - delta * chain[s * n + t];
    b[s] = (1.0 - delta) * reward[s];
  }
  ValueVector u = solve_dense(a, b);
  double residual = 0.0;
  for (int s = 0; s < n; ++s) {
    const double lhs = kernels::dot(std::span<const double>(a).subspan(s * n, n), u);
    residual = std::max(residual, std::abs(lhs - b[s]));
  }
  if (!(residual <= 1e-10 * (1.0 + max_abs(u)))) {
    throw SingularSystemError("stationary value residual too large; numerical corruption");
  }
  return u;
}

}  // namespace

std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  if (a.size() != n * n) throw std::invalid_argument("matrix/vector dimension mismatch");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    }
    if (a[pivot * n + col] == 0.0 || !std::isfinite(a[pivot * n + col])) {
      throw SingularSystemError("singular linear system");
    }
    if (pivot != col) {
      std::swap_ranges(a.begin() + col * n, a.begin() + (col + 1) * n, a.begin() + pivot * n);
      std::swap(b[col], b[pivot]);
    }
    const std::span<const double> pivot_row(a.data() + col * n, n);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r * n + col] / a[col * n + col];
      if (factor == 0.0) continue;
      kernels::axpy(-factor, pivot_row, std::span<double>(a.data() + r * n, n));
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> z(n);
  for (std::size_t r = n; r-- > 0;) {
    double acc = b[r];
    for (std::size_t c = r + 1; c < n; ++c) acc -= a[r * n + c] * z[c];
    z[r] = acc / a[r * n + r];
  }
  return z;
}

ValueVector stationary_value(const Game& game, int player, const MixedProfile& x) {
  const int n = game.num_states();
  std::vector<double> chain(static_cast<std::size_t>(n) * n);
  std::vector<double> reward(n);
  for (int s = 0; s < n; ++s) {
    const auto row = extend_transition(game, s, x.state(s));
    std::copy(row.begin(), row.end(), chain.begin() + s * n);
    reward[s] = extend_reward(game, player, s, x.state(s));
  }
  return solve_bellman(game, chain, reward);
}

EquilibriumReport one_shot_deviation_check(const Game& game, const MixedProfile& x, double epsilon) {
  EquilibriumReport report;
  report.epsilon = epsilon;
  report.worst_deviation.gain = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < game.num_players(); ++i) {
    report.values.push_back(stationary_value(game, i, x));
    const ValueVector& u = report.values.back();
    for (int s = 0; s < game.num_states(); ++s) {
      const auto payoffs = pure_action_payoffs(game, i, s, u, x.state(s));
      const auto best = std::max_element(payoffs.begin(), payoffs.end());
      const double gain = *best - shapley_payoff(game, i, s, u, x.state(s));
      if (gain > report.worst_deviation.gain) {
        report.worst_deviation = {i, s, {static_cast<int>(best - payoffs.begin())}, gain};
      }
    }
  }
  report.worst_deviation.gain = clean_gain(report.worst_deviation.gain);
  report.is_epsilon_equilibrium = report.worst_deviation.gain <= epsilon;
  return report;
}

EquilibriumReport brute_deviation_check(const Game& game, const MixedProfile& x, double epsilon,
                                        std::int64_t cap) {
  const int n = game.num_states();
  for (int i = 0; i < game.num_players(); ++i) {
    double count = std::pow(static_cast<double>(game.num_actions(i)), n);
    if (count > static_cast<double>(cap)) {
      throw std::length_error("pure stationary strategy enumeration exceeds cap");
    }
  }
  EquilibriumReport report;
  report.epsilon = epsilon;
  report.worst_deviation.gain = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < game.num_players(); ++i) {
    report.values.push_back(stationary_value(game, i, x));
    const ValueVector& base = report.values.back();
    std::vector<int> b(n, 0);
    MixedProfile deviated = x;
    for (;;) {
      for (int s = 0; s < n; ++s) {
        auto slice = deviated.at(s, i);
        std::fill(slice.begin(), slice.end(), 0.0);
        slice[b[s]] = 1.0;
      }
      const ValueVector v = stationary_value(game, i, deviated);
      double gain = -std::numeric_limits<double>::infinity();
      for (int s = 0; s < n; ++s) gain = std::max(gain, v[s] - base[s]);
      if (gain > report.worst_deviation.gain) report.worst_deviation = {i, -1, b, gain};
      // Odometer over (A^i)^S.
      int pos = 0;
      while (pos < n && ++b[pos] == game.num_actions(i)) b[pos++] = 0;
      if (pos == n) break;
    }
  }
  report.worst_deviation.gain = clean_gain(report.worst_deviation.gain);
  report.is_epsilon_equilibrium = report.worst_deviation.gain <= epsilon;
  return report;
}

ValueVector bellman_residuals(const Game& game, std::span<const double> u, const MixedProfile& x) {
  ValueVector out(game.num_states());
  for (int s = 0; s < game.num_states(); ++s) out[s] = shapley_payoff(game, 0, s, u, x.state(s)) - u[s];
  return out;
}

}  // namespace sgplay
