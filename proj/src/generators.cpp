#include "sgplay/generators.hpp"

#include <random>
#include <stdexcept>

namespace sgplay {
namespace {

double grid_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 32) * 0x1.0p-32; }

}  // namespace

Game paper_instance() {
  const double p[2][2][2] = {{{0.09, 0.05}, {0.95, 0.79}}, {{0.20, 0.66}, {0.79, 0.54}}};
  const double r[2][2][2] = {{{0.65, 0.37}, {0.00, 0.73}}, {{0.19, 0.07}, {0.30, 0.07}}};
  std::vector<double> rewards;
  std::vector<double> transitions;
  for (int player = 0; player < 2; ++player) {
    for (int s = 0; s < 2; ++s) {
      for (int a0 = 0; a0 < 2; ++a0) {
        for (int a1 = 0; a1 < 2; ++a1) rewards.push_back(r[s][a0][a1]);
      }
    }
  }
  for (int s = 0; s < 2; ++s) {
    for (int a0 = 0; a0 < 2; ++a0) {
      for (int a1 = 0; a1 < 2; ++a1) {
        transitions.push_back(p[s][a0][a1]);
        transitions.push_back(1.0 - p[s][a0][a1]);
      }
    }
  }
  return Game(2, {2, 2}, 0.7, std::move(rewards), std::move(transitions));
}

Game matching_pennies(double delta) {
  std::vector<double> rewards{1.0, -1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0};
  return Game(1, {2, 2}, delta, std::move(rewards), std::vector<double>(4, 1.0));
}

Game coordination(double delta) {
  std::vector<double> rewards{1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0};
  return Game(1, {2, 2}, delta, std::move(rewards), std::vector<double>(4, 1.0));
}

std::string kind_name(GameClassKind kind) {
  switch (kind) {
    case GameClassKind::kIdenticalInterest:
      return "identical-interest";
    case GameClassKind::kZeroSum:
      return "zero-sum";
    case GameClassKind::kTeam:
      return "team";
  }
  return "unknown";
}

GameClassKind parse_kind(const std::string& name) {
  if (name == "identical-interest" || name == "identical") return GameClassKind::kIdenticalInterest;
  if (name == "zero-sum") return GameClassKind::kZeroSum;
  if (name == "team") return GameClassKind::kTeam;
  throw std::invalid_argument("unknown game class: " + name);
}

Game random_game(const GeneratorSpec& spec) {
  if (spec.num_states <= 0) throw std::invalid_argument("num_states must be positive");
  if (spec.num_actions.empty()) throw std::invalid_argument("need at least one player");
  for (int a : spec.num_actions) {
    if (a <= 0) throw std::invalid_argument("action counts must be positive");
  }
  if (!(spec.delta > 0.0 && spec.delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  const int players = static_cast<int>(spec.num_actions.size());
  if (spec.kind == GameClassKind::kZeroSum && players != 2) {
    throw std::invalid_argument("zero-sum games need exactly two players");
  }
  std::vector<double> offsets(players, 0.0);
  if (spec.kind == GameClassKind::kTeam) {
    if (spec.offsets.size() != static_cast<std::size_t>(players)) {
      throw std::invalid_argument("team games need one offset per player");
    }
    offsets = spec.offsets;
  }

  const JointActionIndexer joint(spec.num_actions);
  const std::size_t n = spec.num_states;
  const std::size_t m = joint.size();
  std::mt19937_64 rng(spec.seed);

  std::vector<double> common(n * m);
  for (double& v : common) v = grid_uniform(rng);
  std::vector<double> transitions(n * m * n);
  for (std::size_t row = 0; row < n * m; ++row) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      // Strictly positive entries keep every generated chain ergodic.
      transitions[row * n + k] = grid_uniform(rng) + 0x1.0p-32;
      sum += transitions[row * n + k];
    }
    for (std::size_t k = 0; k < n; ++k) transitions[row * n + k] /= sum;
  }

  std::vector<double> rewards(players * n * m);
  for (int i = 0; i < players; ++i) {
    for (std::size_t e = 0; e < n * m; ++e) {
      double v = common[e];
      if (spec.kind == GameClassKind::kZeroSum && i == 1) v = -v;
      if (spec.kind == GameClassKind::kTeam) v += offsets[i];
      rewards[i * n * m + e] = v;
    }
  }
  return Game(spec.num_states, spec.num_actions, spec.delta, std::move(rewards), std::move(transitions));
}

}  // namespace sgplay
