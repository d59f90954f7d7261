#pragma once

// Reference instances and seeded random games.

#include <cstdint>
#include <string>
#include <vector>

#include "sgplay/game.hpp"

namespace sgplay {

// The two-state, two-player, two-action identical-interest example with
// delta = 0.7. Entry [a0][a1] of the printed transition matrix for state k is
// read as the probability of moving to state 0, with player 0 choosing rows.
Game paper_instance();

// One-state zero-sum game; player 0 wins 1 on matching actions.
Game matching_pennies(double delta);

// One-state identical-interest game paying 1 on matching actions, 0 otherwise.
Game coordination(double delta);

enum class GameClassKind { kIdenticalInterest, kZeroSum, kTeam };

struct GeneratorSpec {
  GameClassKind kind = GameClassKind::kIdenticalInterest;
  int num_states = 2;
  std::vector<int> num_actions{2, 2};
  double delta = 0.7;
  std::uint64_t seed = 0;
  // Team offsets M_i, one per player; r^i = r + M_i.
  std::vector<double> offsets;
};

std::string kind_name(GameClassKind kind);
// Accepts "identical-interest", "zero-sum" and "team". Throws
// std::invalid_argument otherwise.
GameClassKind parse_kind(const std::string& name);

// Entries are drawn uniformly from [0, 1) on a 2^-32 grid, so team offsets
// with few significant bits are added without rounding. Transition rows are
// normalized. Throws std::invalid_argument on an inconsistent spec.
Game random_game(const GeneratorSpec& spec);

}  // namespace sgplay
