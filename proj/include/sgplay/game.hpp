#pragma once

// Finite discounted stochastic games: storage, multilinear extension of
// rewards and transitions to mixed profiles, the auxiliary (Shapley) stage
// game and best responses in it.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sgplay {

// Per-state continuation payoffs, indexed [state].
using ValueVector = std::vector<double>;

// Flat joint-action indexing, lexicographic with player 0 most significant.
class JointActionIndexer {
 public:
  JointActionIndexer() = default;
  explicit JointActionIndexer(std::vector<int> num_actions);

  int num_players() const { return static_cast<int>(num_actions_.size()); }
  int size() const { return size_; }
  std::span<const int> num_actions() const { return num_actions_; }
  int stride(int player) const { return strides_[player]; }

  int flat(std::span<const int> actions) const;
  std::vector<int> unflat(int index) const;
  int action_of(int index, int player) const {
    return (index / strides_[player]) % num_actions_[player];
  }

 private:
  std::vector<int> num_actions_;
  std::vector<int> strides_;
  int size_ = 0;
};

class Game {
 public:
  Game() = default;

  // rewards: [player][state][joint], transitions: [state][joint][next].
  // Throws std::invalid_argument on shape errors or empty action sets. Value
  // invariants (stochastic rows, discount range) are reported by
  // validate_game, never enforced here.
  Game(int num_states, std::vector<int> num_actions, double delta,
       std::vector<double> rewards, std::vector<double> transitions);

  int num_states() const { return num_states_; }
  int num_players() const { return joint_.num_players(); }
  int num_actions(int player) const { return joint_.num_actions()[player]; }
  std::span<const int> num_actions() const { return joint_.num_actions(); }
  int num_joint_actions() const { return joint_.size(); }
  // Total length of a per-state profile slice: sum_i |A^i|.
  int profile_width() const { return profile_width_; }
  int action_offset(int player) const { return action_offsets_[player]; }
  double delta() const { return delta_; }
  const JointActionIndexer& joint() const { return joint_; }

  double reward(int player, int state, int joint) const {
    return rewards_[(static_cast<std::size_t>(player) * num_states_ + state) * joint_.size() + joint];
  }
  std::span<const double> rewards(int player, int state) const;
  std::span<const double> transition_row(int state, int joint) const;
  std::span<const double> transitions(int state) const;

  std::span<const double> raw_rewards() const { return rewards_; }
  std::span<const double> raw_transitions() const { return transitions_; }

  double max_abs_reward() const;

  // Returns a copy whose transition rows are divided by their sums. Rows with
  // a non-positive sum are left untouched.
  Game with_renormalized_transitions() const;

 private:
  int num_states_ = 0;
  JointActionIndexer joint_;
  std::vector<int> action_offsets_;
  int profile_width_ = 0;
  double delta_ = 0.0;
  std::vector<double> rewards_;
  std::vector<double> transitions_;
};

// One mixed action per player per state, stored as x[state][player][action].
class MixedProfile {
 public:
  MixedProfile() = default;
  explicit MixedProfile(const Game& game);  // all zeros

  static MixedProfile uniform(const Game& game);
  // Every player plays `action` (clamped to its action count) at every state.
  static MixedProfile pure(const Game& game, int action = 0);

  int num_states() const { return num_states_; }
  int num_players() const { return static_cast<int>(num_actions_.size()); }
  int num_actions(int player) const { return num_actions_[player]; }

  std::span<double> at(int state, int player) {
    return {data_.data() + state * width_ + offsets_[player], static_cast<std::size_t>(num_actions_[player])};
  }
  std::span<const double> at(int state, int player) const {
    return {data_.data() + state * width_ + offsets_[player], static_cast<std::size_t>(num_actions_[player])};
  }
  // Concatenated mixed actions of all players at `state`.
  std::span<double> state(int s) { return {data_.data() + s * width_, static_cast<std::size_t>(width_)}; }
  std::span<const double> state(int s) const {
    return {data_.data() + s * width_, static_cast<std::size_t>(width_)};
  }

  std::span<const double> raw() const { return data_; }

  // Largest deviation of any slice from the simplex (negative mass or sum).
  double simplex_violation() const;

  bool operator==(const MixedProfile&) const = default;

 private:
  int num_states_ = 0;
  int width_ = 0;
  std::vector<int> num_actions_;
  std::vector<int> offsets_;
  std::vector<double> data_;
};

// Tie-breaking among equally good pure actions. Lowest-index is stateless; the
// seeded variant draws uniformly among the tied actions from its own stream.
class TieBreaker {
 public:
  enum class Rule { kLowestIndex, kSeededRandom };

  TieBreaker() = default;
  static TieBreaker lowest_index() { return TieBreaker(); }
  static TieBreaker seeded(std::uint64_t seed);

  Rule rule() const { return rule_; }
  // `tied` is non-empty and sorted ascending.
  int pick(std::span<const int> tied);

 private:
  Rule rule_ = Rule::kLowestIndex;
  std::mt19937_64 rng_;
};

struct Violation {
  std::string path;
  std::string message;
};

// Empty iff every Game invariant holds (stochastic rows within 1e-9,
// 0 < delta < 1, finite rewards).
std::vector<Violation> validate_game(const Game& game);

// Game classes by reward structure, exact up to `tol`.
struct GameClass {
  bool identical_interest = false;
  bool zero_sum = false;
  bool team = false;
  // r^i = r^0 + offsets[i] when team is true.
  std::vector<double> offsets;
};
GameClass classify(const Game& game, double tol = 1e-12);

// Probability of every joint action under the product of the per-player mixed
// actions in `x_s`. If `player` >= 0 its mixed action is replaced by the pure
// action `own_action`.
void joint_weights(const Game& game, std::span<const double> x_s, std::span<double> out,
                   int player = -1, int own_action = 0);

double extend_reward(const Game& game, int player, int state, std::span<const double> x_s);
ValueVector extend_transition(const Game& game, int state, std::span<const double> x_s);

// Per-joint-action auxiliary payoff (1 - delta) r^i_s(a) + delta P_s(a) . u.
std::vector<double> auxiliary_payoffs(const Game& game, int player, int state, std::span<const double> u);

// f^i_{s,u}(x_s) = (1 - delta) r^i_s(x_s) + delta sum_s' P_ss'(x_s) u_s'.
double shapley_payoff(const Game& game, int player, int state, std::span<const double> u,
                      std::span<const double> x_s);

struct BestResponse {
  int action = 0;
  double value = 0.0;
};

// Pure best response of `player` in the auxiliary game at (state, u) against
// the other players' mixed actions in `x_s` (the player's own slice is
// ignored).
BestResponse best_response(const Game& game, int player, int state, std::span<const double> u,
                           std::span<const double> x_s, TieBreaker& tie);

// Auxiliary payoff of every pure action of `player` against x_s^{-i}.
std::vector<double> pure_action_payoffs(const Game& game, int player, int state,
                                        std::span<const double> u, std::span<const double> x_s);

// 53-bit uniform draw in [0, 1) from a 64-bit engine output; portable across
// standard libraries.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int sample_transition(const Game& game, int state, int joint, std::mt19937_64& rng);

struct ErgodicityResult {
  bool ergodic = false;
  // Smallest T with every state reaching every state in exactly T steps.
  int steps = 0;
  // A pair (from, to) that is unreachable at the largest tested power.
  std::pair<int, int> witness{-1, -1};
};
ErgodicityResult is_ergodic(const Game& game);

// FNV-1a hash of the game's dimensions, discount and tensors.
std::uint64_t fingerprint(const Game& game);

}  // namespace sgplay
