#include "sgplay/game.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sgplay/kernels.hpp"

namespace sgplay {

JointActionIndexer::JointActionIndexer(std::vector<int> num_actions) : num_actions_(std::move(num_actions)) {
  strides_.assign(num_actions_.size(), 1);
  size_ = 1;
  for (int i = static_cast<int>(num_actions_.size()) - 1; i >= 0; --i) {
    if (num_actions_[i] <= 0) throw std::invalid_argument("every player needs at least one action");
    strides_[i] = size_;
    size_ *= num_actions_[i];
  }
}

int JointActionIndexer::flat(std::span<const int> actions) const {
  if (actions.size() != num_actions_.size()) throw std::invalid_argument("joint action has wrong arity");
  int index = 0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] < 0 || actions[i] >= num_actions_[i]) throw std::out_of_range("action index out of range");
    index += actions[i] * strides_[i];
  }
  return index;
}

std::vector<int> JointActionIndexer::unflat(int index) const {
  if (index < 0 || index >= size_) throw std::out_of_range("joint index out of range");
  std::vector<int> actions(num_actions_.size());
  for (std::size_t i = 0; i < actions.size(); ++i) actions[i] = action_of(index, static_cast<int>(i));
  return actions;
}

Game::Game(int num_states, std::vector<int> num_actions, double delta, std::vector<double> rewards,
           std::vector<double> transitions)
    : num_states_(num_states),
      delta_(delta),
      rewards_(std::move(rewards)),
      transitions_(std::move(transitions)) {
  if (num_states <= 0) throw std::invalid_argument("num_states must be positive");
  if (num_actions.empty()) throw std::invalid_argument("a game needs at least one player");
  joint_ = JointActionIndexer(std::move(num_actions));
  action_offsets_.resize(joint_.num_players());
  profile_width_ = 0;
  for (int i = 0; i < joint_.num_players(); ++i) {
    action_offsets_[i] = profile_width_;
    profile_width_ += joint_.num_actions()[i];
  }
  const std::size_t joint = joint_.size();
  const std::size_t states = num_states_;
  if (rewards_.size() != joint_.num_players() * states * joint) {
    throw std::invalid_argument("rewards tensor has wrong size");
  }
  if (transitions_.size() != states * joint * states) {
    throw std::invalid_argument("transitions tensor has wrong size");
  }
}

std::span<const double> Game::rewards(int player, int state) const {
  const std::size_t joint = joint_.size();
  return {rewards_.data() + (static_cast<std::size_t>(player) * num_states_ + state) * joint, joint};
}

std::span<const double> Game::transition_row(int state, int joint) const {
  const std::size_t s = num_states_;
  return {transitions_.data() + (static_cast<std::size_t>(state) * joint_.size() + joint) * s, s};
}

std::span<const double> Game::transitions(int state) const {
  const std::size_t block = static_cast<std::size_t>(joint_.size()) * num_states_;
  return {transitions_.data() + state * block, block};
}

double Game::max_abs_reward() const {
  double m = 0.0;
  for (double r : rewards_) m = std::max(m, std::abs(r));
  return m;
}

Game Game::with_renormalized_transitions() const {
  std::vector<double> t = transitions_;
  const std::size_t s = num_states_;
  for (std::size_t row = 0; row < t.size() / s; ++row) {
    double sum = 0.0;
    for (std::size_t k = 0; k < s; ++k) sum += t[row * s + k];
    if (sum > 0.0) {
      for (std::size_t k = 0; k < s; ++k) t[row * s + k] /= sum;
    }
  }
  std::vector<int> actions(joint_.num_actions().begin(), joint_.num_actions().end());
  return Game(num_states_, std::move(actions), delta_, rewards_, std::move(t));
}

MixedProfile::MixedProfile(const Game& game)
    : num_states_(game.num_states()),
      width_(game.profile_width()),
      num_actions_(game.num_actions().begin(), game.num_actions().end()) {
  offsets_.resize(num_actions_.size());
  for (int i = 0; i < game.num_players(); ++i) offsets_[i] = game.action_offset(i);
  data_.assign(static_cast<std::size_t>(num_states_) * width_, 0.0);
}

MixedProfile MixedProfile::uniform(const Game& game) {
  MixedProfile x(game);
  for (int s = 0; s < game.num_states(); ++s) {
    for (int i = 0; i < game.num_players(); ++i) {
      auto slice = x.at(s, i);
      std::fill(slice.begin(), slice.end(), 1.0 / static_cast<double>(slice.size()));
    }
  }
  return x;
}

MixedProfile MixedProfile::pure(const Game& game, int action) {
  MixedProfile x(game);
  for (int s = 0; s < game.num_states(); ++s) {
    for (int i = 0; i < game.num_players(); ++i) {
      x.at(s, i)[std::clamp(action, 0, game.num_actions(i) - 1)] = 1.0;
    }
  }
  return x;
}

double MixedProfile::simplex_violation() const {
  double worst = 0.0;
  for (int s = 0; s < num_states_; ++s) {
    for (int i = 0; i < num_players(); ++i) {
      double sum = 0.0;
      for (double p : at(s, i)) {
        worst = std::max(worst, -p);
        sum += p;
      }
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  }
  return worst;
}

TieBreaker TieBreaker::seeded(std::uint64_t seed) {
  TieBreaker t;
  t.rule_ = Rule::kSeededRandom;
  t.rng_.seed(seed);
  return t;
}

int TieBreaker::pick(std::span<const int> tied) {
  if (tied.size() == 1 || rule_ == Rule::kLowestIndex) return tied.front();
  const auto k = static_cast<std::size_t>(uniform01(rng_) * static_cast<double>(tied.size()));
  return tied[std::min(k, tied.size() - 1)];
}

std::vector<Violation> validate_game(const Game& game) {
  std::vector<Violation> report;
  if (!(game.delta() > 0.0 && game.delta() < 1.0)) {
    std::ostringstream msg;
    msg << "delta out of (0,1): " << game.delta();
    report.push_back({"delta", msg.str()});
  }
  for (int i = 0; i < game.num_players(); ++i) {
    for (int s = 0; s < game.num_states(); ++s) {
      const auto r = game.rewards(i, s);
      for (std::size_t a = 0; a < r.size(); ++a) {
        if (!std::isfinite(r[a])) {
          std::ostringstream path;
          path << "rewards[" << i << "][" << s << "][" << a << "]";
          report.push_back({path.str(), "reward is not finite"});
        }
      }
    }
  }
  for (int s = 0; s < game.num_states(); ++s) {
    for (int a = 0; a < game.num_joint_actions(); ++a) {
      const auto row = game.transition_row(s, a);
      double sum = 0.0;
      bool negative = false;
      bool finite = true;
      for (double p : row) {
        sum += p;
        negative = negative || p < 0.0;
        finite = finite && std::isfinite(p);
      }
      std::ostringstream path;
      path << "transitions[" << s << "][" << a << "]";
      if (!finite) {
        report.push_back({path.str(), "transition entry is not finite"});
      } else if (negative) {
        report.push_back({path.str(), "negative transition probability"});
      } else if (std::abs(sum - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "transition row sums to " << sum;
        report.push_back({path.str(), msg.str()});
      }
    }
  }
  return report;
}

GameClass classify(const Game& game, double tol) {
  GameClass c;
  const int players = game.num_players();
  c.team = true;
  c.offsets.assign(players, 0.0);
  for (int i = 1; i < players; ++i) {
    const double offset = game.reward(i, 0, 0) - game.reward(0, 0, 0);
    c.offsets[i] = offset;
    for (int s = 0; s < game.num_states() && c.team; ++s) {
      for (int a = 0; a < game.num_joint_actions(); ++a) {
        if (std::abs(game.reward(i, s, a) - game.reward(0, s, a) - offset) > tol) {
          c.team = false;
          break;
        }
      }
    }
  }
  if (!c.team) c.offsets.clear();
  c.identical_interest = c.team && std::all_of(c.offsets.begin(), c.offsets.end(),
                                               [tol](double m) { return std::abs(m) <= tol; });
  if (players == 2) {
    c.zero_sum = true;
    for (int s = 0; s < game.num_states() && c.zero_sum; ++s) {
      for (int a = 0; a < game.num_joint_actions(); ++a) {
        if (std::abs(game.reward(0, s, a) + game.reward(1, s, a)) > tol) {
          c.zero_sum = false;
          break;
        }
      }
    }
  }
  return c;
}

void joint_weights(const Game& game, std::span<const double> x_s, std::span<double> out, int player,
                   int own_action) {
  if (x_s.size() != static_cast<std::size_t>(game.profile_width())) {
    throw std::invalid_argument("state profile has wrong dimension");
  }
  if (out.size() != static_cast<std::size_t>(game.num_joint_actions())) {
    throw std::invalid_argument("weight buffer has wrong dimension");
  }
  // Expand player by player; player 0 ends up most significant.
  std::size_t filled = 1;
  out[0] = 1.0;
  for (int i = 0; i < game.num_players(); ++i) {
    const int n = game.num_actions(i);
    const double* xi = x_s.data() + game.action_offset(i);
    for (std::size_t k = filled; k-- > 0;) {
      const double w = out[k];
      for (int a = n - 1; a >= 0; --a) {
        double p = xi[a];
        if (i == player) p = (a == own_action) ? 1.0 : 0.0;
        out[k * n + a] = w * p;
      }
    }
    filled *= n;
  }
}

double extend_reward(const Game& game, int player, int state, std::span<const double> x_s) {
  std::vector<double> w(game.num_joint_actions());
  joint_weights(game, x_s, w);
  return kernels::dot(w, game.rewards(player, state));
}

ValueVector extend_transition(const Game& game, int state, std::span<const double> x_s) {
  std::vector<double> w(game.num_joint_actions());
  joint_weights(game, x_s, w);
  ValueVector out(game.num_states(), 0.0);
  for (int a = 0; a < game.num_joint_actions(); ++a) {
    if (w[a] != 0.0) kernels::axpy(w[a], game.transition_row(state, a), out);
  }
  return out;
}

std::vector<double> auxiliary_payoffs(const Game& game, int player, int state, std::span<const double> u) {
  if (u.size() != static_cast<std::size_t>(game.num_states())) {
    throw std::invalid_argument("continuation vector has wrong dimension");
  }
  const double delta = game.delta();
  const auto r = game.rewards(player, state);
  std::vector<double> q(game.num_joint_actions());
  for (int a = 0; a < game.num_joint_actions(); ++a) {
    q[a] = (1.0 - delta) * r[a] + delta * kernels::dot(game.transition_row(state, a), u);
  }
  return q;
}

double shapley_payoff(const Game& game, int player, int state, std::span<const double> u,
                      std::span<const double> x_s) {
  const auto q = auxiliary_payoffs(game, player, state, u);
  std::vector<double> w(game.num_joint_actions());
  joint_weights(game, x_s, w);
  return kernels::dot(w, q);
}

std::vector<double> pure_action_payoffs(const Game& game, int player, int state, std::span<const double> u,
                                        std::span<const double> x_s) {
  const auto q = auxiliary_payoffs(game, player, state, u);
  std::vector<double> w(game.num_joint_actions());
  std::vector<double> values(game.num_actions(player));
  for (int y = 0; y < game.num_actions(player); ++y) {
    joint_weights(game, x_s, w, player, y);
    values[y] = kernels::dot(w, q);
  }
  return values;
}

BestResponse best_response(const Game& game, int player, int state, std::span<const double> u,
                           std::span<const double> x_s, TieBreaker& tie) {
  const auto values = pure_action_payoffs(game, player, state, u, x_s);
  const double best = *std::max_element(values.begin(), values.end());
  std::vector<int> tied;
  for (int y = 0; y < static_cast<int>(values.size()); ++y) {
    if (values[y] == best) tied.push_back(y);
  }
  return {tie.pick(tied), best};
}

int sample_transition(const Game& game, int state, int joint, std::mt19937_64& rng) {
  const auto row = game.transition_row(state, joint);
  const double draw = uniform01(rng);
  double cumulative = 0.0;
  int last_positive = 0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (row[k] <= 0.0) continue;
    cumulative += row[k];
    last_positive = static_cast<int>(k);
    if (draw < cumulative) return last_positive;
  }
  return last_positive;
}

ErgodicityResult is_ergodic(const Game& game) {
  const int n = game.num_states();
  std::vector<char> edge(static_cast<std::size_t>(n) * n, 1);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < game.num_joint_actions(); ++a) {
      const auto row = game.transition_row(s, a);
      for (int t = 0; t < n; ++t) {
        if (!(row[t] > 0.0)) edge[s * n + t] = 0;
      }
    }
  }
  const int max_power = (n - 1) * (n - 1) + 1;
  std::vector<char> power = edge;
  std::vector<char> next(power.size());
  ErgodicityResult result;
  for (int T = 1;; ++T) {
    const auto zero = std::find(power.begin(), power.end(), 0);
    if (zero == power.end()) {
      result.ergodic = true;
      result.steps = T;
      return result;
    }
    if (T == max_power) {
      const auto idx = static_cast<int>(zero - power.begin());
      result.witness = {idx / n, idx % n};
      return result;
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        char v = 0;
        for (int k = 0; k < n && !v; ++k) v = power[i * n + k] && edge[k * n + j];
        next[i * n + j] = v;
      }
    }
    power.swap(next);
  }
}

std::uint64_t fingerprint(const Game& game) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < bytes; ++k) {
      h ^= p[k];
      h *= 0x100000001b3ULL;
    }
  };
  const int states = game.num_states();
  mix(&states, sizeof states);
  for (int n : game.num_actions()) mix(&n, sizeof n);
  const double delta = game.delta();
  mix(&delta, sizeof delta);
  mix(game.raw_rewards().data(), game.raw_rewards().size_bytes());
  mix(game.raw_transitions().data(), game.raw_transitions().size_bytes());
  return h;
}

}  // namespace sgplay
