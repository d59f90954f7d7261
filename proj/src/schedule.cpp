#include "sgplay/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace sgplay {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void check_beta_min(double beta_min) {
  if (!(beta_min > 0.0 && beta_min <= 1.0)) throw std::invalid_argument("beta_min must lie in (0, 1]");
}

}  // namespace

StepSchedule StepSchedule::constant_one() { return StepSchedule(); }

StepSchedule StepSchedule::inv_log() {
  StepSchedule s;
  s.preset_ = Preset::kInvLog;
  return s;
}

StepSchedule StepSchedule::custom(std::vector<double> table) {
  if (table.empty()) throw std::invalid_argument("custom schedule needs at least one step");
  for (std::size_t n = 0; n < table.size(); ++n) {
    if (!(table[n] > 0.0 && table[n] <= 1.0)) {
      throw std::invalid_argument("custom schedule step " + std::to_string(n) + " outside (0, 1]");
    }
    if (n > 0 && table[n] > table[n - 1]) {
      throw std::invalid_argument("custom schedule increases at step " + std::to_string(n));
    }
  }
  StepSchedule s;
  s.preset_ = Preset::kCustom;
  s.table_ = std::move(table);
  return s;
}

std::string StepSchedule::tag() const {
  switch (preset_) {
    case Preset::kConstantOne:
      return "constant-one";
    case Preset::kInvLog:
      return "inv-log";
    case Preset::kCustom:
      return "custom";
  }
  return "unknown";
}

double StepSchedule::alpha(std::int64_t n) const {
  switch (preset_) {
    case Preset::kConstantOne:
      return 1.0;
    case Preset::kInvLog:
      return std::min(1.0, 1.0 / std::log(static_cast<double>(n) + 2.0));
    case Preset::kCustom:
      return table_[std::min<std::size_t>(static_cast<std::size_t>(n), table_.size() - 1)];
  }
  return 1.0;
}

double StepSchedule::sigma(std::int64_t n) const {
  if (preset_ == Preset::kConstantOne) return static_cast<double>(n) + 1.0;
  double sum = 0.0;
  for (std::int64_t k = 0; k <= n; ++k) sum += alpha(k);
  return sum;
}

struct RateSchedule::Occupancy {
  static constexpr int kStepsPerUnit = 50;
  static constexpr double kSmoothing = 0.2;

  Game game;
  std::mt19937_64 rng;
  int state = 0;
  std::vector<double> smoothed;
  // rates[k * num_states + s] holds beta_s on [k, k + 1).
  std::vector<double> rates;
  double beta_min = 1.0;

  void extend_to(std::size_t interval) {
    const int n = game.num_states();
    while (rates.size() / n <= interval) {
      std::vector<double> visits(n, 0.0);
      for (int k = 0; k < kStepsPerUnit; ++k) {
        visits[state] += 1.0;
        const int joint = static_cast<int>(uniform01(rng) * game.num_joint_actions());
        state = sample_transition(game, state, std::min(joint, game.num_joint_actions() - 1), rng);
      }
      for (int s = 0; s < n; ++s) {
        smoothed[s] = (1.0 - kSmoothing) * smoothed[s] + kSmoothing * visits[s] / kStepsPerUnit;
      }
      const double top = *std::max_element(smoothed.begin(), smoothed.end());
      for (int s = 0; s < n; ++s) rates.push_back(std::clamp(smoothed[s] / top, beta_min, 1.0));
    }
  }
};

RateSchedule RateSchedule::constant_one() { return RateSchedule(); }

RateSchedule RateSchedule::piecewise_random(double beta_min, std::uint64_t seed) {
  check_beta_min(beta_min);
  RateSchedule r;
  r.preset_ = Preset::kPiecewiseRandom;
  r.beta_min_ = beta_min;
  r.seed_ = seed;
  return r;
}

RateSchedule RateSchedule::occupancy(const Game& game, double beta_min, std::uint64_t seed) {
  check_beta_min(beta_min);
  RateSchedule r;
  r.preset_ = Preset::kOccupancy;
  r.beta_min_ = beta_min;
  r.seed_ = seed;
  r.occupancy_ = std::make_shared<Occupancy>();
  r.occupancy_->game = game;
  r.occupancy_->rng.seed(seed);
  r.occupancy_->smoothed.assign(game.num_states(), 1.0 / game.num_states());
  r.occupancy_->beta_min = beta_min;
  return r;
}

std::string RateSchedule::tag() const {
  switch (preset_) {
    case Preset::kConstantOne:
      return "constant-one";
    case Preset::kPiecewiseRandom:
      return "piecewise-random";
    case Preset::kOccupancy:
      return "occupancy";
  }
  return "unknown";
}

double RateSchedule::operator()(int state, double t) const {
  const auto interval = static_cast<std::uint64_t>(std::max(0.0, std::floor(t)));
  switch (preset_) {
    case Preset::kConstantOne:
      return 1.0;
    case Preset::kPiecewiseRandom: {
      const std::uint64_t h =
          splitmix64(seed_ ^ splitmix64(static_cast<std::uint64_t>(state) * 0x100000001B3ULL + interval));
      const double unit = static_cast<double>(h >> 11) * 0x1.0p-53;
      return beta_min_ + (1.0 - beta_min_) * unit;
    }
    case Preset::kOccupancy: {
      occupancy_->extend_to(interval);
      return occupancy_->rates[interval * occupancy_->game.num_states() + state];
    }
  }
  return 1.0;
}

}  // namespace sgplay
