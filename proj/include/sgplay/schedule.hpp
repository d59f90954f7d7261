#pragma once

// Step and rate schedules for the learning procedures.
//
//   StepSchedule     discrete payoff-estimate steps alpha_n, sigma_n = sum_{k<=n} alpha_k
//   DivisorSchedule  continuous divisor a(t) >= 1 in  du/dt = (f - u) / a(t)
//   RateSchedule     per-state update rates beta_s(t) in [beta_min, 1]

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sgplay/game.hpp"

namespace sgplay {

class StepSchedule {
 public:
  enum class Preset { kConstantOne, kInvLog, kCustom };

  static StepSchedule constant_one();
  // alpha_n = min(1, 1 / log(n + 2)).
  static StepSchedule inv_log();
  // Table of alpha_0, alpha_1, ...; the last entry repeats past the end.
  // Throws std::invalid_argument unless 0 < alpha_n <= 1 and non-increasing.
  static StepSchedule custom(std::vector<double> table);

  Preset preset() const { return preset_; }
  std::string tag() const;

  double alpha(std::int64_t n) const;
  // O(n) except for the constant-one preset. Runners keep a running sum.
  double sigma(std::int64_t n) const;

 private:
  Preset preset_ = Preset::kConstantOne;
  std::vector<double> table_;
};

class DivisorSchedule {
 public:
  enum class Preset { kOne, kLinear };

  static DivisorSchedule one() { return DivisorSchedule(Preset::kOne); }
  // a(t) = t + 1.
  static DivisorSchedule linear() { return DivisorSchedule(Preset::kLinear); }

  Preset preset() const { return preset_; }
  std::string tag() const { return preset_ == Preset::kOne ? "one" : "linear"; }

  double operator()(double t) const { return preset_ == Preset::kOne ? 1.0 : t + 1.0; }

 private:
  explicit DivisorSchedule(Preset p) : preset_(p) {}
  Preset preset_;
};

// beta_s(t). The piecewise-random preset draws an independent value per state
// on each unit interval from a hash of (seed, state, interval), so it is a pure
// function of its arguments. The occupancy preset derives rates from smoothed
// visit frequencies of a companion play under uniformly random joint actions,
// which makes the rates of different states correlated.
class RateSchedule {
 public:
  enum class Preset { kConstantOne, kPiecewiseRandom, kOccupancy };

  static RateSchedule constant_one();
  static RateSchedule piecewise_random(double beta_min, std::uint64_t seed);
  static RateSchedule occupancy(const Game& game, double beta_min, std::uint64_t seed);

  Preset preset() const { return preset_; }
  double beta_min() const { return beta_min_; }
  std::string tag() const;

  double operator()(int state, double t) const;

 private:
  struct Occupancy;

  Preset preset_ = Preset::kConstantOne;
  double beta_min_ = 1.0;
  std::uint64_t seed_ = 0;
  std::shared_ptr<Occupancy> occupancy_;
};

}  // namespace sgplay
