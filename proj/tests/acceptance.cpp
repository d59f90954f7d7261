// Acceptance checks at pinned tolerances. Prints one PASS/FAIL line per
// criterion and exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sgplay/brd.hpp"
#include "sgplay/diagnostics.hpp"
#include "sgplay/equilibrium.hpp"
#include "sgplay/fp.hpp"
#include "sgplay/generators.hpp"
#include "sgplay/schedule.hpp"

using namespace sgplay;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s  %-34s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

// Bounds gathered from every trajectory produced below.
struct Audit {
  double worst_simplex = 0.0;
  // Largest ratio |u| / M and |Gamma| / M minus one; <= 0 means bounded.
  double worst_excess = -1.0;
  int runs = 0;

  void add_brd(const BRDRun& r) {
    worst_simplex = std::max(worst_simplex, r.max_simplex_violation);
    worst_excess = std::max(worst_excess, std::max(r.max_abs_u, r.max_abs_gamma) - r.bound_M);
    ++runs;
  }
  // Discrete runs: |u| tracked at every step, Gamma at every record.
  void add_discrete(const Trajectory& t, double max_abs_u, double simplex, double M) {
    worst_simplex = std::max(worst_simplex, simplex);
    double g = 0.0;
    for (const auto& rec : t.records) {
      for (double v : rec.gamma) g = std::max(g, std::abs(v));
    }
    worst_excess = std::max(worst_excess, std::max(max_abs_u, g) - M);
    ++runs;
  }
};

Audit audit;

double max_abs_delta(const TrajectoryRecord& r) {
  double m = 0.0;
  for (double d : r.bellman_gap) m = std::max(m, std::abs(d));
  return m;
}

// Earliest recorded time from which max_s |Delta_s| <= tol for the rest of the
// run, or NaN if the final record violates it.
double stable_time(const Trajectory& t, double tol) {
  double first = std::nan("");
  for (auto it = t.records.rbegin(); it != t.records.rend(); ++it) {
    if (max_abs_delta(*it) > tol) break;
    first = it->t;
  }
  return first;
}

double initial_bound(const Game& g, const std::vector<ValueVector>& u, const MixedProfile& x) {
  double m = g.max_abs_reward();
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (int s = 0; s < g.num_states(); ++s) {
      m = std::max(m, std::abs(u[i][s]));
      m = std::max(m, std::abs(shapley_payoff(g, static_cast<int>(i), s, u[i], x.state(s))));
    }
  }
  return m + 1.0;
}

IntegratorConfig brd_config(BRDVariant v, double h, double horizon, std::int64_t stride) {
  IntegratorConfig c;
  c.variant = v;
  c.h = h;
  c.horizon = horizon;
  c.record_stride = stride;
  return c;
}

double reference_t1 = std::nan("");

void paper_instance_abrd() {
  const Game g = paper_instance();
  const auto start = Clock::now();
  const auto run = run_brd(g, brd_config(BRDVariant::kAsynchronous, 0.01, 200.0, 10), DivisorSchedule::one(),
                           RateSchedule::constant_one(), {ValueVector{0.0, 0.0}}, MixedProfile::pure(g));
  const double secs = seconds_since(start);
  audit.add_brd(run);
  const auto& last = run.trajectory.records.back();
  const double delta = max_abs_delta(last);
  const auto eq = one_shot_deviation_check(g, run.final_state.x, 1e-3);
  const double u0 = last.u[0][0], u1 = last.u[0][1];
  reference_t1 = stable_time(run.trajectory, 1e-3);
  const bool ok = delta <= 1e-3 && eq.is_epsilon_equilibrium && std::abs(u0 - 0.50) <= 0.02 &&
                  std::abs(u1 - 0.42) <= 0.02 && secs < 10.0;
  report(ok, "reference instance ABRD a=1",
         fmt("u=(%.4f, %.4f) target (0.50, 0.42)+-0.02; max|Delta|=%.2e<=1e-3; one-shot gain=%.2e<=1e-3; %.2fs<10s",
             u0, u1, delta, eq.worst_deviation.gain, secs));
}

void divisor_comparison() {
  const Game g = paper_instance();
  const double cap = 2000.0;
  const auto run = run_brd(g, brd_config(BRDVariant::kAsynchronous, 0.01, cap, 100), DivisorSchedule::linear(),
                           RateSchedule::constant_one(), {ValueVector{0.0, 0.0}}, MixedProfile::pure(g));
  audit.add_brd(run);
  const double t2 = stable_time(run.trajectory, 1e-3);
  const double final_delta = max_abs_delta(run.trajectory.records.back());
  const bool reached = !std::isnan(t2);
  const bool ok = !std::isnan(reference_t1) && (reached ? t2 > reference_t1 : cap > reference_t1);
  report(ok, "divisor comparison",
         reached ? fmt("a=1 within 1e-3 from t=%.2f; a=t+1 from t=%.2f", reference_t1, t2)
                 : fmt("a=1 within 1e-3 from t=%.2f; a=t+1 not within 1e-3 by t=%.0f (max|Delta|=%.2e)", reference_t1,
                       cap, final_delta));
}

void ensemble() {
  const auto start = Clock::now();
  int passed = 0;
  double worst = 0.0;
  std::string failed;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GeneratorSpec spec;
    spec.seed = seed;
    const Game g = random_game(spec);
    const bool ergodic = is_ergodic(g).ergodic;
    const auto run = run_brd(g, brd_config(BRDVariant::kSynchronous, 0.01, 200.0, 100), DivisorSchedule::one(),
                             RateSchedule::constant_one(), {ValueVector{0.0, 0.0}}, MixedProfile::pure(g));
    audit.add_brd(run);
    const auto& last = run.trajectory.records.back();
    double m = 0.0;
    for (int s = 0; s < 2; ++s) m = std::max(m, std::abs(last.bellman_gap[s]) + last.opt_gap[s]);
    worst = std::max(worst, m);
    const bool eq = one_shot_deviation_check(g, run.final_state.x, 1e-3).is_epsilon_equilibrium &&
                    brute_deviation_check(g, run.final_state.x, 1e-3).is_epsilon_equilibrium;
    if (ergodic && m <= 1e-3 && eq) {
      ++passed;
    } else {
      failed += " " + std::to_string(seed);
    }
  }
  const double secs = seconds_since(start);
  report(passed == 20 && secs < 120.0, "ensemble SBRD (20 games)",
         fmt("%d/20 ergodic, converged and verified; worst max_s(|Delta|+sum gaps)=%.2e<=1e-3; %.2fs<120s%s%s",
             passed, worst, secs, failed.empty() ? "" : "; failed seeds:", failed.c_str()));
}

void discrete_afp() {
  const Game g = paper_instance();
  RunConfig cfg;
  cfg.procedure = FPProcedure::kAsynchronous;
  cfg.steps = 100000;
  cfg.seed = 2024;
  cfg.record_stride = 1;
  const auto run = run_fp(g, cfg);
  audit.add_discrete(run.trajectory, run.max_abs_u, run.max_simplex_violation,
                     initial_bound(g, {ValueVector{0.0, 0.0}}, MixedProfile::pure(g)));
  const auto& fp = run.final_state;
  const double w = energy_w(g, fp.u[0], fp.x);
  const auto v = stationary_value(g, 0, fp.x);
  const double dist = std::max(std::abs(fp.u[0][0] - v[0]), std::abs(fp.u[0][1] - v[1]));
  report(std::abs(w) <= 0.05 && dist <= 0.05, "discrete AFP alpha=1",
         fmt("|w_n|=%.2e<=0.05; |u - value(x_n)|=%.2e<=0.05; u=(%.4f, %.4f)", std::abs(w), dist, fp.u[0][0],
             fp.u[0][1]));
}

void zero_sum_continuous() {
  const Game g = matching_pennies(0.7);
  const double T = 500.0;
  const auto run = run_brd(g, brd_config(BRDVariant::kAsynchronous, 0.001, T, 100), DivisorSchedule::linear(),
                           RateSchedule::constant_one(), {ValueVector{0.0}}, MixedProfile::pure(g));
  audit.add_brd(run);
  const double alpha_star = 10.0 / (T + 1.0);
  const double bound = 4.0 * run.bound_M * alpha_star + 0.01;
  double trailing = 0.0;
  for (const auto& rec : run.trajectory.records) {
    if (rec.t >= 0.9 * T) trailing = std::max(trailing, max_abs_delta(rec));
  }
  report(trailing <= bound, "zero-sum continuous bound",
         fmt("max|f-u| over t in [%.0f, %.0f] = %.2e <= 4M alpha* + 0.01 = %.4f (M=%.1f)", 0.9 * T, T, trailing, bound,
             run.bound_M));
}

void doubling_trick() {
  const Game g = matching_pennies(0.7);
  RunConfig cfg;
  cfg.steps = 100000;
  cfg.seed = 7;
  cfg.record_stride = 1;
  const auto run = run_doubling_zero_sum(g, cfg);
  audit.add_discrete(run.trajectory, run.max_abs_u, run.max_simplex_violation,
                     initial_bound(g, {ValueVector{0.0}, ValueVector{0.0}}, MixedProfile::pure(g)));
  report(run.final_duality_gap[0] < 0.05, "doubling trick zero-sum",
         fmt("final duality gap=%.2e<0.05; alpha=%.4g after %zu halvings; beta_-=%.3f", run.final_duality_gap[0],
             run.alpha, run.halvings.size(), run.beta_minus));
}

void team_priors() {
  GeneratorSpec spec;
  spec.kind = GameClassKind::kTeam;
  spec.offsets = {0.0, 0.5};
  spec.seed = 11;
  const Game g = random_game(spec);
  auto cfg = brd_config(BRDVariant::kAsynchronous, 0.01, 200.0, 100);
  cfg.per_player = true;
  const auto run = run_brd(g, cfg, DivisorSchedule::one(), RateSchedule::piecewise_random(0.5, 11),
                           {ValueVector{0.0, 0.0}, ValueVector{1.0, -0.5}}, MixedProfile::pure(g));
  audit.add_brd(run);
  const auto& u = run.final_state.u;
  double dev = 0.0;
  for (int s = 0; s < 2; ++s) dev = std::max(dev, std::abs(u[1][s] - u[0][s] - 0.5));
  report(dev <= 1e-2, "team priors M=(0, 0.5)",
         fmt("max_s|u2-u1-0.5|=%.2e<=1e-2 (initial %.2f)", dev, *run.trajectory.records.front().prior_dev));
}

void psi_bound() {
  GeneratorSpec spec;
  spec.delta = 0.4;
  spec.seed = 5;
  const Game g = random_game(spec);
  const double beta_minus = 0.5;
  auto cfg = brd_config(BRDVariant::kFullyAsynchronous, 0.001, 50.0, 100);
  const auto run = run_brd(g, cfg, DivisorSchedule::one(), RateSchedule::piecewise_random(beta_minus, 5),
                           {ValueVector{1.0, 1.0}}, MixedProfile::pure(g));
  audit.add_brd(run);
  const double rate = (g.delta() * g.num_states() - 1.0) * beta_minus;
  double psi1 = std::nan("");
  for (const auto& rec : run.trajectory.records) {
    if (std::abs(rec.t - 1.0) < 1e-9) psi1 = *rec.psi;
  }
  double worst = -1e300;
  int checked = 0;
  for (const auto& rec : run.trajectory.records) {
    if (rec.t < 1.0 - 1e-9) continue;
    const double bound = psi1 * std::exp(rate * (rec.t - 1.0)) + 0.01;
    worst = std::max(worst, *rec.psi - bound);
    ++checked;
  }
  report(!std::isnan(psi1) && psi1 > 0.0 && worst <= 0.0, "psi bound ABRD-full delta=0.4",
         fmt("psi(1)=%.4f; max over %d records of psi(t) - bound = %.2e <= 0", psi1, checked, worst));
}

void oracle_suite() {
  std::mt19937_64 rng(31);
  // Stationary value against Monte-Carlo rollouts.
  int mc_ok = 0;
  double worst_z = 0.0;
  for (int k = 0; k < 10; ++k) {
    GeneratorSpec spec;
    spec.seed = 300 + k;
    const Game g = random_game(spec);
    const MixedProfile x = oracle::random_profile(g, rng);
    const auto u = stationary_value(g, 0, x);
    bool ok = true;
    for (int s = 0; s < 2; ++s) {
      const auto mc = oracle::rollout_value(g, 0, x, s, 100000, 4000 + 2 * k + s);
      const double err = std::abs(mc.mean - u[s]) - mc.truncation;
      worst_z = std::max(worst_z, err / mc.standard_error);
      ok = ok && err <= 3.0 * mc.standard_error;
    }
    mc_ok += ok;
  }
  report(mc_ok == 10, "oracle: stationary value vs MC",
         fmt("%d/10 games within 3 SE (worst %.2f SE, 1e5 rollouts per state)", mc_ok, worst_z));

  // One-shot against brute enumeration.
  int agree = 0, equilibria = 0;
  double worst_sandwich = -1e300;
  for (int k = 0; k < 50; ++k) {
    GeneratorSpec spec;
    spec.seed = 500 + k;
    spec.num_states = 2 + k % 2;
    spec.num_actions = k % 3 == 0 ? std::vector<int>{3, 2} : std::vector<int>{2, 2};
    const Game g = random_game(spec);
    MixedProfile x;
    if (k % 3 == 1) {
      x = run_brd(g, brd_config(BRDVariant::kSynchronous, 0.01, 100.0, 0), DivisorSchedule::one(),
                  RateSchedule::constant_one(), {ValueVector(g.num_states(), 0.0)}, MixedProfile::pure(g))
              .final_state.x;
    } else if (k % 3 == 2) {
      x = oracle::random_pure_profile(g, rng);
    } else {
      x = oracle::random_profile(g, rng);
    }
    const auto one = one_shot_deviation_check(g, x, 1e-10);
    const auto brute = brute_deviation_check(g, x, 1e-10);
    const double gap = one.worst_deviation.gain, gain = brute.worst_deviation.gain;
    worst_sandwich = std::max({worst_sandwich, gap - gain, gain - gap / (1.0 - g.delta())});
    agree += one.is_epsilon_equilibrium == brute.is_epsilon_equilibrium;
    equilibria += one.is_epsilon_equilibrium && brute.is_epsilon_equilibrium;
  }
  report(agree == 50 && worst_sandwich <= 1e-12, "oracle: one-shot vs brute",
         fmt("verdicts agree on %d/50 pairs (%d equilibria); gap<=gain<=gap/(1-delta) violated by at most %.1e", agree,
             equilibria, worst_sandwich));

  // Shapley payoff against pure-profile enumeration.
  double worst = 0.0;
  for (int k = 0; k < 30; ++k) {
    GeneratorSpec spec;
    spec.seed = 800 + k;
    spec.num_states = 3;
    spec.num_actions = {1 + k % 3, 1 + (k / 3) % 3, 2};
    spec.kind = GameClassKind::kTeam;
    spec.offsets = {0.0, 0.25, -0.5};
    const Game g = random_game(spec);
    const MixedProfile x = oracle::random_profile(g, rng);
    const std::vector<double> u{0.3, -0.4, 0.9};
    for (int i = 0; i < 3; ++i) {
      for (int s = 0; s < 3; ++s) {
        worst = std::max(worst, std::abs(shapley_payoff(g, i, s, u, x.state(s)) - oracle::shapley(g, i, s, u, x)));
      }
    }
  }
  report(worst <= 1e-12, "oracle: shapley vs enumeration", fmt("max abs error %.1e <= 1e-12 on 30 games", worst));
}

void lemma_suite() {
  std::vector<double> table;
  for (int k = 0; k < 100; ++k) table.push_back(1.0 / std::sqrt(1.0 + k));
  double worst = -1e300;
  for (const auto& sched : {StepSchedule::constant_one(), StepSchedule::inv_log(), StepSchedule::custom(table)}) {
    double sigma = 0.0;
    for (std::int64_t n = 0; n <= 10000; ++n) {
      sigma += sched.alpha(n);
      worst = std::max(worst, sched.alpha(n) / sigma - 1.0 / static_cast<double>(n + 1));
    }
  }
  report(worst <= 1e-15, "lemma: alpha_n/sigma_n <= 1/(n+1)",
         fmt("3 presets, n<=1e4; max(alpha/sigma - 1/(n+1)) = %.1e", worst));

  std::mt19937_64 rng(77);
  int held = 0;
  for (int k = 0; k < 100; ++k) {
    const auto seq = oracle::gronwall_sequence(rng, 300);
    bool ok = true;
    for (int n = 0; n < 300; ++n) {
      const double b = oracle::gronwall_bound(seq, n);
      ok = ok && seq.y[n] <= b + 1e-12 * (1.0 + b);
    }
    held += ok;
  }
  report(held == 100, "lemma: discrete Gronwall", fmt("bound holds on %d/100 random sequences of length 300", held));

  report(audit.worst_excess <= 1e-6, "lemma: boundedness |u|,|Gamma|<=M",
         fmt("%d trajectories; max(|u|,|Gamma|) - M = %.3f <= 1e-6", audit.runs, audit.worst_excess));
  report(audit.worst_simplex <= 1e-12, "lemma: simplex preservation",
         fmt("%d trajectories; max simplex violation %.1e", audit.runs, audit.worst_simplex));
}

}  // namespace

int main() {
  const auto start = Clock::now();
  paper_instance_abrd();
  divisor_comparison();
  ensemble();
  discrete_afp();
  zero_sum_continuous();
  doubling_trick();
  team_priors();
  psi_bound();
  oracle_suite();
  lemma_suite();
  std::printf("%d failure(s); total %.1fs\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
