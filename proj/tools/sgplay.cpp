// sgplay: generate games, run learning dynamics, verify equilibria.
//
// Exit codes: 0 success / equilibrium, 1 verification failure, 2 usage error,
// 3 invalid input file.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sgplay/brd.hpp"
#include "sgplay/diagnostics.hpp"
#include "sgplay/equilibrium.hpp"
#include "sgplay/fp.hpp"
#include "sgplay/game.hpp"
#include "sgplay/generators.hpp"
#include "sgplay/io.hpp"
#include "sgplay/kernels.hpp"
#include "sgplay/schedule.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sgplay;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInvalidInput = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::mutex g_stderr_mutex;

void warn(const std::string& msg) {
  std::lock_guard<std::mutex> lock(g_stderr_mutex);
  std::cerr << "warning: " << msg << '\n';
}

std::optional<Game> builtin_game(const std::string& name, double delta) {
  if (name == "paper-instance") return paper_instance();
  if (name == "matching-pennies") return matching_pennies(delta);
  if (name == "coordination") return coordination(delta);
  return std::nullopt;
}

// Loads a game file or a built-in name. Invalid files raise InvalidInput.
Game load_game(const std::string& spec, bool renormalize) {
  Game game;
  if (auto g = builtin_game(spec, 0.7)) {
    game = *g;
  } else {
    game = game_from_json(read_json_file(spec));
  }
  if (renormalize) game = game.with_renormalized_transitions();
  auto violations = validate_game(game);
  if (!violations.empty()) {
    std::string msg = "invalid game:";
    for (const auto& v : violations) msg += "\n  " + v.path + ": " + v.message;
    throw InvalidInput(msg);
  }
  return game;
}

fs::path replica_path(const fs::path& base, int k, int total) {
  if (total <= 1) return base;
  fs::path p = base;
  p.replace_filename(base.stem().string() + "_" + std::to_string(k) + base.extension().string());
  return p;
}

// ---- generate ---------------------------------------------------------------

struct GenerateOptions {
  std::string kind = "identical-interest";
  std::string preset;
  int states = 2;
  std::vector<int> actions{2, 2};
  double delta = 0.7;
  std::uint64_t seed = 0;
  std::vector<double> offsets;
  std::string out;
};

int cmd_generate(const GenerateOptions& o) {
  Game game;
  GameMetadata meta;
  if (!o.preset.empty()) {
    auto g = builtin_game(o.preset, o.delta);
    if (!g) throw UsageError("unknown preset: " + o.preset);
    game = *g;
    const GameClass cls = classify(game);
    meta.game_class = cls.zero_sum ? "zero-sum" : "identical-interest";
    meta.offsets = cls.offsets;
  } else {
    GeneratorSpec spec;
    try {
      spec.kind = parse_kind(o.kind);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    spec.num_states = o.states;
    spec.num_actions = o.actions;
    spec.delta = o.delta;
    spec.seed = o.seed;
    spec.offsets = o.offsets;
    try {
      game = random_game(spec);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    meta.seed = o.seed;
    meta.game_class = kind_name(spec.kind);
    meta.offsets = spec.kind == GameClassKind::kTeam ? o.offsets : std::vector<double>(o.actions.size(), 0.0);
  }
  write_json_file(o.out, game_to_json(game, meta));
  return kExitOk;
}

// ---- run --------------------------------------------------------------------

struct RunOptions {
  std::string game;
  std::string proc = "abrd";
  std::string schedule = "one";
  std::string visit_weights = "one";
  std::string divisor = "one";
  std::string rates = "one";
  double beta_min = 0.5;
  std::int64_t steps = 100000;
  double horizon = 200.0;
  double h = 0.01;
  std::uint64_t seed = 0;
  std::int64_t stride = 0;
  bool stride_set = false;
  std::string tiebreak = "lowest";
  std::string csv;
  std::string summary;
  bool renormalize = false;
  int ensemble = 1;
  std::vector<double> prior_u;
  std::string prior_x;
  std::string x0 = "pure";
  std::size_t window = kDefaultWindow;
  double tol = kDefaultTolerance;
  double epsilon = 1e-3;
  std::string action_timing = "after-update";
  int initial_state = 0;
};

bool is_brd(const std::string& proc) { return proc == "sbrd" || proc == "abrd" || proc == "abrd-full"; }

std::vector<ValueVector> parse_prior_u(const RunOptions& o, const Game& game) {
  const std::size_t n = game.num_states();
  if (o.prior_u.empty()) return {};
  if (o.prior_u.size() == n) return {ValueVector(o.prior_u)};
  if (o.prior_u.size() == n * game.num_players()) {
    std::vector<ValueVector> rows;
    for (int i = 0; i < game.num_players(); ++i) {
      rows.emplace_back(o.prior_u.begin() + i * n, o.prior_u.begin() + (i + 1) * n);
    }
    return rows;
  }
  throw UsageError("--prior-u needs |S| values or |S| values per player");
}

MixedProfile initial_profile(const RunOptions& o, const Game& game) {
  if (!o.prior_x.empty()) return profile_from_json(game, read_json_file(o.prior_x));
  if (o.x0 == "uniform") return MixedProfile::uniform(game);
  return MixedProfile::pure(game, 0);
}

json verdict_json(const Trajectory& traj, const RunOptions& o) {
  json j;
  if (traj.records.size() < std::max<std::size_t>(o.window, 2)) {
    j["converged"] = false;
    j["first_index"] = nullptr;
    j["note"] = "trajectory shorter than the convergence window";
    return j;
  }
  const auto v = detect_convergence(traj, o.window, o.tol);
  j["converged"] = v.converged;
  j["first_index"] = v.first_index ? json(*v.first_index) : json(nullptr);
  j["window"] = o.window;
  j["tol"] = o.tol;
  return j;
}

// Runs one replica and returns its summary.
json run_one(const Game& game, const RunOptions& o, std::uint64_t seed, const fs::path& csv_path) {
  const auto start = std::chrono::steady_clock::now();
  const auto prior_u = parse_prior_u(o, game);
  const bool per_player = prior_u.size() > 1;
  const MixedProfile x0 = initial_profile(o, game);
  const auto tie_rule = o.tiebreak == "random" ? TieBreaker::Rule::kSeededRandom : TieBreaker::Rule::kLowestIndex;

  json summary;
  summary["procedure"] = o.proc;
  summary["seed"] = seed;
  summary["kernels"] = kernels::isa_name(kernels::active_isa());
  Trajectory traj;
  MixedProfile final_x;
  std::vector<ValueVector> final_u;

  if (is_brd(o.proc)) {
    IntegratorConfig cfg;
    cfg.h = o.h;
    cfg.horizon = o.horizon;
    cfg.record_stride = o.stride_set ? o.stride : 10;
    cfg.tie_rule = tie_rule;
    cfg.tie_seed = seed;
    cfg.variant = o.proc == "sbrd"  ? BRDVariant::kSynchronous
                  : o.proc == "abrd" ? BRDVariant::kAsynchronous
                                     : BRDVariant::kFullyAsynchronous;
    cfg.per_player = per_player;
    const DivisorSchedule div = o.divisor == "linear" ? DivisorSchedule::linear() : DivisorSchedule::one();
    RateSchedule rates = RateSchedule::constant_one();
    if (o.rates == "piecewise") rates = RateSchedule::piecewise_random(o.beta_min, seed);
    if (o.rates == "occupancy") rates = RateSchedule::occupancy(game, o.beta_min, seed);
    std::vector<ValueVector> u0 = prior_u.empty() ? std::vector<ValueVector>{ValueVector(game.num_states(), 0.0)}
                                                  : prior_u;
    BRDRun run = run_brd(game, cfg, div, rates, u0, x0);
    summary["bound_M"] = run.bound_M;
    summary["max_abs_u"] = run.max_abs_u;
    summary["max_abs_gamma"] = run.max_abs_gamma;
    summary["max_simplex_violation"] = run.max_simplex_violation;
    traj = std::move(run.trajectory);
    final_x = run.final_state.x;
    final_u = run.final_state.u;
  } else {
    RunConfig cfg;
    cfg.steps = o.steps;
    cfg.seed = seed;
    cfg.tie_rule = tie_rule;
    cfg.prior_x = x0;
    cfg.prior_u = prior_u;
    cfg.per_player_priors = per_player;
    cfg.record_stride = o.stride_set ? o.stride : std::max<std::int64_t>(1, o.steps / 1000);
    cfg.initial_state = o.initial_state;
    cfg.action_timing = o.action_timing == "start-of-step" ? ActionTiming::kStartOfStep : ActionTiming::kAfterUpdate;
    cfg.schedule = o.schedule == "inv-log" ? StepSchedule::inv_log() : StepSchedule::constant_one();
    cfg.visit_weights = o.visit_weights == "linear" ? DivisorSchedule::linear() : DivisorSchedule::one();
    cfg.warn = warn;
    if (o.proc == "doubling-zs") {
      DoublingRun run = run_doubling_zero_sum(game, cfg);
      summary["alpha"] = run.alpha;
      summary["beta_minus"] = run.beta_minus;
      summary["bound_M"] = run.M;
      summary["halvings"] = run.halvings;
      traj = std::move(run.trajectory);
      final_x = run.final_state.x;
      final_u = run.final_state.u;
    } else {
      cfg.procedure = o.proc == "sfp"   ? FPProcedure::kSynchronous
                      : o.proc == "afp" ? FPProcedure::kAsynchronous
                                        : FPProcedure::kVisitIndexed;
      FPRun run = run_fp(game, cfg);
      summary["max_simplex_violation"] = run.max_simplex_violation;
      summary["max_abs_u"] = run.max_abs_u;
      traj = std::move(run.trajectory);
      final_x = run.final_state.x;
      final_u = run.final_state.u;
    }
  }

  write_csv_file(csv_path, traj, game.num_states());

  const auto& last = traj.records.back();
  summary["u"] = last.u.size() == 1 ? json(last.u[0]) : json(last.u);
  summary["t"] = last.t;
  summary["max_abs_delta"] = [&] {
    double m = 0.0;
    for (double d : last.bellman_gap) m = std::max(m, std::abs(d));
    return m;
  }();
  summary["optgap"] = last.opt_gap;
  if (last.duality_gap) summary["duality_gap"] = *last.duality_gap;
  if (last.psi) summary["psi"] = *last.psi;
  if (last.prior_dev) summary["prior_dev"] = *last.prior_dev;
  summary["profile"] = profile_to_json(final_x)["x"];
  summary["equilibrium"] = report_to_json(one_shot_deviation_check(game, final_x, o.epsilon));
  summary["convergence"] = verdict_json(traj, o);
  summary["metadata"] = traj.metadata;
  summary["csv"] = csv_path.string();
  summary["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

int cmd_run(RunOptions o) {
  const Game game = load_game(o.game, o.renormalize);
  const GameClass cls = classify(game, 1e-9);
  if (o.proc == "doubling-zs" && !(game.num_players() == 2 && cls.zero_sum)) {
    throw UsageError("--proc doubling-zs requires a two-player zero-sum game");
  }
  if (is_brd(o.proc) && !cls.team && !cls.zero_sum) {
    throw UsageError("--proc " + o.proc + " requires a team (identical-interest) or zero-sum game");
  }
  if (is_brd(o.proc)) {
    if (!(o.h > 0.0 && o.h <= 1.0)) throw UsageError("--h must lie in (0, 1]");
    if (!(o.horizon > 0.0)) throw UsageError("--horizon must be positive");
  } else if (o.steps < 1) {
    throw UsageError("--steps must be at least 1");
  }
  if (o.rates != "one" && !(o.beta_min > 0.0 && o.beta_min <= 1.0)) throw UsageError("--beta-min must lie in (0, 1]");
  if (o.initial_state < 0 || o.initial_state >= game.num_states()) throw UsageError("--initial-state out of range");
  if (o.ensemble < 1) throw UsageError("--ensemble must be at least 1");
  parse_prior_u(o, game);
  if (o.csv.empty()) o.csv = "trajectory.csv";

  const int total = o.ensemble;
  std::vector<json> summaries(total);
  std::vector<std::exception_ptr> errors(total);
  auto work = [&](int k) {
    try {
      summaries[k] = run_one(game, o, o.seed + static_cast<std::uint64_t>(k), replica_path(o.csv, k, total));
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  if (total == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    for (int begin = 0; begin < total; begin += static_cast<int>(hw)) {
      threads.clear();
      for (int k = begin; k < std::min(total, begin + static_cast<int>(hw)); ++k) threads.emplace_back(work, k);
      for (auto& t : threads) t.join();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const json out = total == 1 ? summaries[0] : json{{"runs", summaries}};
  if (o.summary.empty()) {
    std::cout << out.dump(2) << '\n';
  } else {
    write_json_file(o.summary, out);
  }
  return kExitOk;
}

// ---- verify -----------------------------------------------------------------

struct VerifyOptions {
  std::string game;
  std::string profile;
  double epsilon = 1e-6;
  bool renormalize = false;
  std::string out;
};

int cmd_verify(const VerifyOptions& o) {
  const Game game = load_game(o.game, o.renormalize);
  const MixedProfile x = profile_from_json(game, read_json_file(o.profile));
  const EquilibriumReport one_shot = one_shot_deviation_check(game, x, o.epsilon);
  json out;
  out["epsilon"] = o.epsilon;
  out["one_shot"] = report_to_json(one_shot);
  bool ok = one_shot.is_epsilon_equilibrium;
  try {
    const EquilibriumReport brute = brute_deviation_check(game, x, o.epsilon);
    out["brute"] = report_to_json(brute);
    ok = ok && brute.is_epsilon_equilibrium;
  } catch (const std::length_error& e) {
    out["brute"] = nullptr;
    warn(std::string("brute-force check skipped: ") + e.what());
  }
  out["is_equilibrium"] = ok;
  if (o.out.empty()) {
    std::cout << out.dump(2) << '\n';
  } else {
    write_json_file(o.out, out);
  }
  return ok ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning dynamics in discounted stochastic games"};
  app.require_subcommand(1);
  std::string kernels_opt;
  app.add_option("--kernels", kernels_opt, "Force the numeric kernel set")->check(CLI::IsMember({"scalar", "avx2"}));

  GenerateOptions gen;
  auto* g = app.add_subcommand("generate", "Write a seeded random game (or a built-in preset) as JSON");
  g->add_option("--class", gen.kind, "Game class")
      ->check(CLI::IsMember({"identical-interest", "zero-sum", "team"}));
  g->add_option("--preset", gen.preset, "Built-in game instead of a random one")
      ->check(CLI::IsMember({"paper-instance", "matching-pennies", "coordination"}));
  g->add_option("--states", gen.states, "Number of states")->check(CLI::PositiveNumber);
  g->add_option("--actions", gen.actions, "Action count per player");
  g->add_option("--delta", gen.delta, "Discount factor");
  g->add_option("--seed", gen.seed, "Generator seed");
  g->add_option("--offsets", gen.offsets, "Team offsets, one per player");
  g->add_option("--out", gen.out, "Output path")->required();

  RunOptions run;
  auto* r = app.add_subcommand("run", "Run a learning procedure and export its trajectory");
  r->set_help_flag("--help", "Print this help message and exit");
  r->add_option("--game", run.game, "Game JSON path or a built-in name (paper-instance, matching-pennies, coordination)")
      ->required();
  r->add_option("--proc", run.proc, "Procedure")
      ->check(CLI::IsMember({"sfp", "afp", "afp-visit", "doubling-zs", "sbrd", "abrd", "abrd-full"}));
  r->add_option("--schedule", run.schedule, "Discrete step schedule alpha_n")->check(CLI::IsMember({"one", "inv-log"}));
  r->add_option("--visit-weights", run.visit_weights, "Visit weights a(k) for afp-visit")
      ->check(CLI::IsMember({"one", "linear"}));
  r->add_option("--divisor", run.divisor, "Continuous divisor a(t)")->check(CLI::IsMember({"one", "linear"}));
  r->add_option("--rates", run.rates, "Update rates beta_s(t)")
      ->check(CLI::IsMember({"one", "piecewise", "occupancy"}));
  r->add_option("--beta-min", run.beta_min, "Lower bound on the rates");
  r->add_option("--steps", run.steps, "Discrete steps");
  r->add_option("--horizon", run.horizon, "Continuous horizon T");
  r->add_option("--h", run.h, "Euler step");
  r->add_option("--seed", run.seed, "Seed for play, rates and random tie-breaks");
  auto* stride = r->add_option("--stride", run.stride, "Record every k steps (0: endpoints only)");
  r->add_option("--tiebreak", run.tiebreak, "Tie rule")->check(CLI::IsMember({"lowest", "random"}));
  r->add_option("--csv", run.csv, "Trajectory CSV path");
  r->add_option("--summary", run.summary, "Summary JSON path (stdout if omitted)");
  r->add_flag("--renormalize", run.renormalize, "Divide transition rows by their sums before validating");
  r->add_option("--ensemble", run.ensemble, "Run N replicas with seeds seed..seed+N-1 in parallel");
  r->add_option("--prior-u", run.prior_u, "Initial estimates: |S| values, or |S| per player");
  r->add_option("--prior-x", run.prior_x, "Initial profile JSON");
  r->add_option("--x0", run.x0, "Initial profile when --prior-x is absent")->check(CLI::IsMember({"pure", "uniform"}));
  r->add_option("--window", run.window, "Convergence window (records)");
  r->add_option("--tol", run.tol, "Convergence tolerance");
  r->add_option("--epsilon", run.epsilon, "Epsilon for the final equilibrium check");
  r->add_option("--action-timing", run.action_timing, "When asynchronous play picks the next action")
      ->check(CLI::IsMember({"after-update", "start-of-step"}));
  r->add_option("--initial-state", run.initial_state, "Starting state");

  VerifyOptions ver;
  auto* v = app.add_subcommand("verify", "Check whether a stationary profile is an epsilon-equilibrium");
  v->add_option("--game", ver.game, "Game JSON path or a built-in name")->required();
  v->add_option("--profile", ver.profile, "Profile JSON path")->required();
  v->add_option("--epsilon", ver.epsilon, "Tolerance");
  v->add_flag("--renormalize", ver.renormalize, "Divide transition rows by their sums before validating");
  v->add_option("--out", ver.out, "Report path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  run.stride_set = stride->count() > 0;

  try {
    if (!kernels_opt.empty()) {
      kernels::set_isa(kernels_opt == "avx2" ? kernels::Isa::kAvx2 : kernels::Isa::kScalar);
    }
    if (*g) return cmd_generate(gen);
    if (*r) return cmd_run(run);
    if (*v) return cmd_verify(ver);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }
  return kExitUsage;
}
