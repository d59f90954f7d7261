#include "sgplay/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

namespace sgplay {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string("missing key \"") + key + "\"");
  return j.at(key);
}

std::vector<double> flatten(const json& j, const std::vector<std::size_t>& shape, const std::string& name) {
  std::vector<double> out;
  auto rec = [&](auto&& self, const json& node, std::size_t depth, const std::string& path) -> void {
    if (depth == shape.size()) {
      if (!node.is_number()) throw InvalidInput(path + " is not a number");
      out.push_back(node.get<double>());
      return;
    }
    if (!node.is_array() || node.size() != shape[depth]) {
      throw InvalidInput(path + " must be an array of length " + std::to_string(shape[depth]));
    }
    for (std::size_t k = 0; k < node.size(); ++k) self(self, node[k], depth + 1, path + "[" + std::to_string(k) + "]");
  };
  rec(rec, j, 0, name);
  return out;
}

}  // namespace

json game_to_json(const Game& game, const std::optional<GameMetadata>& metadata) {
  const int n = game.num_states();
  const int m = game.num_joint_actions();
  json j;
  j["num_states"] = n;
  j["num_actions"] = std::vector<int>(game.num_actions().begin(), game.num_actions().end());
  j["delta"] = game.delta();
  json rewards = json::array();
  for (int i = 0; i < game.num_players(); ++i) {
    json per_state = json::array();
    for (int s = 0; s < n; ++s) {
      auto r = game.rewards(i, s);
      per_state.push_back(std::vector<double>(r.begin(), r.end()));
    }
    rewards.push_back(std::move(per_state));
  }
  j["rewards"] = std::move(rewards);
  json transitions = json::array();
  for (int s = 0; s < n; ++s) {
    json rows = json::array();
    for (int a = 0; a < m; ++a) {
      auto p = game.transition_row(s, a);
      rows.push_back(std::vector<double>(p.begin(), p.end()));
    }
    transitions.push_back(std::move(rows));
  }
  j["transitions"] = std::move(transitions);
  if (metadata) {
    json meta;
    meta["seed"] = metadata->seed ? json(*metadata->seed) : json(nullptr);
    meta["class"] = metadata->game_class;
    meta["offsets"] = metadata->offsets;
    j["metadata"] = std::move(meta);
  }
  return j;
}

Game game_from_json(const json& j) {
  try {
    const json& jn = require(j, "num_states");
    if (!jn.is_number_integer() || jn.get<long long>() <= 0) throw InvalidInput("num_states must be a positive integer");
    const auto n = static_cast<std::size_t>(jn.get<long long>());
    const json& ja = require(j, "num_actions");
    if (!ja.is_array() || ja.empty()) throw InvalidInput("num_actions must be a non-empty array");
    std::vector<int> actions;
    std::size_t joint = 1;
    for (const auto& a : ja) {
      if (!a.is_number_integer() || a.get<long long>() <= 0 || a.get<long long>() > 1'000'000) {
        throw InvalidInput("num_actions entries must be positive integers");
      }
      actions.push_back(a.get<int>());
      joint *= actions.back();
      if (joint > 100'000'000) throw InvalidInput("joint action space too large");
    }
    const json& jd = require(j, "delta");
    if (!jd.is_number()) throw InvalidInput("delta must be a number");
    auto rewards = flatten(require(j, "rewards"), {actions.size(), n, joint}, "rewards");
    auto transitions = flatten(require(j, "transitions"), {n, joint, n}, "transitions");
    return Game(static_cast<int>(n), std::move(actions), jd.get<double>(), std::move(rewards), std::move(transitions));
  } catch (const json::exception& e) {
    throw InvalidInput(e.what());
  } catch (const std::invalid_argument& e) {
    throw InvalidInput(e.what());
  }
}

std::optional<GameMetadata> metadata_from_json(const json& j) {
  if (!j.is_object() || !j.contains("metadata") || !j["metadata"].is_object()) return std::nullopt;
  const json& m = j["metadata"];
  GameMetadata meta;
  try {
    if (m.contains("seed") && m["seed"].is_number_unsigned()) meta.seed = m["seed"].get<std::uint64_t>();
    if (m.contains("class") && m["class"].is_string()) meta.game_class = m["class"].get<std::string>();
    if (m.contains("offsets") && m["offsets"].is_array()) meta.offsets = m["offsets"].get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw InvalidInput(e.what());
  }
  return meta;
}

json profile_to_json(const MixedProfile& x) {
  json states = json::array();
  for (int s = 0; s < x.num_states(); ++s) {
    json players = json::array();
    for (int i = 0; i < x.num_players(); ++i) {
      auto xi = x.at(s, i);
      players.push_back(std::vector<double>(xi.begin(), xi.end()));
    }
    states.push_back(std::move(players));
  }
  return json{{"x", std::move(states)}};
}

MixedProfile profile_from_json(const Game& game, const json& j) {
  const json& jx = require(j, "x");
  MixedProfile x(game);
  if (!jx.is_array() || jx.size() != static_cast<std::size_t>(game.num_states())) {
    throw InvalidInput("x must have one entry per state");
  }
  for (int s = 0; s < game.num_states(); ++s) {
    const json& js = jx[s];
    if (!js.is_array() || js.size() != static_cast<std::size_t>(game.num_players())) {
      throw InvalidInput("x[" + std::to_string(s) + "] must have one entry per player");
    }
    for (int i = 0; i < game.num_players(); ++i) {
      const std::string path = "x[" + std::to_string(s) + "][" + std::to_string(i) + "]";
      auto vals = flatten(js[i], {static_cast<std::size_t>(game.num_actions(i))}, path);
      auto xi = x.at(s, i);
      std::copy(vals.begin(), vals.end(), xi.begin());
    }
  }
  if (x.simplex_violation() > 1e-9) throw InvalidInput("profile entries must lie in the simplex");
  return x;
}

json report_to_json(const EquilibriumReport& report) {
  json dev;
  dev["player"] = report.worst_deviation.player;
  dev["state"] = report.worst_deviation.state;
  dev["actions"] = report.worst_deviation.actions;
  dev["gain"] = report.worst_deviation.gain;
  return json{{"is_epsilon_equilibrium", report.is_epsilon_equilibrium},
              {"epsilon", report.epsilon},
              {"worst_deviation", std::move(dev)},
              {"values", report.values}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> csv_header(const Trajectory& traj, int num_states) {
  std::vector<std::string> cols{"t", "state"};
  const int rows = traj.records.empty() ? 1 : static_cast<int>(traj.records.front().u.size());
  for (int s = 0; s < num_states; ++s) cols.push_back("u_" + std::to_string(s));
  for (int i = 1; i < rows; ++i) {
    for (int s = 0; s < num_states; ++s) cols.push_back("u_p" + std::to_string(i) + "_" + std::to_string(s));
  }
  for (const char* prefix : {"gamma_", "delta_", "optgap_"}) {
    for (int s = 0; s < num_states; ++s) cols.push_back(prefix + std::to_string(s));
  }
  if (traj.has_duality_gap) {
    for (int s = 0; s < num_states; ++s) cols.push_back("dualgap_" + std::to_string(s));
  }
  if (traj.has_psi) cols.push_back("psi");
  if (traj.has_prior_dev) cols.push_back("prior_dev");
  return cols;
}

void write_csv(std::ostream& out, const Trajectory& traj, int num_states) {
  const auto header = csv_header(traj, num_states);
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << '\n';
  auto put_row = [&](const ValueVector& v) {
    for (double d : v) out << ',' << format_double(d);
  };
  auto put_blank = [&](int count) {
    for (int k = 0; k < count; ++k) out << ',';
  };
  for (const auto& rec : traj.records) {
    out << format_double(rec.t) << ',';
    if (rec.state) out << *rec.state;
    for (const auto& row : rec.u) put_row(row);
    put_row(rec.gamma);
    put_row(rec.bellman_gap);
    put_row(rec.opt_gap);
    if (traj.has_duality_gap) {
      if (rec.duality_gap) {
        put_row(*rec.duality_gap);
      } else {
        put_blank(num_states);
      }
    }
    if (traj.has_psi) {
      out << ',';
      if (rec.psi) out << format_double(*rec.psi);
    }
    if (traj.has_prior_dev) {
      out << ',';
      if (rec.prior_dev) out << format_double(*rec.prior_dev);
    }
    out << '\n';
  }
}

void write_csv_file(const std::filesystem::path& path, const Trajectory& traj, int num_states) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_csv(out, traj, num_states);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace sgplay
