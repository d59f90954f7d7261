#pragma once

// JSON and CSV serialization: game files, profile files, equilibrium reports
// and trajectory CSVs.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sgplay/diagnostics.hpp"
#include "sgplay/equilibrium.hpp"
#include "sgplay/game.hpp"

namespace sgplay {

// Malformed or unreadable input file.
class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GameMetadata {
  std::optional<std::uint64_t> seed;
  std::string game_class;
  std::vector<double> offsets;
};

nlohmann::json game_to_json(const Game& game, const std::optional<GameMetadata>& metadata = std::nullopt);
// Throws InvalidInput on missing keys or inconsistent shapes. Value invariants
// are left to validate_game.
Game game_from_json(const nlohmann::json& j);
std::optional<GameMetadata> metadata_from_json(const nlohmann::json& j);

nlohmann::json profile_to_json(const MixedProfile& x);
MixedProfile profile_from_json(const Game& game, const nlohmann::json& j);

nlohmann::json report_to_json(const EquilibriumReport& report);

// Reads and parses a JSON file; InvalidInput on I/O or parse errors.
nlohmann::json read_json_file(const std::filesystem::path& path);
// Writes `j` with two-space indentation and a trailing newline. Throws
// std::runtime_error when the file cannot be written.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

std::vector<std::string> csv_header(const Trajectory& traj, int num_states);
void write_csv(std::ostream& out, const Trajectory& traj, int num_states);
void write_csv_file(const std::filesystem::path& path, const Trajectory& traj, int num_states);

}  // namespace sgplay
