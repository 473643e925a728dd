#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "gasphs/error.hpp"
#include "gasphs/sim.hpp"

namespace gasphs {

inline constexpr const char* kVersion = "0.1.0";

/// Scenario rejected while reading; carries the JSON path and, when known, the line.
class ScenarioError : public InvalidInput {
public:
  ScenarioError(const std::string& source, std::string path, std::optional<int> line, const std::string& message);

  const std::string& path() const noexcept { return path_; }
  std::optional<int> line() const noexcept { return line_; }

private:
  std::string path_;
  std::optional<int> line_;
};

/// Reads a scenario document (or a run manifest, whose "scenario" member is used).
/// Quantities carry their unit in the key suffix (`length_km`, `p_fixed_bar`, ...) and are
/// converted to SI here.
Scenario parse_scenario_text(std::string_view text, const std::string& source = "<scenario>");
Scenario parse_scenario(const std::filesystem::path& path);

/// Scenario in the same schema, every quantity in SI units.
std::string scenario_to_json(const Scenario& scenario, int indent = 2);

/// Hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

struct ManifestInfo {
  std::string input_file;
  std::string input_digest;  ///< SHA-256 of the input document
  std::string command;
};

/// Resolved SI scenario plus the frozen closure values of the prepared model.
std::string run_manifest_json(const Scenario& scenario, const PreparedRun& run, const ManifestInfo& info,
                              const OdeStats* stats = nullptr);

/// Random connected network with one supply node, for testing. Deterministic per seed on a
/// given build.
Scenario random_scenario(std::uint64_t seed);

}  // namespace gasphs
