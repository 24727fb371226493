#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vsq/scenarios.hpp"

namespace vsq {

struct RunConfig {
  PhysicsSetup physics;
  RunSettings settings;
  std::string output_dir;  ///< empty: no artifacts unless the CLI supplies --out
  bool operator==(const RunConfig&) const = default;
};

/// Every problem found while reading a config, each formatted "line N: section.key: message"
/// (or "section.key: message" for cross-field constraints).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Parses the sectioned key = value format documented in README.md. Missing keys keep the
/// RunConfig defaults; unknown sections or keys, malformed values and violated constraints are
/// all collected and thrown together as ConfigError.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Full config text with every key spelled out; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

RunConfig from_scenario(const Scenario& s);

/// Physical-unit input for `vsq convert`: a [physical] section plus optional [beta2],
/// [delta_beta1] and [delta_beta] coefficient sections (base, modulation, period_m, depth, sense).
/// An absent [beta2] section means beta2 = beta2_avg everywhere.
PhysicalParams parse_physical_config(std::string_view text);

}  // namespace vsq
