#ifndef JV2_CONFIG_HPP
#define JV2_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "jv2/engine.hpp"

namespace jv2 {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class StopRule { Never, AllMeshed };

struct RunConfig {
  std::string seedText;
  std::map<int, std::uint32_t> freeCounts;
  PhysicsParams physics;
  RuleConstants rules;
  MachineBody body;
  std::uint64_t rngSeed = 1;
  std::uint64_t maxSteps = 100000;
  std::uint64_t snapshotEvery = 0;
  std::string outputDir = "jv2-out";
  StopRule stopWhen = StopRule::Never;
};

/// Command-line overrides; anything unset falls through to the file, then to defaults.
struct ConfigFlags {
  std::optional<std::string> configPath;
  std::optional<std::string> seed;
  std::vector<std::string> free;    // "TYPE=COUNT"
  std::vector<std::string> params;  // "KEY=VALUE"
  std::optional<std::uint64_t> steps;
  std::optional<std::uint64_t> rngSeed;
  std::optional<std::string> container;  // "WxH"
  std::optional<std::uint64_t> snapshotEvery;
  std::optional<std::string> outputDir;
};

/// Applies a JSON document on top of `base`. Unknown keys raise ConfigError naming the key.
void applyJson(RunConfig& config, const nlohmann::json& doc);

/// Sets one flat parameter: physics fields by name (springK, dt, ...), rule constants in
/// upper case (FOLD_LIMIT, STRESS_LIMIT, ...), arm lengths as arm.left, arm.up, ...
void applyParam(RunConfig& config, const std::string& key, const std::string& value);

/// Flags over file over defaults. The file is flags.configPath, else `envConfigPath`.
/// Validates the result; a missing seed is an error.
RunConfig loadConfig(const ConfigFlags& flags, const char* envConfigPath = nullptr);

/// Fully explicit form, every default materialized; applyJson(RunConfig{}, toJson(c)) == c.
nlohmann::ordered_json toJson(const RunConfig& config);

void validate(const RunConfig& config);

WorldConfig worldConfig(const RunConfig& config);

/// Flat parameter names accepted by applyParam, in documentation order.
std::vector<std::string> paramKeys();

}  // namespace jv2

#endif  // JV2_CONFIG_HPP
