#include "jv2/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>

namespace jv2 {

namespace {

using Json = nlohmann::json;

struct DoubleField {
  const char* name;
  double PhysicsParams::*member;
};

constexpr DoubleField kPhysicsFields[] = {
    {"dt", &PhysicsParams::dt},
    {"fieldRadius", &PhysicsParams::fieldRadius},
    {"springK", &PhysicsParams::springK},
    {"twistK", &PhysicsParams::twistK},
    {"repelK", &PhysicsParams::repelK},
    {"brownianLinearSigma", &PhysicsParams::brownianLinearSigma},
    {"brownianAngularSigma", &PhysicsParams::brownianAngularSigma},
    {"linearDrag", &PhysicsParams::linearDrag},
    {"angularDrag", &PhysicsParams::angularDrag},
    {"mass", &PhysicsParams::mass},
    {"inertia", &PhysicsParams::inertia},
    {"speedClamp", &PhysicsParams::speedClamp},
    {"containerWidth", &PhysicsParams::containerWidth},
    {"containerHeight", &PhysicsParams::containerHeight},
};

struct RuleField {
  const char* name;
  std::uint32_t RuleConstants::*count;
  double RuleConstants::*real;
};

constexpr RuleField kRuleFields[] = {
    {"FOLD_LIMIT", &RuleConstants::foldLimit, nullptr},
    {"STRESS_LIMIT", &RuleConstants::stressLimit, nullptr},
    {"REPEL_DURATION", &RuleConstants::repelDuration, nullptr},
    {"ANGLE_TOLERANCE_DEG", nullptr, &RuleConstants::angleToleranceDeg},
    {"DISTANCE_TOLERANCE", nullptr, &RuleConstants::distanceToleranceFactor},
    {"OVERLAP_HEADING_TOLERANCE_DEG", nullptr, &RuleConstants::overlapHeadingToleranceDeg},
    {"BREAK_DISTANCE", nullptr, &RuleConstants::breakDistanceFactor},
};

const char* stopRuleName(StopRule r) { return r == StopRule::AllMeshed ? "all-meshed" : "never"; }

double parseDouble(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("value for " + key + " is not a number: '" + text + "'");
}

std::uint64_t parseCount(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  if (!text.empty() && text[0] == '-') throw ConfigError("value for " + key + " must not be negative: '" + text + "'");
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("value for " + key + " is not a non-negative integer: '" + text + "'");
  return v;
}

std::uint64_t jsonCount(const Json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0) throw ConfigError(key + " must not be negative");
    return v.get<std::uint64_t>();
  }
  throw ConfigError(key + " must be a non-negative integer");
}

double jsonReal(const Json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key + " must be a number");
  return v.get<double>();
}

int freeType(const std::string& key) {
  if (key.size() == 1 && key[0] >= '1' && key[0] <= '4') return key[0] - '0';
  throw ConfigError("free machine type must be 1..4, got '" + key + "'");
}

void setFree(RunConfig& c, const std::string& typeKey, std::uint64_t count) {
  if (count > std::numeric_limits<std::uint32_t>::max()) throw ConfigError("free count for type " + typeKey + " too large");
  c.freeCounts[freeType(typeKey)] = std::uint32_t(count);
}

void setArm(RunConfig& c, const std::string& name, double v, const std::string& key) {
  for (Arm arm : kAllArms) {
    if (name == armName(arm)) {
      c.body.length(arm) = v;
      return;
    }
  }
  throw ConfigError("unknown key '" + key + "'");
}

void parseContainer(RunConfig& c, const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw ConfigError("container must be WxH, got '" + text + "'");
  c.physics.containerWidth = parseDouble("container width", text.substr(0, x));
  c.physics.containerHeight = parseDouble("container height", text.substr(x + 1));
}

}  // namespace

std::vector<std::string> paramKeys() {
  std::vector<std::string> keys;
  for (const auto& f : kPhysicsFields) keys.emplace_back(f.name);
  for (const auto& f : kRuleFields) keys.emplace_back(f.name);
  for (Arm arm : kAllArms) keys.push_back(std::string("arm.") + armName(arm));
  return keys;
}

void applyParam(RunConfig& c, const std::string& key, const std::string& value) {
  for (const auto& f : kPhysicsFields) {
    if (key == f.name) {
      c.physics.*f.member = parseDouble(key, value);
      return;
    }
  }
  for (const auto& f : kRuleFields) {
    if (key == f.name) {
      if (f.count) {
        const std::uint64_t v = parseCount(key, value);
        if (v > std::numeric_limits<std::uint32_t>::max()) throw ConfigError(key + " is too large");
        c.rules.*f.count = std::uint32_t(v);
      } else {
        c.rules.*f.real = parseDouble(key, value);
      }
      return;
    }
  }
  if (key.rfind("arm.", 0) == 0) {
    setArm(c, key.substr(4), parseDouble(key, value), key);
    return;
  }
  throw ConfigError("unknown parameter '" + key + "'");
}

void applyJson(RunConfig& c, const Json& doc) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  for (const auto& [key, v] : doc.items()) {
    if (key == "seed") {
      if (!v.is_string()) throw ConfigError("seed must be a string like \"2-2-2\"");
      c.seedText = v.get<std::string>();
    } else if (key == "free") {
      if (!v.is_object()) throw ConfigError("free must map machine type to count");
      for (const auto& [t, n] : v.items()) setFree(c, t, jsonCount(n, "free." + t));
    } else if (key == "rngSeed") {
      c.rngSeed = jsonCount(v, key);
    } else if (key == "maxSteps") {
      c.maxSteps = jsonCount(v, key);
    } else if (key == "snapshotEvery") {
      c.snapshotEvery = jsonCount(v, key);
    } else if (key == "outputDir") {
      if (!v.is_string()) throw ConfigError("outputDir must be a string");
      c.outputDir = v.get<std::string>();
    } else if (key == "stopWhen") {
      const std::string s = v.is_string() ? v.get<std::string>() : "";
      if (s == "never") {
        c.stopWhen = StopRule::Never;
      } else if (s == "all-meshed") {
        c.stopWhen = StopRule::AllMeshed;
      } else {
        throw ConfigError("stopWhen must be \"never\" or \"all-meshed\"");
      }
    } else if (key == "physics") {
      if (!v.is_object()) throw ConfigError("physics must be an object");
      for (const auto& [k, x] : v.items()) {
        bool found = false;
        for (const auto& f : kPhysicsFields) {
          if (k == f.name) {
            c.physics.*f.member = jsonReal(x, "physics." + k);
            found = true;
          }
        }
        if (!found) throw ConfigError("unknown key 'physics." + k + "'");
      }
    } else if (key == "rules") {
      if (!v.is_object()) throw ConfigError("rules must be an object");
      for (const auto& [k, x] : v.items()) {
        bool found = false;
        for (const auto& f : kRuleFields) {
          if (k != f.name) continue;
          found = true;
          if (f.count) {
            const std::uint64_t n = jsonCount(x, "rules." + k);
            if (n > std::numeric_limits<std::uint32_t>::max()) throw ConfigError("rules." + k + " is too large");
            c.rules.*f.count = std::uint32_t(n);
          } else {
            c.rules.*f.real = jsonReal(x, "rules." + k);
          }
        }
        if (!found) throw ConfigError("unknown key 'rules." + k + "'");
      }
    } else if (key == "body") {
      if (!v.is_object()) throw ConfigError("body must be an object");
      for (const auto& [k, x] : v.items()) setArm(c, k, jsonReal(x, "body." + k), "body." + k);
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
}

void validate(const RunConfig& c) {
  if (c.seedText.empty()) throw ConfigError("no seed given (use --seed or \"seed\" in the config file)");
  try {
    parseSeed(c.seedText);
    c.body.validate();
    c.physics.validate(c.body);
    c.rules.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

RunConfig loadConfig(const ConfigFlags& flags, const char* envConfigPath) {
  RunConfig c;
  std::optional<std::string> path = flags.configPath;
  if (!path && envConfigPath != nullptr && *envConfigPath != '\0') path = envConfigPath;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("cannot read config file " + *path);
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config file " + *path + " is not valid JSON: " + e.what());
    }
    applyJson(c, doc);
  }
  if (flags.seed) c.seedText = *flags.seed;
  for (const std::string& f : flags.free) {
    const auto eq = f.find('=');
    if (eq == std::string::npos) throw ConfigError("--free expects TYPE=COUNT, got '" + f + "'");
    const std::string t = f.substr(0, eq);
    setFree(c, t, parseCount("free count for type " + t, f.substr(eq + 1)));
  }
  if (flags.steps) c.maxSteps = *flags.steps;
  if (flags.rngSeed) c.rngSeed = *flags.rngSeed;
  if (flags.container) parseContainer(c, *flags.container);
  if (flags.snapshotEvery) c.snapshotEvery = *flags.snapshotEvery;
  if (flags.outputDir) c.outputDir = *flags.outputDir;
  for (const std::string& p : flags.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw ConfigError("--param expects KEY=VALUE, got '" + p + "'");
    applyParam(c, p.substr(0, eq), p.substr(eq + 1));
  }
  validate(c);
  return c;
}

nlohmann::ordered_json toJson(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["seed"] = c.seedText;
  nlohmann::ordered_json free = nlohmann::ordered_json::object();
  for (const auto& [t, n] : c.freeCounts) free[std::to_string(t)] = n;
  j["free"] = free;
  j["rngSeed"] = c.rngSeed;
  j["maxSteps"] = c.maxSteps;
  j["snapshotEvery"] = c.snapshotEvery;
  j["outputDir"] = c.outputDir;
  j["stopWhen"] = stopRuleName(c.stopWhen);
  for (const auto& f : kPhysicsFields) j["physics"][f.name] = c.physics.*f.member;
  for (const auto& f : kRuleFields) {
    if (f.count) {
      j["rules"][f.name] = c.rules.*f.count;
    } else {
      j["rules"][f.name] = c.rules.*f.real;
    }
  }
  for (Arm arm : kAllArms) j["body"][armName(arm)] = c.body.length(arm);
  return j;
}

WorldConfig worldConfig(const RunConfig& c) {
  WorldConfig w;
  w.physics = c.physics;
  w.rules = c.rules;
  w.body = c.body;
  w.freeCounts = c.freeCounts;
  w.rngSeed = c.rngSeed;
  return w;
}

}  // namespace jv2
