#ifndef JV2_ENGINE_HPP
#define JV2_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jv2/physics.hpp"
#include "jv2/rng.hpp"
#include "jv2/rulebook.hpp"
#include "jv2/seedlab.hpp"
#include "jv2/spatial_index.hpp"

namespace jv2 {

enum class EventKind : std::uint8_t {
  BondFormed,
  BondBroken,
  Split,
  FoldStart,
  UnfoldStart,
  Shatter,
  SeedPheneCreated,
  MeshJoin,
  Diagnostic
};

const char* eventKindName(EventKind kind);

struct Event {
  std::uint64_t step = 0;
  EventKind kind = EventKind::Diagnostic;
  std::vector<MachineId> subjects;
  std::vector<std::pair<std::string, std::string>> detail;

  /// Value of a detail key, or empty.
  std::string get(const std::string& key) const;

  friend bool operator==(const Event&, const Event&) = default;
};

struct EventTally {
  std::uint64_t shatters = 0;
  std::uint64_t unfolds = 0;

  friend bool operator==(const EventTally&, const EventTally&) = default;
};

struct World {
  PhysicsParams params;
  MachineBody body;
  RuleConstants rules;
  std::uint64_t stepNumber = 0;
  Rng rng;
  std::vector<MachineState> machines;  // machines[i].id() == i
  std::map<MachineId, Pose> pins;      // held at a fixed pose by the experimenter
  EventTally tally;

  RuleContext context() const { return {rules, body, params.fieldRadius}; }

  friend bool operator==(const World&, const World&) = default;
};

struct WorldConfig {
  PhysicsParams physics;
  RuleConstants rules;
  MachineBody body;
  std::map<int, std::uint32_t> freeCounts;  // machine type -> count
  std::uint64_t rngSeed = 1;
};

/// Seed laid out horizontally at the container centre, free machines scattered so that no two
/// arm-tip fields touch. Throws std::invalid_argument when the container cannot hold them.
World initWorld(const WorldConfig& config, const SeedSpec& seed);

/// Appends a machine at an explicit pose with default internal state and returns its id.
MachineId addMachine(World& world, MachineType type, const Pose& pose);

/// Forms a bond directly, bypassing the rules (scenario construction).
void connect(World& world, MachineId a, BondSlot slotA, MachineId b, BondSlot slotB);

/// Removes a bond from outside the rules; both ends notice the loss on their next step.
void severBond(World& world, MachineId a, BondSlot slotA);

struct StepOptions {
  /// Order in which the automaton visits machines. Empty means id order. Results do not
  /// depend on it; it exists so that tests can prove that.
  std::vector<MachineId> evaluationOrder;
  SpatialIndex::Mode indexMode = SpatialIndex::Mode::Grid;
};

/// Advances one step and returns its events, sorted by kind then subjects.
/// Throws IntegrityError if the committed world breaks an invariant.
std::vector<Event> step(World& world, const StepOptions& options = {});

struct BondRequest {
  MachineId requester;
  BondSlot arm;
  MachineId target;
  BondSlot targetArm;

  friend bool operator==(const BondRequest&, const BondRequest&) = default;
};

/// Keeps reciprocal requests whose slots are both empty in `snapshot`, then accepts greedily in
/// ascending (lower id, its arm, higher id, its arm) order so that no slot is claimed twice.
/// Accepted bonds are returned with the lower id as requester. Independent of input order.
std::vector<BondRequest> arbitrate(std::span<const BondRequest> requests, std::span<const MachineState> snapshot);

using StepObserver = std::function<void(const World&, std::span<const Event>)>;
using StopPredicate = std::function<bool(const World&)>;

struct RunOptions {
  std::uint64_t maxSteps = 0;
  std::vector<StepObserver> observers;
  StopPredicate stopWhen;  // checked after each step; empty means run to maxSteps
  SpatialIndex::Mode indexMode = SpatialIndex::Mode::Grid;
  bool keepEvents = true;
};

struct RunResult {
  std::vector<Event> events;
  std::uint64_t stepsTaken = 0;
  bool stoppedEarly = false;
};

RunResult run(World& world, const RunOptions& options);

/// Throws IntegrityError describing the first broken invariant.
void checkIntegrity(const World& world);

/// Sideways-connected components in left-to-right order (a loop starts at its smallest id).
std::vector<MachineId> strandOf(std::span<const MachineState> machines, MachineId member);

// Checkpointing (format described in docs/checkpoint-format.md).

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> checkpoint(const World& world);
World restore(std::span<const std::uint8_t> bytes);

void saveCheckpoint(const World& world, const std::string& path);
World loadCheckpoint(const std::string& path);

}  // namespace jv2

#endif  // JV2_ENGINE_HPP
