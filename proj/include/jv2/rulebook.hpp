#ifndef JV2_RULEBOOK_HPP
#define JV2_RULEBOOK_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "jv2/geometry.hpp"

namespace jv2 {

/// Thrown when the world's bond graph or a neighbourhood snapshot is inconsistent.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tunable constants of the automaton. None of them are fixed by the model; these defaults
/// were chosen to make desk-scale runs replicate and mesh reliably.
struct RuleConstants {
  std::uint32_t foldLimit = 4000;
  std::uint32_t stressLimit = 600;
  std::uint32_t repelDuration = 120;
  double angleToleranceDeg = 15.0;
  double distanceToleranceFactor = 0.5;  // x fieldRadius
  double overlapHeadingToleranceDeg = 20.0;
  double breakDistanceFactor = 2.0;  // x fieldRadius; a stretched bond beyond this breaks

  void validate() const;

  friend bool operator==(const RuleConstants&, const RuleConstants&) = default;
};

/// Discrete, internal part of the state vector.
struct InternalState {
  MachineType type;
  MachineId id = 0;
  std::uint32_t foldCounter = 0;
  std::uint32_t repelCounter = 0;
  std::uint32_t stressCounter = 0;
  std::uint8_t strandPosition = 2;  // 1 leftmost, 2 interior/free, 3 rightmost; frozen while folded
  std::uint8_t splitState = 1;      // 1 replicating, 2 ready, 3 splitting, 4 error
  bool resetCounter = false;
  bool foldNow = false;
  bool unfold = false;
  bool seedGene = false;
  bool seedPhene = false;
  bool inMesh = false;
  bool replicated = false;
  bool shatter = false;
  bool folded = false;

  // Bookkeeping that the tables leave implicit.
  std::uint32_t splitCounter = 0;  // rank from the left end while readying, countdown while splitting
  bool hadUpNeighbour = false;     // up-neighbour presence in the previous snapshot
  bool bondLost = false;           // set by the engine when a bond is removed from outside the rules

  friend bool operator==(const InternalState&, const InternalState&) = default;
};

enum class BondSlot : std::uint8_t { Left, Right, Up, Overlap };
inline constexpr std::array<BondSlot, 4> kAllSlots = {BondSlot::Left, BondSlot::Right, BondSlot::Up,
                                                      BondSlot::Overlap};

Arm slotArm(BondSlot slot);

/// The slot a bond occupies on the other machine: Left pairs with Right, Up with Up.
inline BondSlot partnerSlot(BondSlot slot) {
  switch (slot) {
    case BondSlot::Left: return BondSlot::Right;
    case BondSlot::Right: return BondSlot::Left;
    default: return slot;
  }
}
const char* slotName(BondSlot slot);

struct BondSet {
  std::optional<MachineId> left;
  std::optional<MachineId> right;
  std::optional<MachineId> up;
  std::optional<MachineId> overlap;

  std::optional<MachineId>& operator[](BondSlot slot);
  const std::optional<MachineId>& operator[](BondSlot slot) const;

  bool empty() const { return !left && !right && !up && !overlap; }
  bool hasSideways() const { return left.has_value() || right.has_value(); }
  int count() const;

  friend bool operator==(const BondSet&, const BondSet&) = default;
};

struct DerivedState {
  bool inTolerance = true;
  std::uint8_t bendLocation = 3;
};

struct MachineState {
  InternalState internal;
  BondSet bonds;
  Pose pose;
  Kinematics kin;

  MachineId id() const { return internal.id; }
  MachineType type() const { return internal.type; }
  bool isFree() const { return bonds.empty(); }
  bool isStrandMember() const { return bonds.hasSideways(); }

  friend bool operator==(const MachineState&, const MachineState&) = default;
};

// ---------------------------------------------------------------------------
// Rule tables

bool geneUpBondAllowed(MachineType a, MachineType b);
bool pheneUpBondAllowed(MachineType a, MachineType b);

/// Fold angle in degrees for a sideways bond (row = left machine, column = right machine).
/// Empty optional marks the combinations with no assigned angle.
std::optional<int> foldAngle(MachineType leftType, MachineType rightType);

std::uint8_t bendLocation(std::optional<MachineType> leftNeighbour, std::optional<MachineType> rightNeighbour);
bool bendLocationBondAllowed(int a, int b);

/// Reversal: the copy faces the template, so its left-to-right order runs backwards.
std::vector<MachineType> mirrorOfTemplate(std::span<const MachineType> parentTypes);

struct RuleContext {
  const RuleConstants& rules;
  const MachineBody& body;
  double fieldRadius;

  double distanceTolerance() const { return rules.distanceToleranceFactor * fieldRadius; }
  double breakDistance() const { return rules.breakDistanceFactor * fieldRadius; }
};

struct DesiredAngle {
  double degrees = 0.0;
  bool undefinedPair = false;  // the type pair has no table entry; treated as straight
};

/// Table angle for the sideways bond when both ends are folded, otherwise 0.
DesiredAngle desiredSidewaysAngle(const MachineState& leftMachine, const MachineState& rightMachine);

/// Folds turn clockwise when walking a strand left to right, which puts the overlap
/// detectors inside the polygon and the up arms outside. This is the relative bond angle
/// the twist springs drive a sideways bond towards.
double targetSidewaysAngle(const MachineState& leftMachine, const MachineState& rightMachine);

/// Looks up snapshot states by id; returns nullptr for ids it does not know.
using StateLookup = std::function<const MachineState*(MachineId)>;

/// Per-bond tolerance check (angle and tip separation). `self` holds `slot`, bonded to `other`.
bool bondInTolerance(const MachineState& self, BondSlot slot, const MachineState& other, const RuleContext& ctx);

/// Derived variables of `self`. `bonded` must resolve every id in self.bonds.
DerivedState deriveState(const MachineState& self, const StateLookup& bonded, const RuleContext& ctx);

/// 1 iff every existing bond is within tolerance. A folded strand member with a missing
/// sideways neighbour is never in tolerance: open phenes have to unfold.
bool inTolerance(const MachineState& self, const StateLookup& bonded, const RuleContext& ctx);

bool upBondEligible(const MachineState& a, const MachineState& b, const DerivedState& aDerived,
                    const DerivedState& bDerived);

/// A potential bond between `self` and `other`: the slot on each side.
struct BondOpportunity {
  BondSlot selfSlot;
  BondSlot otherSlot;
};

/// Every bond `self` may form with `other` given their snapshot states, ignoring distance.
/// `selfUp` is self's up partner (needed for the copy-strand sideways rule), if any.
/// The result is symmetric: evaluating from `other`'s side yields the mirrored list.
std::vector<BondOpportunity> bondOpportunities(const MachineState& self, const DerivedState& selfDerived,
                                               const MachineState* selfUp, const MachineState& other,
                                               const DerivedState& otherDerived, const RuleContext& ctx);

// ---------------------------------------------------------------------------
// Automaton

enum class SignalKind : std::uint8_t { FoldStart, UnfoldStart, Shatter, SeedPheneCreated, MeshJoin, SplitFire, Diagnostic };

struct Signal {
  SignalKind kind;
  std::optional<MachineId> partner;
  std::string detail;
};

struct RequestBond {
  BondSlot slot;
  MachineId target;
  BondSlot targetSlot;
};
struct DropBond {
  BondSlot slot;
};
struct ActivateRepellor {};
struct EmitEvent {
  Signal signal;
};

using Action = std::variant<RequestBond, DropBond, ActivateRepellor, EmitEvent>;

/// Snapshot view of a machine plus its derived variables.
struct MachineView {
  const MachineState* state = nullptr;
  DerivedState derived;
};

/// Everything a machine may sense during one step: itself, the machines bonded to it and
/// the machines whose fields can reach its own.
struct Neighbourhood {
  MachineView self;
  std::span<const MachineView> bonded;
  std::span<const MachineView> nearby;

  const MachineView* find(MachineId id) const;
};

struct AutomatonResult {
  InternalState next;
  std::vector<Action> actions;
};

/// One discrete transition of a single machine. Pure: reads only the neighbourhood snapshot.
/// Throws IntegrityError if a bond of `self` references a machine not in `bonded`.
AutomatonResult stepAutomaton(const Neighbourhood& hood, const RuleContext& ctx);

}  // namespace jv2

#endif  // JV2_RULEBOOK_HPP
