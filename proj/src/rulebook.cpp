#include "jv2/rulebook.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace jv2 {

void RuleConstants::validate() const {
  if (foldLimit == 0 || stressLimit == 0 || repelDuration == 0) {
    throw std::invalid_argument("FOLD_LIMIT, STRESS_LIMIT and REPEL_DURATION must be positive");
  }
  if (!(angleToleranceDeg > 0.0) || !(overlapHeadingToleranceDeg > 0.0)) {
    throw std::invalid_argument("angle tolerances must be positive");
  }
  if (!(distanceToleranceFactor > 0.0) || !(breakDistanceFactor > distanceToleranceFactor)) {
    throw std::invalid_argument("distance tolerance must be positive and below the break distance");
  }
}

Arm slotArm(BondSlot slot) {
  switch (slot) {
    case BondSlot::Left: return Arm::Left;
    case BondSlot::Right: return Arm::Right;
    case BondSlot::Up: return Arm::Up;
    case BondSlot::Overlap: return Arm::OverlapDetector;
  }
  return Arm::Up;
}

const char* slotName(BondSlot slot) { return armName(slotArm(slot)); }

std::optional<MachineId>& BondSet::operator[](BondSlot slot) {
  switch (slot) {
    case BondSlot::Left: return left;
    case BondSlot::Right: return right;
    case BondSlot::Up: return up;
    case BondSlot::Overlap: break;
  }
  return overlap;
}

const std::optional<MachineId>& BondSet::operator[](BondSlot slot) const {
  return const_cast<BondSet&>(*this)[slot];
}

int BondSet::count() const {
  return int(left.has_value()) + int(right.has_value()) + int(up.has_value()) + int(overlap.has_value());
}

// ---------------------------------------------------------------------------
// Tables

bool geneUpBondAllowed(MachineType a, MachineType b) { return a == b; }

bool pheneUpBondAllowed(MachineType a, MachineType b) {
  const int x = a.value();
  const int y = b.value();
  return (x == 2 && y == 2) || (x == 3 && y == 4) || (x == 4 && y == 3) || (x == 4 && y == 4);
}

std::optional<int> foldAngle(MachineType leftType, MachineType rightType) {
  // -1 marks the unassigned cells.
  static constexpr std::array<std::array<int, 4>, 4> kTable = {{
      {0, 0, 0, 0},
      {0, 120, 45, 90},
      {0, 45, -1, -1},
      {0, 90, -1, 60},
  }};
  const int v = kTable[leftType.value() - 1][rightType.value() - 1];
  if (v < 0) return std::nullopt;
  return v;
}

std::uint8_t bendLocation(std::optional<MachineType> leftNeighbour, std::optional<MachineType> rightNeighbour) {
  const bool leftStraight = leftNeighbour && leftNeighbour->isStraight();
  const bool rightStraight = rightNeighbour && rightNeighbour->isStraight();
  if (rightStraight && !leftStraight) return 1;
  if (leftStraight && !rightStraight) return 2;
  if (!leftStraight && !rightStraight) return 3;
  return 4;
}

bool bendLocationBondAllowed(int a, int b) { return (a == 1 && b == 2) || (a == 2 && b == 1) || (a == 3 && b == 3); }

std::vector<MachineType> mirrorOfTemplate(std::span<const MachineType> parentTypes) {
  return {parentTypes.rbegin(), parentTypes.rend()};
}

// ---------------------------------------------------------------------------
// Angles and tolerance

DesiredAngle desiredSidewaysAngle(const MachineState& leftMachine, const MachineState& rightMachine) {
  if (!(leftMachine.internal.folded && rightMachine.internal.folded)) return {};
  const auto angle = foldAngle(leftMachine.type(), rightMachine.type());
  if (!angle) return {0.0, true};
  return {double(*angle), false};
}

double targetSidewaysAngle(const MachineState& leftMachine, const MachineState& rightMachine) {
  return -degToRad(desiredSidewaysAngle(leftMachine, rightMachine).degrees);
}

namespace {

struct BondGeometry {
  double angleError;  // radians, normalized
  double tipSeparation;
};

BondGeometry measureBond(const MachineState& self, BondSlot slot, const MachineState& other, const MachineBody& body) {
  switch (slot) {
    case BondSlot::Left: {
      const double rel = relativeBondAngle(other.pose, self.pose, BondKind::Sideways);
      const double target = targetSidewaysAngle(other, self);
      return {normalizeAngle(rel - target),
              (armTip(self.pose, body, Arm::Left) - armTip(other.pose, body, Arm::Right)).norm()};
    }
    case BondSlot::Right: {
      const double rel = relativeBondAngle(self.pose, other.pose, BondKind::Sideways);
      const double target = targetSidewaysAngle(self, other);
      return {normalizeAngle(rel - target),
              (armTip(self.pose, body, Arm::Right) - armTip(other.pose, body, Arm::Left)).norm()};
    }
    case BondSlot::Up: {
      const double rel = relativeBondAngle(self.pose, other.pose, BondKind::Up);
      return {rel, (armTip(self.pose, body, Arm::Up) - armTip(other.pose, body, Arm::Up)).norm()};
    }
    case BondSlot::Overlap: break;
  }
  return {0.0, 0.0};
}

}  // namespace

bool bondInTolerance(const MachineState& self, BondSlot slot, const MachineState& other, const RuleContext& ctx) {
  if (slot == BondSlot::Overlap) return true;
  const BondGeometry g = measureBond(self, slot, other, ctx.body);
  return std::abs(g.angleError) <= degToRad(ctx.rules.angleToleranceDeg) && g.tipSeparation <= ctx.distanceTolerance();
}

namespace {

const MachineState& resolve(const StateLookup& lookup, const MachineState& self, MachineId id) {
  const MachineState* s = lookup(id);
  if (s == nullptr) {
    throw IntegrityError("machine " + std::to_string(self.id()) + " is bonded to machine " + std::to_string(id) +
                         " which is missing from its neighbourhood");
  }
  return *s;
}

}  // namespace

bool inTolerance(const MachineState& self, const StateLookup& bonded, const RuleContext& ctx) {
  if (self.internal.folded && self.isStrandMember() && !(self.bonds.left && self.bonds.right)) return false;
  for (BondSlot slot : {BondSlot::Left, BondSlot::Right, BondSlot::Up}) {
    const auto& id = self.bonds[slot];
    if (!id) continue;
    if (!bondInTolerance(self, slot, resolve(bonded, self, *id), ctx)) return false;
  }
  return true;
}

DerivedState deriveState(const MachineState& self, const StateLookup& bonded, const RuleContext& ctx) {
  DerivedState d;
  d.inTolerance = inTolerance(self, bonded, ctx);
  std::optional<MachineType> leftType;
  std::optional<MachineType> rightType;
  if (self.bonds.left) leftType = resolve(bonded, self, *self.bonds.left).type();
  if (self.bonds.right) rightType = resolve(bonded, self, *self.bonds.right).type();
  d.bendLocation = bendLocation(leftType, rightType);
  return d;
}

// ---------------------------------------------------------------------------
// Eligibility

namespace {

bool quiescent(const MachineState& m) { return !m.internal.shatter && !m.internal.unfold; }

bool isTemplate(const InternalState& s) { return s.seedGene || s.replicated; }

bool sidewaysNeighbours(const MachineState& a, const MachineState& b) {
  return a.bonds.left == b.id() || a.bonds.right == b.id();
}

}  // namespace

bool upBondEligible(const MachineState& a, const MachineState& b, const DerivedState& aDerived,
                    const DerivedState& bDerived) {
  if (a.id() == b.id()) return false;
  if (!aDerived.inTolerance || !bDerived.inTolerance) return false;
  const InternalState& x = a.internal;
  const InternalState& y = b.internal;
  if (!x.folded && !y.folded) {
    const bool aStrand = a.isStrandMember();
    const bool bStrand = b.isStrandMember();
    if (!((aStrand && b.isFree()) || (bStrand && a.isFree()))) return false;
    const InternalState& strand = aStrand ? x : y;
    // A template that is splitting or still pushing its copy away takes no new partners.
    if (strand.repelCounter > 0 || strand.splitState >= 3) return false;
    return geneUpBondAllowed(a.type(), b.type());
  }
  if (x.folded && y.folded) {
    return pheneUpBondAllowed(a.type(), b.type()) &&
           bendLocationBondAllowed(aDerived.bendLocation, bDerived.bendLocation) && (x.inMesh || y.inMesh);
  }
  return false;
}

std::vector<BondOpportunity> bondOpportunities(const MachineState& self, const DerivedState& selfDerived,
                                               const MachineState* selfUp, const MachineState& other,
                                               const DerivedState& otherDerived, const RuleContext& ctx) {
  std::vector<BondOpportunity> out;
  if (self.id() == other.id() || !quiescent(self) || !quiescent(other)) return out;
  const InternalState& s = self.internal;
  const InternalState& o = other.internal;

  if (!self.bonds.up && !other.bonds.up && upBondEligible(self, other, selfDerived, otherDerived)) {
    out.push_back({BondSlot::Up, BondSlot::Up});
  }

  // Copy strand: two machines hanging off adjacent template machines join Left-to-Right with
  // mirrored handedness.
  if (!s.folded && !o.folded && self.bonds.up && other.bonds.up && selfUp != nullptr) {
    if (!self.bonds.left && !other.bonds.right && selfUp->bonds.right == other.bonds.up) {
      out.push_back({BondSlot::Left, BondSlot::Right});
    }
    if (!self.bonds.right && !other.bonds.left && selfUp->bonds.left == other.bonds.up) {
      out.push_back({BondSlot::Right, BondSlot::Left});
    }
  }

  // Loop closure of a folded strand: the open right end meets an open left end.
  if (s.folded && o.folded) {
    if (!self.bonds.right && self.bonds.left && !other.bonds.left && other.bonds.right) {
      out.push_back({BondSlot::Right, BondSlot::Left});
    }
    if (!self.bonds.left && self.bonds.right && !other.bonds.right && other.bonds.left) {
      out.push_back({BondSlot::Left, BondSlot::Right});
    }
  }

  if (s.folded && o.folded && s.inMesh && o.inMesh && !self.bonds.overlap && !other.bonds.overlap &&
      !sidewaysNeighbours(self, other)) {
    const double headingGap = std::abs(normalizeAngle(self.pose.heading - other.pose.heading));
    if (headingGap <= degToRad(ctx.rules.overlapHeadingToleranceDeg)) {
      out.push_back({BondSlot::Overlap, BondSlot::Overlap});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Automaton

const MachineView* Neighbourhood::find(MachineId id) const {
  for (const MachineView& v : bonded) {
    if (v.state->id() == id) return &v;
  }
  for (const MachineView& v : nearby) {
    if (v.state->id() == id) return &v;
  }
  return nullptr;
}

namespace {

class Transition {
 public:
  Transition(const Neighbourhood& hood, const RuleContext& ctx)
      : hood_(hood), ctx_(ctx), self_(*hood.self.state), in_(self_.internal), n_(in_) {
    left_ = sense(self_.bonds.left);
    right_ = sense(self_.bonds.right);
    up_ = sense(self_.bonds.up);
    overlap_ = sense(self_.bonds.overlap);
  }

  AutomatonResult run() {
    if (in_.shatter) {
      dropEverything();
      return finish();
    }
    if (checkShatter()) return finish();
    if (in_.unfold) {
      performUnfold();
      return finish();
    }
    if (checkUnfold()) return finish();
    signalFolding();
    const bool fired = replicate();
    joinMesh();
    if (!fired) requestBonds();
    return finish();
  }

 private:
  const MachineView* sense(const std::optional<MachineId>& id) const {
    if (!id) return nullptr;
    for (const MachineView& v : hood_.bonded) {
      if (v.state->id() == *id) return &v;
    }
    throw IntegrityError("machine " + std::to_string(self_.id()) + " is bonded to machine " + std::to_string(*id) +
                         " which is missing from its neighbourhood");
  }

  static const InternalState& st(const MachineView* v) { return v->state->internal; }

  void emit(SignalKind kind, std::optional<MachineId> partner = std::nullopt, std::string detail = {}) {
    actions_.push_back(EmitEvent{Signal{kind, partner, std::move(detail)}});
  }

  void drop(BondSlot slot) { actions_.push_back(DropBond{slot}); }

  void dropEverything() {
    for (BondSlot slot : kAllSlots) {
      if (self_.bonds[slot]) drop(slot);
    }
    const MachineType type = in_.type;
    const MachineId id = in_.id;
    n_ = InternalState{};
    n_.type = type;
    n_.id = id;
  }

  bool stretched() const {
    for (BondSlot slot : {BondSlot::Left, BondSlot::Right, BondSlot::Up}) {
      const MachineView* v = slot == BondSlot::Left ? left_ : slot == BondSlot::Right ? right_ : up_;
      if (v == nullptr) continue;
      if (measureBond(self_, slot, *v->state, ctx_.body).tipSeparation > ctx_.breakDistance()) return true;
    }
    return false;
  }

  bool checkShatter() {
    std::string reason;
    if (in_.bondLost) {
      reason = "bond-lost";
    } else if (in_.splitState == 4) {
      reason = "split-error";
    } else if (stretched()) {
      reason = "bond-broken";
    } else if (!in_.replicated && up_ != nullptr && !in_.folded) {
      if (st(up_).folded) {
        reason = "template-folded";
      } else if ((left_ && st(left_).folded) || (right_ && st(right_).folded)) {
        reason = "neighbour-folded";
      }
    }
    const bool propagated = (left_ && st(left_).shatter) || (right_ && st(right_).shatter) ||
                            (up_ && st(up_).shatter && st(up_).replicated && !st(up_).folded);
    if (reason.empty() && !propagated) return false;
    n_.shatter = true;
    n_.bondLost = false;
    if (!reason.empty()) emit(SignalKind::Shatter, std::nullopt, reason);
    return true;
  }

  void performUnfold() {
    n_.folded = false;
    n_.inMesh = false;
    n_.unfold = false;
    n_.foldNow = false;
    n_.foldCounter = 0;
    n_.stressCounter = 0;
    n_.splitState = 1;
    n_.splitCounter = 0;
    if (up_) drop(BondSlot::Up);
    if (overlap_) drop(BondSlot::Overlap);
    // Reopen the loop where the strand was joined when it folded.
    if (in_.strandPosition == 1 && left_) drop(BondSlot::Left);
    if (in_.strandPosition == 3 && right_) drop(BondSlot::Right);
  }

  bool checkUnfold() {
    n_.stressCounter = hood_.self.derived.inTolerance ? 0 : in_.stressCounter + 1;
    if (overlap_) drop(BondSlot::Overlap);
    if (!in_.folded) return false;

    std::string reason;
    if (overlap_ && in_.id < overlap_->state->id()) {
      reason = "overlap";
    } else if (n_.stressCounter > ctx_.rules.stressLimit) {
      reason = "stress";
    }
    const bool propagated = (left_ && st(left_).unfold) || (right_ && st(right_).unfold);
    if (reason.empty() && !propagated) return false;
    n_.unfold = true;
    n_.stressCounter = 0;
    if (!reason.empty()) emit(SignalKind::UnfoldStart, overlap_ ? std::optional(overlap_->state->id()) : std::nullopt, reason);
    return true;
  }

  void signalFolding() {
    if (in_.folded || !self_.isStrandMember()) {
      n_.resetCounter = false;
      n_.foldNow = false;
      return;
    }
    const bool gainedUp = up_ != nullptr && !in_.hadUpNeighbour;
    n_.resetCounter = gainedUp || (right_ && st(right_).resetCounter);

    const bool leftmost = right_ != nullptr && left_ == nullptr;
    if (leftmost) {
      if (n_.resetCounter) {
        n_.foldCounter = 0;
      } else if (in_.foldCounter < std::numeric_limits<std::uint32_t>::max()) {
        n_.foldCounter = in_.foldCounter + 1;
      }
    }

    const bool partialCopy = up_ != nullptr && !in_.replicated;
    if (leftmost && !in_.seedGene && !partialCopy && in_.splitState < 3 && n_.foldCounter >= ctx_.rules.foldLimit) {
      foldNow();
      emit(SignalKind::FoldStart);
    } else if (left_ && st(left_).foldNow && !in_.seedGene) {
      foldNow();
    } else {
      n_.foldNow = false;
    }
  }

  void foldNow() {
    n_.folded = true;
    n_.foldNow = true;
    n_.splitState = 1;
    n_.splitCounter = 0;
    if (right_ && !foldAngle(in_.type, st(right_).type)) {
      emit(SignalKind::Diagnostic, right_->state->id(),
           "undefined fold angle for types " + std::to_string(in_.type.value()) + "-" +
               std::to_string(st(right_).type.value()) + "; bond held straight");
    }
  }

  /// Returns true when this machine completes its split this step.
  bool replicate() {
    if (in_.repelCounter > 0) n_.repelCounter = in_.repelCounter - 1;
    if (in_.folded || n_.folded || !self_.isStrandMember()) {
      n_.splitState = 1;
      n_.splitCounter = 0;
      return false;
    }

    const bool tmpl = isTemplate(in_);
    if (tmpl && in_.splitState == 3 && in_.splitCounter == 0 && up_) {
      fire(false);
      return true;
    }
    if (!tmpl && up_ && isTemplate(st(up_)) && st(up_).splitState == 3 && st(up_).splitCounter == 0) {
      fire(true);
      return true;
    }
    if (!tmpl) {
      n_.splitState = 1;
      n_.splitCounter = 0;
      return false;
    }

    if (!up_) {
      n_.splitState = in_.splitState == 3 ? 4 : 1;
      n_.splitCounter = 0;
      return false;
    }
    if (isTemplate(st(up_))) {
      // Two replicated, unfolded strands should never stay joined by an up bond.
      n_.splitState = 4;
      return false;
    }
    if (in_.splitState == 3) {
      n_.splitCounter = in_.splitCounter - 1;
      return false;
    }

    const bool rightCovered = !right_ || (right_->state->bonds.up && right_->state->bonds.up == up_->state->bonds.left);
    const bool leftCovered = !left_ || (left_->state->bonds.up && left_->state->bonds.up == up_->state->bonds.right);
    const bool ready = rightCovered && leftCovered && (!left_ || st(left_).splitState >= 2);
    if (!ready) {
      n_.splitState = 1;
      n_.splitCounter = 0;
      return false;
    }
    const std::uint32_t rank = left_ ? st(left_).splitCounter + 1 : 0;
    if (!right_) {
      n_.splitState = 3;
      n_.splitCounter = rank;
    } else if (st(right_).splitState == 3) {
      if (st(right_).splitCounter == 0) {
        n_.splitState = 4;  // joined the echo too late to split in step with the rest
      } else {
        n_.splitState = 3;
        n_.splitCounter = st(right_).splitCounter - 1;
      }
    } else {
      n_.splitState = 2;
      n_.splitCounter = rank;
    }
    return false;
  }

  void fire(bool copy) {
    drop(BondSlot::Up);
    actions_.push_back(ActivateRepellor{});
    n_.replicated = true;
    n_.foldCounter = 0;
    n_.repelCounter = ctx_.rules.repelDuration;
    n_.splitState = 1;
    n_.splitCounter = 0;
    n_.resetCounter = false;
    emit(SignalKind::SplitFire, up_->state->id(), copy ? "copy" : "template");
    if (copy) {
      if (st(up_).seedPhene) {
        n_.folded = true;
        n_.inMesh = true;
        emit(SignalKind::SeedPheneCreated, up_->state->id());
      }
    } else {
      n_.seedPhene = false;
    }
  }

  void joinMesh() {
    if (!n_.folded || in_.inMesh || n_.inMesh) return;
    if (up_ && st(up_).inMesh && st(up_).folded) {
      n_.inMesh = true;
      emit(SignalKind::MeshJoin, up_->state->id());
      return;
    }
    if ((left_ && st(left_).inMesh && bondInTolerance(self_, BondSlot::Left, *left_->state, ctx_)) ||
        (right_ && st(right_).inMesh && bondInTolerance(self_, BondSlot::Right, *right_->state, ctx_))) {
      n_.inMesh = true;
    }
  }

  void requestBonds() {
    const double capture = ctx_.distanceTolerance();
    const double fieldContact = 2.0 * ctx_.fieldRadius;
    const MachineState* upState = up_ ? up_->state : nullptr;
    for (const MachineView& other : hood_.nearby) {
      if (other.state->id() == self_.id()) continue;
      for (const BondOpportunity& opp :
           bondOpportunities(self_, hood_.self.derived, upState, *other.state, other.derived, ctx_)) {
        const double gap = (armTip(self_.pose, ctx_.body, slotArm(opp.selfSlot)) -
                            armTip(other.state->pose, ctx_.body, slotArm(opp.otherSlot)))
                               .norm();
        const bool inReach = opp.selfSlot == BondSlot::Overlap ? gap < fieldContact : gap <= capture;
        if (inReach) {
          actions_.push_back(RequestBond{opp.selfSlot, other.state->id(), opp.otherSlot});
        }
      }
    }
  }

  AutomatonResult finish() {
    n_.hadUpNeighbour = up_ != nullptr;
    if (!in_.folded && !n_.shatter) {
      n_.strandPosition = (right_ && !left_) ? 1 : (left_ && !right_) ? 3 : 2;
    }
    if (!self_.bonds.hasSideways() && !in_.folded) n_.strandPosition = 2;
    return {n_, std::move(actions_)};
  }

  const Neighbourhood& hood_;
  const RuleContext& ctx_;
  const MachineState& self_;
  const InternalState& in_;
  InternalState n_;
  std::vector<Action> actions_;
  const MachineView* left_ = nullptr;
  const MachineView* right_ = nullptr;
  const MachineView* up_ = nullptr;
  const MachineView* overlap_ = nullptr;
};

}  // namespace

AutomatonResult stepAutomaton(const Neighbourhood& hood, const RuleContext& ctx) {
  if (hood.self.state == nullptr) throw std::invalid_argument("neighbourhood has no self state");
  return Transition(hood, ctx).run();
}

}  // namespace jv2
