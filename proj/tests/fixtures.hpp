// Scenario builders shared by the unit tests and the acceptance binary.
#ifndef JV2_TESTS_FIXTURES_HPP
#define JV2_TESTS_FIXTURES_HPP

#include <cmath>
#include <vector>

#include "jv2/engine.hpp"

namespace jv2::testing {

inline MachineState makeMachine(MachineId id, int type, const Pose& pose = {}) {
  MachineState m;
  m.internal.id = id;
  m.internal.type = MachineType::of(type);
  m.pose = pose;
  return m;
}

inline Pose poseAt(double x, double y, double heading = 0.0) {
  Pose p;
  p.position = {x, y};
  p.heading = heading;
  return p;
}

/// Poses of a strand at rest: each machine's Right tip on the next one's Left tip, the
/// heading turning by `turnsRad[i]` (signed, CCW-positive) between machine i and i+1.
inline std::vector<Pose> chainPoses(const Pose& first, const std::vector<double>& turnsRad, const MachineBody& body) {
  std::vector<Pose> out{first};
  for (double turn : turnsRad) {
    const Pose& prev = out.back();
    Pose next;
    next.heading = prev.heading + turn;
    next.position = armTip(prev, body, Arm::Right) - armOffset(next.heading, body, Arm::Left);
    out.push_back(next);
  }
  return out;
}

/// Ideal folded loop of the given types, centred on `centre`, first machine at `heading`.
inline std::vector<Pose> foldedLoopPoses(const std::vector<int>& types, const Vec2d& centre, double heading,
                                         const MachineBody& body) {
  std::vector<double> turns;
  for (std::size_t i = 0; i + 1 < types.size(); ++i) {
    MachineState a = makeMachine(0, types[i]), b = makeMachine(1, types[i + 1]);
    a.internal.folded = b.internal.folded = true;
    turns.push_back(targetSidewaysAngle(a, b));
  }
  std::vector<Pose> poses = chainPoses(poseAt(0, 0, heading), turns, body);
  Vec2d mean = Vec2d::Zero();
  for (const Pose& p : poses) mean += p.position;
  mean /= double(poses.size());
  for (Pose& p : poses) p.position += centre - mean;
  return poses;
}

/// Adds a closed, folded phene to the world and returns its ids (left to right).
inline std::vector<MachineId> addPhene(World& world, const std::vector<int>& types, const Vec2d& centre,
                                       double heading, bool inMesh) {
  const auto poses = foldedLoopPoses(types, centre, heading, world.body);
  std::vector<MachineId> ids;
  for (std::size_t i = 0; i < types.size(); ++i) {
    const MachineId id = addMachine(world, MachineType::of(types[i]), poses[i]);
    auto& in = world.machines[id].internal;
    in.folded = true;
    in.inMesh = inMesh;
    in.replicated = true;
    in.strandPosition = i == 0 ? 1 : i + 1 == types.size() ? 3 : 2;
    ids.push_back(id);
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    connect(world, ids[i], BondSlot::Right, ids[(i + 1) % ids.size()], BondSlot::Left);
  }
  return ids;
}

/// Adds a straight, unfolded strand laid out along +x from `start`.
inline std::vector<MachineId> addGene(World& world, const std::vector<int>& types, const Vec2d& start,
                                      double heading = 0.0) {
  const auto poses = chainPoses(poseAt(start.x(), start.y(), heading), std::vector<double>(types.size() - 1, 0.0),
                                world.body);
  std::vector<MachineId> ids;
  for (std::size_t i = 0; i < types.size(); ++i) {
    const MachineId id = addMachine(world, MachineType::of(types[i]), poses[i]);
    world.machines[id].internal.strandPosition = i == 0 ? 1 : i + 1 == types.size() ? 3 : 2;
    if (i > 0) connect(world, ids.back(), BondSlot::Right, id, BondSlot::Left);
    ids.push_back(id);
  }
  return ids;
}

/// Free machines facing each template machine with their Up tips on the template's Up tips,
/// the copy's order running the other way. Returns the copies in template order.
inline std::vector<MachineId> addCopyUnder(World& world, const std::vector<MachineId>& templ) {
  std::vector<MachineId> ids;
  for (MachineId t : templ) {
    const Pose& tp = world.machines[t].pose;
    Pose p;
    p.heading = tp.heading + kPi;
    p.position = armTip(tp, world.body, Arm::Up) - armOffset(p.heading, world.body, Arm::Up);
    ids.push_back(addMachine(world, world.machines[t].type(), p));
  }
  return ids;
}

/// Empty world with Brownian motion switched off.
inline World quietWorld(double width = 40.0, double height = 40.0) {
  World w;
  w.params.containerWidth = width;
  w.params.containerHeight = height;
  w.params.brownianLinearSigma = 0.0;
  w.params.brownianAngularSigma = 0.0;
  return w;
}

inline std::size_t countKind(const std::vector<Event>& events, EventKind kind) {
  std::size_t n = 0;
  for (const Event& e : events) n += e.kind == kind;
  return n;
}

}  // namespace jv2::testing

#endif  // JV2_TESTS_FIXTURES_HPP
