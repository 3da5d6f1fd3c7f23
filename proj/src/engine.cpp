#include "jv2/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace jv2 {

const char* eventKindName(EventKind kind) {
  switch (kind) {
    case EventKind::BondFormed: return "BondFormed";
    case EventKind::BondBroken: return "BondBroken";
    case EventKind::Split: return "Split";
    case EventKind::FoldStart: return "FoldStart";
    case EventKind::UnfoldStart: return "UnfoldStart";
    case EventKind::Shatter: return "Shatter";
    case EventKind::SeedPheneCreated: return "SeedPheneCreated";
    case EventKind::MeshJoin: return "MeshJoin";
    case EventKind::Diagnostic: return "Diagnostic";
  }
  return "?";
}

std::string Event::get(const std::string& key) const {
  for (const auto& [k, v] : detail) {
    if (k == key) return v;
  }
  return {};
}

// ---------------------------------------------------------------------------
// World construction

namespace {

double minTipDistance(const Pose& a, const Pose& b, const MachineBody& body) {
  double best = std::numeric_limits<double>::infinity();
  for (Arm x : kAllArms) {
    const Vec2d ta = armTip(a, body, x);
    for (Arm y : kAllArms) best = std::min(best, (ta - armTip(b, body, y)).norm());
  }
  return best;
}

std::string joinIds(std::span<const MachineId> ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(ids[i]);
  }
  return out;
}

std::string typeString(std::span<const MachineState> machines, std::span<const MachineId> ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out += '-';
    out += char('0' + machines[ids[i]].type().value());
  }
  return out;
}

}  // namespace

MachineId addMachine(World& world, MachineType type, const Pose& pose) {
  MachineState m;
  m.internal.type = type;
  m.internal.id = MachineId(world.machines.size());
  m.pose = pose;
  m.pose.heading = wrapHeading(pose.heading);
  world.machines.push_back(m);
  return m.internal.id;
}

void connect(World& world, MachineId a, BondSlot slotA, MachineId b, BondSlot slotB) {
  if (a >= world.machines.size() || b >= world.machines.size() || a == b) {
    throw std::invalid_argument("connect: invalid machine ids");
  }
  if (partnerSlot(slotA) != slotB) throw std::invalid_argument("connect: slots do not pair");
  auto& sa = world.machines[a].bonds[slotA];
  auto& sb = world.machines[b].bonds[slotB];
  if (sa || sb) throw std::invalid_argument("connect: slot already bonded");
  sa = b;
  sb = a;
}

void severBond(World& world, MachineId a, BondSlot slotA) {
  if (a >= world.machines.size()) throw std::invalid_argument("severBond: invalid machine id");
  auto& sa = world.machines[a].bonds[slotA];
  if (!sa) throw std::invalid_argument("severBond: slot is empty");
  const MachineId b = *sa;
  world.machines[b].bonds[partnerSlot(slotA)].reset();
  sa.reset();
  world.machines[a].internal.bondLost = true;
  world.machines[b].internal.bondLost = true;
}

World initWorld(const WorldConfig& config, const SeedSpec& seed) {
  config.body.validate();
  config.physics.validate(config.body);
  config.rules.validate();
  if (seed.size() < 3) throw std::invalid_argument("seed needs at least 3 machines");

  World world;
  world.params = config.physics;
  world.body = config.body;
  world.rules = config.rules;
  world.rng.reseed(config.rngSeed);

  const double w = world.params.containerWidth;
  const double h = world.params.containerHeight;
  const double pitch = world.body.sidewaysPitch();
  const double span = double(seed.size() - 1) * pitch + 2.0 * world.body.length(Arm::Left);
  if (span > w) {
    std::ostringstream msg;
    msg << "container width " << w << " cannot hold the seed (needs " << span << ")";
    throw std::invalid_argument(msg.str());
  }

  const std::size_t n = seed.size();
  for (std::size_t i = 0; i < n; ++i) {
    Pose p;
    p.position = Vec2d(w / 2.0 + (double(i) - double(n - 1) / 2.0) * pitch, h / 2.0);
    const MachineId id = addMachine(world, seed.types[i], p);
    auto& in = world.machines[id].internal;
    in.seedGene = true;
    in.seedPhene = true;
    in.strandPosition = i == 0 ? 1 : i + 1 == n ? 3 : 2;
    if (i > 0) connect(world, id - 1, BondSlot::Right, id, BondSlot::Left);
  }

  std::uint64_t wanted = 0;
  for (const auto& [type, count] : config.freeCounts) {
    MachineType::of(type);
    wanted += count;
  }
  const double spacing = 2.0 * world.params.fieldRadius;
  constexpr int kAttempts = 20000;
  std::uint64_t placed = 0;
  for (const auto& [type, count] : config.freeCounts) {
    for (std::uint32_t k = 0; k < count; ++k) {
      bool ok = false;
      Pose p;
      for (int attempt = 0; attempt < kAttempts && !ok; ++attempt) {
        p.position = Vec2d(world.rng.uniform(0.0, w), world.rng.uniform(0.0, h));
        p.heading = world.rng.uniform(0.0, kTwoPi);
        ok = std::all_of(world.machines.begin(), world.machines.end(), [&](const MachineState& m) {
          return (m.pose.position - p.position).norm() > 2.0 * world.body.maxArmLength() + spacing ||
                 minTipDistance(m.pose, p, world.body) >= spacing;
        });
      }
      if (!ok) {
        std::ostringstream msg;
        msg << "container " << w << "x" << h << " has no room: placed " << placed << " of " << wanted
            << " free machines, " << (wanted - placed) << " short";
        throw std::invalid_argument(msg.str());
      }
      addMachine(world, MachineType::of(type), p);
      ++placed;
    }
  }
  checkIntegrity(world);
  return world;
}

// ---------------------------------------------------------------------------
// Integrity and strands

std::vector<MachineId> strandOf(std::span<const MachineState> machines, MachineId member) {
  // Walk to the left end (or all the way round a loop).
  MachineId start = member;
  bool loop = false;
  while (machines[start].bonds.left) {
    start = *machines[start].bonds.left;
    if (start == member) {
      loop = true;
      break;
    }
  }
  std::vector<MachineId> out;
  MachineId cur = start;
  while (true) {
    out.push_back(cur);
    const auto next = machines[cur].bonds.right;
    if (!next || *next == start) break;
    if (out.size() > machines.size()) throw IntegrityError("sideways chain does not terminate");
    cur = *next;
  }
  if (loop) std::rotate(out.begin(), std::min_element(out.begin(), out.end()), out.end());
  return out;
}

void checkIntegrity(const World& world) {
  const auto fail = [&](MachineId id, const std::string& why) {
    const MachineState& m = world.machines[id];
    std::ostringstream msg;
    msg << "integrity violation at step " << world.stepNumber << ", machine " << id << ": " << why << " [type "
        << m.type().value() << " pos (" << m.pose.position.x() << "," << m.pose.position.y() << ") bonds";
    for (BondSlot s : kAllSlots) {
      msg << ' ' << slotName(s) << '=' << (m.bonds[s] ? std::to_string(*m.bonds[s]) : "-");
    }
    msg << " folded=" << m.internal.folded << " inMesh=" << m.internal.inMesh << " splitState="
        << int(m.internal.splitState) << "]";
    throw IntegrityError(msg.str());
  };
  const std::size_t n = world.machines.size();
  for (std::size_t i = 0; i < n; ++i) {
    const MachineState& m = world.machines[i];
    const MachineId id = MachineId(i);
    if (m.id() != id) fail(id, "id does not match its index");
    if (m.internal.strandPosition < 1 || m.internal.strandPosition > 3) fail(id, "strand position out of range");
    if (m.internal.splitState < 1 || m.internal.splitState > 4) fail(id, "split state out of range");
    if (m.internal.seedGene && m.internal.folded) fail(id, "seed gene machine is folded");
    if (!m.pose.position.allFinite() || !std::isfinite(m.pose.heading)) fail(id, "non-finite pose");
    if (!world.pins.contains(id)) {
      const Vec2d& p = m.pose.position;
      if (p.x() < 0.0 || p.y() < 0.0 || p.x() > world.params.containerWidth || p.y() > world.params.containerHeight) {
        fail(id, "middle outside the container");
      }
    }
    for (BondSlot s : kAllSlots) {
      const auto& other = m.bonds[s];
      if (!other) continue;
      if (*other >= n) fail(id, std::string(slotName(s)) + " bond to a machine that does not exist");
      if (*other == id) fail(id, "bonded to itself");
      if (world.machines[*other].bonds[partnerSlot(s)] != id) {
        fail(id, std::string(slotName(s)) + " bond to " + std::to_string(*other) + " is not reciprocated");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Arbitration

std::vector<BondRequest> arbitrate(std::span<const BondRequest> requests, std::span<const MachineState> snapshot) {
  struct Claim {
    std::tuple<MachineId, BondSlot, MachineId, BondSlot> key;
    bool fromLower;
  };
  std::vector<Claim> claims;
  claims.reserve(requests.size());
  for (const BondRequest& r : requests) {
    if (r.requester == r.target || r.requester >= snapshot.size() || r.target >= snapshot.size()) continue;
    if (partnerSlot(r.arm) != r.targetArm) continue;
    if (snapshot[r.requester].bonds[r.arm] || snapshot[r.target].bonds[r.targetArm]) continue;
    if (r.requester < r.target) {
      claims.push_back({{r.requester, r.arm, r.target, r.targetArm}, true});
    } else {
      claims.push_back({{r.target, r.targetArm, r.requester, r.arm}, false});
    }
  }
  std::sort(claims.begin(), claims.end(), [](const Claim& a, const Claim& b) {
    return std::tie(a.key, a.fromLower) < std::tie(b.key, b.fromLower);
  });

  std::vector<BondRequest> accepted;
  std::set<std::pair<MachineId, BondSlot>> taken;
  for (std::size_t i = 0; i < claims.size();) {
    std::size_t j = i;
    bool lower = false;
    bool upper = false;
    while (j < claims.size() && claims[j].key == claims[i].key) {
      (claims[j].fromLower ? lower : upper) = true;
      ++j;
    }
    const auto& [lo, loSlot, hi, hiSlot] = claims[i].key;
    if (lower && upper && !taken.contains({lo, loSlot}) && !taken.contains({hi, hiSlot})) {
      taken.insert({lo, loSlot});
      taken.insert({hi, hiSlot});
      accepted.push_back({lo, loSlot, hi, hiSlot});
    }
    i = j;
  }
  return accepted;
}

// ---------------------------------------------------------------------------
// Step

namespace {

struct Scratch {
  std::vector<MachineState> snapshot;
  std::vector<Vec2d> positions;
  std::vector<DerivedState> derived;
  std::vector<std::uint32_t> nearStart;
  std::vector<MachineId> nearIds;
  std::vector<ForceAccumulator> acc;
  std::vector<BrownianKick> kicks;
  std::vector<AutomatonResult> results;
  std::vector<MachineView> bondedViews;
  std::vector<MachineView> nearbyViews;
  std::vector<MachineId> query;
  SpatialIndex index;
};

void addPair(std::vector<ForceAccumulator>& acc, MachineId a, MachineId b, const PairForces& f) {
  acc[a].force += f.forceA;
  acc[a].torque += f.torqueA;
  acc[b].force += f.forceB;
  acc[b].torque += f.torqueB;
}

/// Sideways component label per machine (smallest member id).
std::vector<MachineId> componentLabels(std::span<const MachineState> machines) {
  std::vector<MachineId> label(machines.size(), std::numeric_limits<MachineId>::max());
  for (std::size_t i = 0; i < machines.size(); ++i) {
    if (label[i] != std::numeric_limits<MachineId>::max()) continue;
    const auto strand = strandOf(machines, MachineId(i));
    const MachineId root = *std::min_element(strand.begin(), strand.end());
    for (MachineId m : strand) label[m] = root;
  }
  return label;
}

struct Origin {
  MachineId machine;
  const Signal* signal;
};

void computeForces(const World& world, Scratch& s) {
  const auto& snap = s.snapshot;
  const std::size_t n = snap.size();
  const RuleContext ctx = world.context();
  const MachineBody& body = world.body;
  const PhysicsParams& params = world.params;
  const double contact = 2.0 * params.fieldRadius;

  s.acc.assign(n, ForceAccumulator{});
  for (std::size_t i = 0; i < n; ++i) {
    const MachineState& a = snap[i];
    const MachineId ia = MachineId(i);
    if (a.bonds.right) {
      const MachineState& b = snap[*a.bonds.right];
      addPair(s.acc, ia, b.id(),
              bondForces(a.pose, b.pose, body, BondKind::Sideways, targetSidewaysAngle(a, b), params));
    }
    if (a.bonds.up && *a.bonds.up > ia) {
      const MachineState& b = snap[*a.bonds.up];
      addPair(s.acc, ia, b.id(), bondForces(a.pose, b.pose, body, BondKind::Up, 0.0, params));
    }
    const MachineState* aUp = a.bonds.up ? &snap[*a.bonds.up] : nullptr;
    for (std::uint32_t k = s.nearStart[i]; k < s.nearStart[i + 1]; ++k) {
      const MachineId ib = s.nearIds[k];
      if (ib <= ia) continue;
      const MachineState& b = snap[ib];
      if (a.internal.repelCounter > 0 && b.internal.repelCounter > 0) {
        addPair(s.acc, ia, ib, repellorForce(a.pose, b.pose, body, params));
      }
      for (const BondOpportunity& opp : bondOpportunities(a, s.derived[ia], aUp, b, s.derived[ib], ctx)) {
        if (opp.selfSlot == BondSlot::Overlap) continue;
        const Arm armA = slotArm(opp.selfSlot);
        const Arm armB = slotArm(opp.otherSlot);
        const double gap = (armTip(a.pose, body, armA) - armTip(b.pose, body, armB)).norm();
        if (gap < contact) addPair(s.acc, ia, ib, tipSpring(a.pose, armA, b.pose, armB, body, params.springK));
      }
    }
  }
}

void runAutomata(const World& world, const StepOptions& options, Scratch& s) {
  const auto& snap = s.snapshot;
  const std::size_t n = snap.size();
  const RuleContext ctx = world.context();
  s.results.assign(n, AutomatonResult{});

  std::vector<MachineId> order = options.evaluationOrder;
  if (order.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), MachineId(0));
  } else {
    std::vector<MachineId> check = order;
    std::sort(check.begin(), check.end());
    for (std::size_t i = 0; i < check.size(); ++i) {
      if (check.size() != n || check[i] != i) throw std::invalid_argument("evaluation order is not a permutation");
    }
  }

  for (MachineId id : order) {
    const MachineState& self = snap[id];
    s.bondedViews.clear();
    for (BondSlot slot : kAllSlots) {
      if (const auto& other = self.bonds[slot]) s.bondedViews.push_back({&snap[*other], s.derived[*other]});
    }
    s.nearbyViews.clear();
    for (std::uint32_t k = s.nearStart[id]; k < s.nearStart[id + 1]; ++k) {
      const MachineId other = s.nearIds[k];
      s.nearbyViews.push_back({&snap[other], s.derived[other]});
    }
    Neighbourhood hood{{&self, s.derived[id]}, s.bondedViews, s.nearbyViews};
    s.results[id] = stepAutomaton(hood, ctx);
  }
}

std::vector<Event> aggregateSignals(const World& world, const Scratch& s) {
  const auto& snap = s.snapshot;
  const std::size_t n = snap.size();
  const std::uint64_t stepNo = world.stepNumber;
  std::vector<Event> events;

  std::map<SignalKind, std::vector<Origin>> byKind;
  for (std::size_t i = 0; i < n; ++i) {
    for (const Action& a : s.results[i].actions) {
      if (const auto* e = std::get_if<EmitEvent>(&a)) byKind[e->signal.kind].push_back({MachineId(i), &e->signal});
    }
  }
  if (byKind.empty()) return events;
  const std::vector<MachineId> label = componentLabels(snap);

  const auto grouped = [&](SignalKind kind, EventKind out) {
    auto it = byKind.find(kind);
    if (it == byKind.end()) return;
    std::map<MachineId, std::vector<Origin>> groups;
    for (const Origin& o : it->second) groups[label[o.machine]].push_back(o);
    for (const auto& [root, origins] : groups) {
      Event ev{stepNo, out, strandOf(snap, root), {}};
      std::vector<MachineId> ids;
      for (const Origin& o : origins) ids.push_back(o.machine);
      ev.detail.emplace_back("origins", joinIds(ids));
      if (!origins.front().signal->detail.empty()) ev.detail.emplace_back("reason", origins.front().signal->detail);
      if (origins.front().signal->partner) {
        ev.detail.emplace_back("partner", std::to_string(*origins.front().signal->partner));
      }
      events.push_back(std::move(ev));
    }
  };
  grouped(SignalKind::FoldStart, EventKind::FoldStart);
  grouped(SignalKind::UnfoldStart, EventKind::UnfoldStart);
  grouped(SignalKind::Shatter, EventKind::Shatter);
  grouped(SignalKind::SeedPheneCreated, EventKind::SeedPheneCreated);
  grouped(SignalKind::MeshJoin, EventKind::MeshJoin);

  if (auto it = byKind.find(SignalKind::SplitFire); it != byKind.end()) {
    std::set<MachineId> parents;
    for (const Origin& o : it->second) {
      if (o.signal->detail == "template") parents.insert(label[o.machine]);
    }
    for (MachineId root : parents) {
      const auto parent = strandOf(snap, root);
      const auto withUp = std::find_if(parent.begin(), parent.end(), [&](MachineId m) { return snap[m].bonds.up.has_value(); });
      if (withUp == parent.end()) continue;
      const auto child = strandOf(snap, *snap[*withUp].bonds.up);
      Event ev{stepNo, EventKind::Split, parent, {}};
      ev.subjects.insert(ev.subjects.end(), child.begin(), child.end());
      ev.detail.emplace_back("parent", joinIds(parent));
      ev.detail.emplace_back("child", joinIds(child));
      ev.detail.emplace_back("parentTypes", typeString(snap, parent));
      ev.detail.emplace_back("childTypes", typeString(snap, child));
      events.push_back(std::move(ev));
    }
  }

  if (auto it = byKind.find(SignalKind::Diagnostic); it != byKind.end()) {
    for (const Origin& o : it->second) {
      Event ev{stepNo, EventKind::Diagnostic, {o.machine}, {{"message", o.signal->detail}}};
      if (o.signal->partner) ev.subjects.push_back(*o.signal->partner);
      std::sort(ev.subjects.begin(), ev.subjects.end());
      events.push_back(std::move(ev));
    }
  }
  return events;
}

}  // namespace

std::vector<Event> step(World& world, const StepOptions& options) {
  static thread_local Scratch s;
  s.snapshot = world.machines;
  const auto& snap = s.snapshot;
  const std::size_t n = snap.size();
  const RuleContext ctx = world.context();
  const double reach = world.body.maxArmLength() + world.params.fieldRadius;

  // Index and neighbour lists.
  s.positions.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.positions[i] = snap[i].pose.position;
  s.index.build(s.positions, reach, options.indexMode);
  s.nearStart.assign(n + 1, 0);
  s.nearIds.clear();
  for (std::size_t i = 0; i < n; ++i) {
    s.index.neighboursWithin(s.positions[i], reach, s.query);
    for (MachineId id : s.query) {
      if (id != i) s.nearIds.push_back(id);
    }
    s.nearStart[i + 1] = std::uint32_t(s.nearIds.size());
  }

  // Derived variables.
  const auto lookup = [&](MachineId id) -> const MachineState* { return id < n ? &snap[id] : nullptr; };
  s.derived.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.derived[i] = deriveState(snap[i], lookup, ctx);

  computeForces(world, s);
  s.kicks.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.kicks[i] = brownianKick(world.rng, world.params);
  runAutomata(world, options, s);

  // Commit: motion, internal states, drops, then arbitrated bonds.
  for (std::size_t i = 0; i < n; ++i) {
    MachineState& m = world.machines[i];
    if (auto pin = world.pins.find(MachineId(i)); pin != world.pins.end()) {
      m.pose = pin->second;
      m.kin = Kinematics{};
    } else {
      std::tie(m.pose, m.kin) = integrate(snap[i].pose, snap[i].kin, s.acc[i], s.kicks[i], world.params);
    }
    m.internal = s.results[i].next;
  }

  std::vector<Event> events;
  std::vector<BondRequest> requests;
  for (std::size_t i = 0; i < n; ++i) {
    for (const Action& a : s.results[i].actions) {
      if (const auto* drop = std::get_if<DropBond>(&a)) {
        const auto& other = snap[i].bonds[drop->slot];
        if (!other) continue;
        auto& mine = world.machines[i].bonds[drop->slot];
        if (mine != other) continue;  // already removed from the other side
        mine.reset();
        world.machines[*other].bonds[partnerSlot(drop->slot)].reset();
        const bool lowFirst = MachineId(i) < *other;
        const BondSlot loSlot = lowFirst ? drop->slot : partnerSlot(drop->slot);
        Event ev{world.stepNumber, EventKind::BondBroken, {std::min(MachineId(i), *other), std::max(MachineId(i), *other)}, {}};
        ev.detail.emplace_back("arms", std::string(slotName(loSlot)) + "-" + slotName(partnerSlot(loSlot)));
        events.push_back(std::move(ev));
      } else if (const auto* req = std::get_if<RequestBond>(&a)) {
        requests.push_back({MachineId(i), req->slot, req->target, req->targetSlot});
      }
    }
  }
  for (const BondRequest& b : arbitrate(requests, snap)) {
    world.machines[b.requester].bonds[b.arm] = b.target;
    world.machines[b.target].bonds[b.targetArm] = b.requester;
    Event ev{world.stepNumber, EventKind::BondFormed, {b.requester, b.target}, {}};
    ev.detail.emplace_back("arms", std::string(slotName(b.arm)) + "-" + slotName(b.targetArm));
    events.push_back(std::move(ev));
  }

  for (Event& ev : aggregateSignals(world, s)) {
    if (ev.kind == EventKind::Shatter) ++world.tally.shatters;
    if (ev.kind == EventKind::UnfoldStart) ++world.tally.unfolds;
    events.push_back(std::move(ev));
  }
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    return std::tie(a.kind, a.subjects) < std::tie(b.kind, b.subjects);
  });

  ++world.stepNumber;
  for (Event& ev : events) ev.step = world.stepNumber;
  checkIntegrity(world);
  return events;
}

RunResult run(World& world, const RunOptions& options) {
  RunResult result;
  StepOptions stepOptions;
  stepOptions.indexMode = options.indexMode;
  for (std::uint64_t k = 0; k < options.maxSteps; ++k) {
    std::vector<Event> events = step(world, stepOptions);
    ++result.stepsTaken;
    for (const auto& observer : options.observers) observer(world, events);
    if (options.keepEvents) {
      result.events.insert(result.events.end(), std::make_move_iterator(events.begin()),
                           std::make_move_iterator(events.end()));
    }
    if (options.stopWhen && options.stopWhen(world)) {
      result.stoppedEarly = true;
      break;
    }
  }
  return result;
}

}  // namespace jv2
