#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "jv2/engine.hpp"

namespace jv2 {

namespace {

constexpr std::uint32_t kNoBond = 0xFFFFFFFFu;

enum Flag : std::uint16_t {
  kResetCounter = 1 << 0,
  kFoldNow = 1 << 1,
  kUnfold = 1 << 2,
  kSeedGene = 1 << 3,
  kSeedPhene = 1 << 4,
  kInMesh = 1 << 5,
  kReplicated = 1 << 6,
  kShatter = 1 << 7,
  kFolded = 1 << 8,
  kHadUpNeighbour = 1 << 9,
  kBondLost = 1 << 10,
};
constexpr std::uint16_t kAllFlags = (1 << 11) - 1;

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void pose(const Pose& p) {
    f64(p.position.x());
    f64(p.position.y());
    f64(p.heading);
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void le(std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out_.push_back(std::uint8_t(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8(const char* what) { return std::uint8_t(le(1, what)); }
  std::uint16_t u16(const char* what) { return std::uint16_t(le(2, what)); }
  std::uint32_t u32(const char* what) { return std::uint32_t(le(4, what)); }
  std::uint64_t u64(const char* what) { return le(8, what); }
  double f64(const char* what) {
    const double v = std::bit_cast<double>(le(8, what));
    if (!std::isfinite(v)) throw CheckpointError(std::string("non-finite value for ") + what);
    return v;
  }
  Pose pose(const char* what) {
    Pose p;
    p.position.x() = f64(what);
    p.position.y() = f64(what);
    p.heading = f64(what);
    return p;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::uint64_t le(int bytes, const char* what) {
    if (remaining() < std::size_t(bytes)) {
      throw CheckpointError(std::string("checkpoint truncated while reading ") + what + " at byte " +
                            std::to_string(pos_));
    }
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= std::uint64_t(in_[pos_ + i]) << (8 * i);
    pos_ += bytes;
    return v;
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::uint16_t packFlags(const InternalState& s) {
  std::uint16_t f = 0;
  if (s.resetCounter) f |= kResetCounter;
  if (s.foldNow) f |= kFoldNow;
  if (s.unfold) f |= kUnfold;
  if (s.seedGene) f |= kSeedGene;
  if (s.seedPhene) f |= kSeedPhene;
  if (s.inMesh) f |= kInMesh;
  if (s.replicated) f |= kReplicated;
  if (s.shatter) f |= kShatter;
  if (s.folded) f |= kFolded;
  if (s.hadUpNeighbour) f |= kHadUpNeighbour;
  if (s.bondLost) f |= kBondLost;
  return f;
}

void unpackFlags(std::uint16_t f, InternalState& s) {
  s.resetCounter = f & kResetCounter;
  s.foldNow = f & kFoldNow;
  s.unfold = f & kUnfold;
  s.seedGene = f & kSeedGene;
  s.seedPhene = f & kSeedPhene;
  s.inMesh = f & kInMesh;
  s.replicated = f & kReplicated;
  s.shatter = f & kShatter;
  s.folded = f & kFolded;
  s.hadUpNeighbour = f & kHadUpNeighbour;
  s.bondLost = f & kBondLost;
}

}  // namespace

std::vector<std::uint8_t> checkpoint(const World& world) {
  Writer w;
  for (char c : {'J', 'V', '2', 'S'}) w.u8(std::uint8_t(c));
  w.u32(kCheckpointVersion);

  const PhysicsParams& p = world.params;
  for (double v : {p.dt, p.fieldRadius, p.springK, p.twistK, p.repelK, p.brownianLinearSigma, p.brownianAngularSigma,
                   p.linearDrag, p.angularDrag, p.mass, p.inertia, p.speedClamp, p.containerWidth, p.containerHeight}) {
    w.f64(v);
  }
  for (double v : world.body.armLength) w.f64(v);
  const RuleConstants& r = world.rules;
  w.u32(r.foldLimit);
  w.u32(r.stressLimit);
  w.u32(r.repelDuration);
  w.f64(r.angleToleranceDeg);
  w.f64(r.distanceToleranceFactor);
  w.f64(r.overlapHeadingToleranceDeg);
  w.f64(r.breakDistanceFactor);

  w.u64(world.stepNumber);
  w.u64(world.rng.state());
  w.u64(world.tally.shatters);
  w.u64(world.tally.unfolds);

  w.u32(std::uint32_t(world.pins.size()));
  for (const auto& [id, pose] : world.pins) {
    w.u32(id);
    w.pose(pose);
  }

  w.u32(std::uint32_t(world.machines.size()));
  for (const MachineState& m : world.machines) {
    const InternalState& s = m.internal;
    w.u32(s.id);
    w.u8(std::uint8_t(s.type.value()));
    w.u8(s.strandPosition);
    w.u8(s.splitState);
    w.u16(packFlags(s));
    w.u32(s.foldCounter);
    w.u32(s.repelCounter);
    w.u32(s.stressCounter);
    w.u32(s.splitCounter);
    for (BondSlot slot : kAllSlots) w.u32(m.bonds[slot].value_or(kNoBond));
    w.pose(m.pose);
    w.f64(m.kin.velocity.x());
    w.f64(m.kin.velocity.y());
    w.f64(m.kin.omega);
  }
  return w.take();
}

World restore(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  const char magic[4] = {'J', 'V', '2', 'S'};
  for (char c : magic) {
    if (in.u8("magic") != std::uint8_t(c)) throw CheckpointError("not a checkpoint (bad magic bytes)");
  }
  const std::uint32_t version = in.u32("version");
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint format version " + std::to_string(version) + " is not supported (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }

  World world;
  PhysicsParams& p = world.params;
  for (double* v : {&p.dt, &p.fieldRadius, &p.springK, &p.twistK, &p.repelK, &p.brownianLinearSigma,
                    &p.brownianAngularSigma, &p.linearDrag, &p.angularDrag, &p.mass, &p.inertia, &p.speedClamp,
                    &p.containerWidth, &p.containerHeight}) {
    *v = in.f64("physics parameters");
  }
  for (double& v : world.body.armLength) v = in.f64("arm lengths");
  RuleConstants& r = world.rules;
  r.foldLimit = in.u32("FOLD_LIMIT");
  r.stressLimit = in.u32("STRESS_LIMIT");
  r.repelDuration = in.u32("REPEL_DURATION");
  r.angleToleranceDeg = in.f64("angle tolerance");
  r.distanceToleranceFactor = in.f64("distance tolerance");
  r.overlapHeadingToleranceDeg = in.f64("overlap heading tolerance");
  r.breakDistanceFactor = in.f64("break distance");
  try {
    world.body.validate();
    world.params.validate(world.body);
    world.rules.validate();
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("checkpoint holds invalid parameters: ") + e.what());
  }

  world.stepNumber = in.u64("step number");
  if (!world.rng.setState(in.u64("rng state"))) throw CheckpointError("rng state is zero");
  world.tally.shatters = in.u64("shatter tally");
  world.tally.unfolds = in.u64("unfold tally");

  const std::uint32_t pinCount = in.u32("pin count");
  std::vector<std::pair<MachineId, Pose>> pins;
  for (std::uint32_t k = 0; k < pinCount; ++k) {
    const MachineId id = in.u32("pin id");
    pins.emplace_back(id, in.pose("pin pose"));
  }

  const std::uint32_t count = in.u32("machine count");
  // Each record is 89 bytes; refuse counts the remaining input cannot hold.
  if (std::uint64_t(count) * 89 > in.remaining()) {
    throw CheckpointError("checkpoint truncated: " + std::to_string(count) + " machines announced");
  }
  world.machines.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    MachineState& m = world.machines[i];
    InternalState& s = m.internal;
    s.id = in.u32("machine id");
    if (s.id != i) throw CheckpointError("machine record " + std::to_string(i) + " has id " + std::to_string(s.id));
    const int type = in.u8("machine type");
    if (type < 1 || type > 4) throw CheckpointError("machine " + std::to_string(i) + " has type " + std::to_string(type));
    s.type = MachineType::of(type);
    s.strandPosition = in.u8("strand position");
    if (s.strandPosition < 1 || s.strandPosition > 3) {
      throw CheckpointError("machine " + std::to_string(i) + " has strand position " + std::to_string(s.strandPosition));
    }
    s.splitState = in.u8("split state");
    if (s.splitState < 1 || s.splitState > 4) {
      throw CheckpointError("machine " + std::to_string(i) + " has split state " + std::to_string(s.splitState));
    }
    const std::uint16_t flags = in.u16("flags");
    if (flags & ~kAllFlags) throw CheckpointError("machine " + std::to_string(i) + " has unknown flag bits");
    unpackFlags(flags, s);
    s.foldCounter = in.u32("fold counter");
    s.repelCounter = in.u32("repel counter");
    s.stressCounter = in.u32("stress counter");
    s.splitCounter = in.u32("split counter");
    for (BondSlot slot : kAllSlots) {
      const std::uint32_t b = in.u32("bond");
      if (b == kNoBond) continue;
      if (b >= count) throw CheckpointError("machine " + std::to_string(i) + " is bonded to unknown machine " + std::to_string(b));
      m.bonds[slot] = b;
    }
    m.pose = in.pose("pose");
    m.kin.velocity.x() = in.f64("velocity");
    m.kin.velocity.y() = in.f64("velocity");
    m.kin.omega = in.f64("angular velocity");
  }
  if (in.remaining() != 0) throw CheckpointError(std::to_string(in.remaining()) + " trailing bytes after the last record");

  for (const auto& [id, pose] : pins) {
    if (id >= count) throw CheckpointError("pin references unknown machine " + std::to_string(id));
    world.pins[id] = pose;
  }
  try {
    checkIntegrity(world);
  } catch (const IntegrityError& e) {
    throw CheckpointError(std::string("checkpoint is inconsistent: ") + e.what());
  }
  return world;
}

void saveCheckpoint(const World& world, const std::string& path) {
  const auto bytes = checkpoint(world);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out) throw CheckpointError("failed writing checkpoint to " + path);
}

World loadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path);
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return restore(bytes);
}

}  // namespace jv2
