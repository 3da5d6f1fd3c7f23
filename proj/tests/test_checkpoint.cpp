#include <gtest/gtest.h>

#include <filesystem>

#include "fixtures.hpp"

using namespace jv2;
using namespace jv2::testing;

namespace {

World busyWorld() {
  WorldConfig c;
  c.physics.containerWidth = c.physics.containerHeight = 20.0;
  c.freeCounts = {{2, 12}, {4, 3}};
  c.rngSeed = 17;
  World w = initWorld(c, parseSeed("2-2-2"));
  for (int k = 0; k < 500; ++k) step(w);
  w.pins[5] = w.machines[5].pose;
  w.tally.shatters = 3;
  return w;
}

}  // namespace

TEST(Checkpoint, RoundTripIsExact) {
  const World w = busyWorld();
  const auto bytes = checkpoint(w);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "JV2S");
  const World r = restore(bytes);
  EXPECT_EQ(r, w);
  EXPECT_EQ(checkpoint(r), bytes);
}

TEST(Checkpoint, RoundTripKeepsEveryFlag) {
  World w = quietWorld();
  const auto ids = addPhene(w, {2, 2, 2}, {10, 10}, 0.0, true);
  auto& in = w.machines[ids[1]].internal;
  in.resetCounter = in.foldNow = in.unfold = in.seedPhene = in.shatter = in.hadUpNeighbour = in.bondLost = true;
  in.foldCounter = 123456;
  in.repelCounter = 7;
  in.stressCounter = 99;
  in.splitCounter = 2;
  in.splitState = 3;
  w.machines[ids[0]].kin.velocity = {0.1, -0.2};
  w.machines[ids[0]].kin.omega = -0.05;
  EXPECT_EQ(restore(checkpoint(w)), w);
}

TEST(Checkpoint, TruncatedStreamFails) {
  const auto bytes = checkpoint(busyWorld());
  for (std::size_t cut : {std::size_t(0), std::size_t(3), std::size_t(8), bytes.size() / 2, bytes.size() - 1}) {
    const std::span<const std::uint8_t> part(bytes.data(), cut);
    EXPECT_THROW(restore(part), CheckpointError) << cut;
  }
}

TEST(Checkpoint, RejectsBadMagicVersionTrailingAndRanges) {
  auto bytes = checkpoint(busyWorld());
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(restore(bad), CheckpointError);
  bad = bytes;
  bad[4] = 99;
  EXPECT_THROW(restore(bad), CheckpointError);
  bad = bytes;
  bad.push_back(0);
  EXPECT_THROW(restore(bad), CheckpointError);

  World w = quietWorld();
  addGene(w, {2, 2, 2}, {10, 10});
  w.machines[1].internal.splitState = 9;
  EXPECT_THROW(restore(checkpoint(w)), CheckpointError);
}

TEST(Checkpoint, ResumeMatchesUninterruptedRun) {
  World a = busyWorld();
  World b = restore(checkpoint(a));
  for (int k = 0; k < 1500; ++k) ASSERT_EQ(step(a), step(b)) << k;
  EXPECT_EQ(a, b);
}

TEST(Checkpoint, MidSplitResumesIdentically) {
  World a = quietWorld();
  a.params.brownianLinearSigma = 0.01;
  const auto gene = addGene(a, {2, 2, 2, 2}, {14, 20});
  for (MachineId id : gene) a.machines[id].internal.seedGene = true;
  addCopyUnder(a, gene);
  // Advance until the readiness wave is under way, then snapshot.
  int guard = 0;
  while (std::none_of(a.machines.begin(), a.machines.end(), [](const MachineState& m) { return m.internal.splitState >= 2; })) {
    step(a);
    ASSERT_LT(++guard, 200);
  }
  World b = restore(checkpoint(a));
  std::vector<Event> ea, eb;
  for (int k = 0; k < 300; ++k) {
    auto x = step(a);
    auto y = step(b);
    ea.insert(ea.end(), x.begin(), x.end());
    eb.insert(eb.end(), y.begin(), y.end());
  }
  EXPECT_EQ(ea, eb);
  EXPECT_EQ(countKind(ea, EventKind::Split), 1u);
  EXPECT_EQ(a, b);
}

TEST(Checkpoint, FileRoundTrip) {
  const World w = busyWorld();
  const auto path = std::filesystem::temp_directory_path() / "jv2-checkpoint-test.jv2s";
  saveCheckpoint(w, path.string());
  EXPECT_EQ(loadCheckpoint(path.string()), w);
  std::filesystem::remove(path);
  EXPECT_THROW(loadCheckpoint(path.string()), CheckpointError);
}
