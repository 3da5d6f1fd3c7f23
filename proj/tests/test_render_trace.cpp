#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>

#include "fixtures.hpp"
#include "jv2/render.hpp"
#include "jv2/trace.hpp"

using namespace jv2;
using namespace jv2::testing;

namespace {

struct Segment {
  double x1, y1, x2, y2;
};

std::vector<Segment> lines(const std::string& svg, const std::string& cls) {
  const std::regex re("<line class=\"" + cls +
                      "\" x1=\"([-0-9.]+)\" y1=\"([-0-9.]+)\" x2=\"([-0-9.]+)\" y2=\"([-0-9.]+)\"");
  std::vector<Segment> out;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    out.push_back({std::stod((*it)[1]), std::stod((*it)[2]), std::stod((*it)[3]), std::stod((*it)[4])});
  }
  return out;
}

std::size_t occurrences(const std::string& s, const std::string& what) {
  std::size_t n = 0;
  for (auto p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(Render, EmptyWorldIsContainerOnly) {
  const std::string svg = renderFrame(quietWorld(10, 5));
  EXPECT_EQ(occurrences(svg, "<rect class=\"container\""), 1u);
  EXPECT_EQ(occurrences(svg, "<line"), 0u);
  EXPECT_NE(svg.find("width=\"220\""), std::string::npos);
  EXPECT_NE(svg.find("height=\"120\""), std::string::npos);
}

TEST(Render, SingleMachineArms) {
  World w = quietWorld(10, 10);
  addMachine(w, MachineType::of(2), poseAt(5, 5));
  const std::string svg = renderFrame(w);
  EXPECT_EQ(occurrences(svg, "<g class=\"machine\""), 1u);
  EXPECT_NE(svg.find("data-type=\"2\""), std::string::npos);
  const auto up = lines(svg, "up");
  const auto rep = lines(svg, "repellor");
  ASSERT_EQ(up.size(), 1u);
  ASSERT_EQ(rep.size(), 1u);
  // Centre at (110, 110) in pixels; up points to screen-up, the repellor is a shorter piece of it.
  EXPECT_DOUBLE_EQ(up[0].x1, 110.0);
  EXPECT_DOUBLE_EQ(up[0].y1, 110.0);
  EXPECT_DOUBLE_EQ(rep[0].x2, up[0].x2);
  EXPECT_LT(up[0].y2, rep[0].y2);
  EXPECT_LT(rep[0].y2, up[0].y1);
  const auto left = lines(svg, "left"), right = lines(svg, "right");
  ASSERT_EQ(left.size(), 1u);
  EXPECT_DOUBLE_EQ(left[0].x2, 90.0);
  EXPECT_DOUBLE_EQ(right[0].x2, 130.0);
  EXPECT_EQ(lines(svg, "bond").size(), 0u);
}

TEST(Render, BondJoinsTips) {
  World w = quietWorld(10, 10);
  addGene(w, {2, 2}, {3, 5});
  const std::string svg = renderFrame(w);
  const auto bonds = lines(svg, "bond");
  ASSERT_EQ(bonds.size(), 1u);
  const Vec2d a = armTip(w.machines[0].pose, w.body, Arm::Right);
  EXPECT_NEAR(bonds[0].x1, 10 + 20 * a.x(), 1e-3);
  EXPECT_NEAR(bonds[0].y1, 10 + 20 * (10 - a.y()), 1e-3);
  EXPECT_NEAR(bonds[0].x2, bonds[0].x1, 1e-3);
}

TEST(Render, Deterministic) {
  WorldConfig c;
  c.physics.containerWidth = c.physics.containerHeight = 20.0;
  c.freeCounts = {{2, 12}};
  World a = initWorld(c, parseSeed("2-2-2"));
  World b = initWorld(c, parseSeed("2-2-2"));
  for (int k = 0; k < 200; ++k) {
    step(a);
    step(b);
  }
  EXPECT_EQ(renderFrame(a), renderFrame(b));
}

TEST(Trace, SplitRecordSchema) {
  Event e;
  e.step = 1042;
  e.kind = EventKind::Split;
  e.subjects = {3, 4, 5, 20, 21, 22};
  e.detail = {{"parent", "3,4,5"}, {"child", "20,21,22"}, {"parentTypes", "2-2-2"}, {"childTypes", "2-2-2"}};
  const std::string line = traceLine(e);
  EXPECT_EQ(line,
            R"({"step":1042,"kind":"Split","subjects":[3,4,5,20,21,22],)"
            R"("detail":{"parent":"3,4,5","child":"20,21,22","parentTypes":"2-2-2","childTypes":"2-2-2"}})");
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_EQ(parseTraceLine(line), e);
  EXPECT_EQ(e.get("childTypes"), "2-2-2");
  EXPECT_EQ(e.get("missing"), "");
}

TEST(Trace, EveryKindRoundTrips) {
  for (int k = 0; k <= int(EventKind::Diagnostic); ++k) {
    Event e;
    e.kind = EventKind(k);
    e.step = std::uint64_t(k) * 7;
    e.subjects = {MachineId(k)};
    e.detail = {{"reason", "x \"quoted\""}};
    EXPECT_EQ(parseTraceLine(traceLine(e)), e);
  }
}

TEST(Trace, Malformed) {
  EXPECT_THROW(parseTraceLine("not json"), std::invalid_argument);
  EXPECT_THROW(parseTraceLine(R"({"step":1,"kind":"Nope","subjects":[],"detail":{}})"), std::invalid_argument);
  EXPECT_THROW(parseTraceLine(R"({"step":1,"kind":"Split","subjects":[]})"), std::invalid_argument);
}

TEST(Trace, WriterCreatesFileEvenWhenEmpty) {
  const auto path = (std::filesystem::temp_directory_path() / "jv2-trace-test.jsonl").string();
  std::ofstream(path) << "stale\n";
  {
    TraceWriter w(path);
  }
  EXPECT_EQ(std::filesystem::file_size(path), 0u);
  EXPECT_TRUE(readTrace(path).empty());

  World world = quietWorld();
  const auto g = addGene(world, {2, 2, 2}, {10, 10});
  addMachine(world, MachineType::of(2), poseAt(10, 10 + 1.2, kPi));
  std::vector<Event> all;
  {
    TraceWriter w(path);
    for (int k = 0; k < 20; ++k) {
      const auto ev = step(world);
      w.write(ev);
      all.insert(all.end(), ev.begin(), ev.end());
    }
  }
  (void)g;
  EXPECT_FALSE(all.empty());
  EXPECT_EQ(readTrace(path), all);
  std::filesystem::remove(path);
}
