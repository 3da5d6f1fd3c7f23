#include <gtest/gtest.h>

#include <algorithm>
#include <complex>
#include <random>

#include "jv2/seedlab.hpp"

using namespace jv2;

namespace {

std::vector<int> ints(const SeedSpec& s) {
  std::vector<int> out;
  for (MachineType t : s.types) out.push_back(t.value());
  return out;
}

SeedSpec seedOf(const std::vector<int>& v) {
  SeedSpec s;
  for (int x : v) s.types.push_back(MachineType::of(x));
  return s;
}

std::vector<double> sortedDistances(const std::vector<Vec2d>& pts) {
  std::vector<double> d;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d.push_back((pts[i] - pts[j]).norm());
  std::sort(d.begin(), d.end());
  return d;
}

// Independent oracle: walk with exact lattice-free complex rotation instead of headings.
bool oracleClosed(const std::vector<int>& types) {
  const std::size_t n = types.size();
  std::complex<double> pos = 0.0, dir = 1.0;
  int total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    pos += dir;
    const auto a = foldAngle(MachineType::of(types[i]), MachineType::of(types[(i + 1) % n]));
    if (!a) return false;
    total += *a;
    dir *= std::polar(1.0, degToRad(*a));
  }
  return total == 360 && std::abs(pos) < 1e-9;
}

}  // namespace

TEST(ParseSeed, Examples) {
  EXPECT_EQ(ints(parseSeed("2-2-2")), (std::vector<int>{2, 2, 2}));
  EXPECT_EQ(ints(parseSeed("2-4-2-1-2-4-2-1")), (std::vector<int>{2, 4, 2, 1, 2, 4, 2, 1}));
  EXPECT_EQ(ints(parseSeed(" 2 - 3 -2 ")), (std::vector<int>{2, 3, 2}));
  EXPECT_EQ(parseSeed("4-4-4").text(), "4-4-4");
}

TEST(ParseSeed, ErrorsCarryPosition) {
  try {
    parseSeed("2-5-2");
    FAIL() << "expected a parse error";
  } catch (const SeedParseError& e) {
    EXPECT_EQ(e.token(), 2u);
  }
  try {
    parseSeed("2-2-x");
    FAIL();
  } catch (const SeedParseError& e) {
    EXPECT_EQ(e.token(), 3u);
  }
  EXPECT_THROW(parseSeed("2-2"), SeedParseError);
  EXPECT_THROW(parseSeed("2--2-2"), SeedParseError);
  EXPECT_THROW(parseSeed("22-2-2"), SeedParseError);
  EXPECT_THROW(parseSeed(""), SeedParseError);
}

TEST(PredictFold, TriangleAndOctagon) {
  const FoldPlan tri = predictFold(parseSeed("2-2-2"));
  EXPECT_EQ(tri.vertices.size(), 3u);
  EXPECT_EQ(tri.turnAngles, (std::vector<int>{120, 120, 120}));
  EXPECT_TRUE(tri.closed);
  EXPECT_EQ(tri.corners(), 3);
  // Equilateral with the sideways pitch as side.
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR((tri.vertices[i] - tri.vertices[(i + 1) % 3]).norm(), 2.0, 1e-12);

  const FoldPlan oct = predictFold(parseSeed("2-3-2-3-2-3-2-3"));
  EXPECT_EQ(oct.vertices.size(), 8u);
  EXPECT_TRUE(std::all_of(oct.turnAngles.begin(), oct.turnAngles.end(), [](int a) { return a == 45; }));
  EXPECT_TRUE(oct.closed);
}

TEST(PredictFold, OpenAndUndefined) {
  const FoldPlan sq = predictFold(parseSeed("2-2-2-2"));
  EXPECT_EQ(sq.totalTurn, 480);
  EXPECT_FALSE(sq.closed);
  try {
    predictFold(parseSeed("3-3-3"));
    FAIL();
  } catch (const UndefinedFoldError& e) {
    EXPECT_EQ(e.left().value(), 3);
    EXPECT_EQ(e.right().value(), 3);
  }
}

TEST(PredictFold, CornerCountsOfKnownSeeds) {
  const std::vector<std::pair<std::string, int>> cases = {
      {"2-2-2", 3}, {"4-2-4-2", 4}, {"4-4-4-4-4-4", 6}, {"2-3-2-3-2-3-2-3", 8},
      {"2-4-2-1-2-4-2-1", 4}, {"2-1-2-2-1-2-2-1-2", 3}};
  for (const auto& [text, corners] : cases) {
    const FoldPlan p = predictFold(parseSeed(text));
    EXPECT_TRUE(p.closed) << text;
    EXPECT_EQ(p.totalTurn, 360) << text;
    EXPECT_LE(p.closureDistance, 1e-9) << text;
    EXPECT_EQ(p.corners(), corners) << text;
  }
}

TEST(PredictFold, AgreesWithIndependentWalkOnRandomSeeds) {
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<int> type(1, 4), len(3, 12);
  int closedSeen = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    std::vector<int> v(len(gen));
    for (int& x : v) x = type(gen);
    const SeedSpec s = seedOf(v);
    bool defined = true;
    for (std::size_t i = 0; i < v.size(); ++i)
      defined = defined && foldAngle(s.types[i], s.types[(i + 1) % v.size()]).has_value();
    if (!defined) {
      EXPECT_THROW(predictFold(s), UndefinedFoldError);
      continue;
    }
    const FoldPlan p = predictFold(s);
    EXPECT_EQ(p.closed, oracleClosed(v)) << s.text();
    closedSeen += p.closed;
    int sum = 0;
    for (int a : p.turnAngles) sum += a;
    EXPECT_EQ(sum, p.totalTurn);
    if (p.closed) EXPECT_EQ(p.totalTurn, 360);
  }
  EXPECT_GT(closedSeen, 10);
}

TEST(PredictFold, MirrorFoldsIntoReflectedShape) {
  for (const char* text : {"2-2-2", "4-2-4-2", "2-4-2-1-2-4-2-1", "2-1-2-2-1-2-2-1-2", "2-3-2-3-2-3-2-3",
                           "4-1-4-2-1-2-4-1-4-2-1-2", "2-1-1-2-2-1-1-2-2-1-1-2"}) {
    const SeedSpec s = parseSeed(text);
    const SeedSpec m{mirrorOfTemplate(s.types)};
    const FoldPlan a = predictFold(s), b = predictFold(m);
    EXPECT_EQ(a.closed, b.closed) << text;
    const auto da = sortedDistances(a.vertices), db = sortedDistances(b.vertices);
    ASSERT_EQ(da.size(), db.size());
    for (std::size_t i = 0; i < da.size(); ++i) EXPECT_NEAR(da[i], db[i], 1e-9) << text;
  }
}

TEST(PredictFold, ExtendersKeepTurnSumAndUniformInsertionKeepsClosure) {
  const SeedSpec tri = parseSeed("2-1-2-2-1-2-2-1-2");
  // The same number of extenders on every side keeps the polygon regular.
  EXPECT_TRUE(predictFold(parseSeed("2-1-1-2-2-1-1-2-2-1-1-2")).closed);
  EXPECT_TRUE(predictFold(parseSeed("4-1-4-2-1-2-4-1-4-2-1-2")).closed);
  // A single lengthened side keeps the turn sum but opens the triangle.
  const FoldPlan lopsided = predictFold(parseSeed("2-1-1-2-2-1-2-2-1-2"));
  EXPECT_EQ(lopsided.totalTurn, predictFold(tri).totalTurn);
  EXPECT_FALSE(lopsided.closed);
}

TEST(ValidateSeed, Examples) {
  const ValidationReport tri = validateSeed(parseSeed("2-2-2"));
  EXPECT_TRUE(tri.ok());
  EXPECT_TRUE(tri.closed);
  for (const auto& m : tri.machines) EXPECT_TRUE(m.upBondable);

  const ValidationReport bad = validateSeed(parseSeed("3-3-3"));
  EXPECT_FALSE(bad.ok());
  EXPECT_FALSE(bad.warnings.empty());  // all type 3

  const ValidationReport open = validateSeed(parseSeed("2-2-2-2"));
  EXPECT_FALSE(open.ok());
  EXPECT_FALSE(open.closed);

  const ValidationReport expanded = validateSeed(parseSeed("2-1-2-2-1-2-2-1-2"));
  EXPECT_TRUE(expanded.ok());
  EXPECT_EQ(expanded.corners, 3);
  ASSERT_EQ(expanded.machines.size(), 9u);
  for (std::size_t i = 0; i < 9; ++i) {
    if (i % 3 == 1) {
      EXPECT_FALSE(expanded.machines[i].upBondable) << i;
    } else {
      EXPECT_TRUE(expanded.machines[i].upBondable) << i;
    }
  }
  EXPECT_EQ(expanded.edges.size(), 3u);
  EXPECT_FALSE(expanded.text().empty());
}

TEST(CompileShape, Examples) {
  EXPECT_EQ(compileShape({ShapeKind::Triangle}, 1).text(), "2-2-2");
  EXPECT_EQ(compileShape({ShapeKind::Hexagon}, 1).text(), "4-4-4-4-4-4");
  EXPECT_EQ(compileShape({ShapeKind::Triangle}, 3).text(), "2-1-2-2-1-2-2-1-2");
  EXPECT_EQ(compileShape({ShapeKind::Square}, 1).text(), "4-2-4-2");
  EXPECT_EQ(compileShape({ShapeKind::Octagon}, 1).text(), "2-3-2-3-2-3-2-3");
  EXPECT_EQ(compileShape(parseShape("rectangle:3x1"), 1).text(), "2-4-2-1-2-4-2-1");
}

TEST(CompileShape, RejectsUnsupported) {
  EXPECT_THROW(compileShape({ShapeKind::Triangle}, 2), std::invalid_argument);
  EXPECT_THROW(compileShape({ShapeKind::Triangle}, 0), std::invalid_argument);
  EXPECT_THROW(compileShape(parseShape("rectangle:2x2"), 1), std::invalid_argument);
  EXPECT_THROW(compileShape(parseShape("rectangle:2x1"), 1), std::invalid_argument);
  EXPECT_THROW(parseShape("pentagon"), std::invalid_argument);
  EXPECT_THROW(parseShape("rectangle:3by1"), std::invalid_argument);
}

TEST(CompileShape, OutputAlwaysValidates) {
  for (ShapeKind k : {ShapeKind::Triangle, ShapeKind::Square, ShapeKind::Hexagon, ShapeKind::Octagon}) {
    for (int e : {1, 3, 4, 5, 7}) {
      const SeedSpec s = compileShape({k}, e);
      const ValidationReport r = validateSeed(s);
      EXPECT_TRUE(r.ok()) << s.text();
      EXPECT_TRUE(r.closed) << s.text();
    }
  }
  for (auto [w, h] : std::vector<std::pair<int, int>>{{3, 1}, {1, 3}, {4, 3}, {5, 1}}) {
    for (int e : {1, 3}) {
      const SeedSpec s = compileShape({ShapeKind::Rectangle, w, h}, e);
      EXPECT_TRUE(validateSeed(s).ok()) << s.text();
      EXPECT_EQ(predictFold(s).corners(), 4) << s.text();
    }
  }
}
