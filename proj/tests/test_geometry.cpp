#include <gtest/gtest.h>

#include <random>

#include "jv2/geometry.hpp"

using namespace jv2;

TEST(MachineType, OnlyOneToFourConstructible) {
  for (int v = 1; v <= 4; ++v) EXPECT_EQ(MachineType::of(v).value(), v);
  EXPECT_THROW(MachineType::of(0), std::out_of_range);
  EXPECT_THROW(MachineType::of(5), std::out_of_range);
  EXPECT_THROW(MachineType::of(-1), std::out_of_range);
  EXPECT_EQ(MachineType::all().size(), 4u);
  EXPECT_TRUE(MachineType::of(1).isStraight());
  EXPECT_FALSE(MachineType::of(2).isStraight());
}

TEST(MachineBody, DefaultOrderingAndDirections) {
  const MachineBody body;
  EXPECT_NO_THROW(body.validate());
  EXPECT_EQ(body.length(Arm::Left), body.length(Arm::Right));
  EXPECT_LT(body.length(Arm::Up), body.length(Arm::Left));
  EXPECT_LT(body.length(Arm::Repellor), body.length(Arm::Up));
  EXPECT_LT(body.length(Arm::OverlapDetector), body.length(Arm::Up));
  EXPECT_EQ(MachineBody::direction(Arm::Left), Vec2d(-MachineBody::direction(Arm::Right)));
  EXPECT_EQ(MachineBody::direction(Arm::Repellor), MachineBody::direction(Arm::Up));
  EXPECT_EQ(MachineBody::direction(Arm::OverlapDetector), Vec2d(-MachineBody::direction(Arm::Up)));
  EXPECT_DOUBLE_EQ(MachineBody::direction(Arm::Up).dot(MachineBody::direction(Arm::Left)), 0.0);
  EXPECT_DOUBLE_EQ(body.sidewaysPitch(), 2.0);
  EXPECT_DOUBLE_EQ(body.maxArmLength(), 1.0);
}

TEST(MachineBody, RejectsBrokenOrdering) {
  MachineBody b;
  b.length(Arm::Right) = 0.9;
  EXPECT_THROW(b.validate(), std::invalid_argument);
  b = MachineBody{};
  b.length(Arm::Up) = 1.0;
  EXPECT_THROW(b.validate(), std::invalid_argument);
  b = MachineBody{};
  b.length(Arm::Repellor) = 0.6;
  EXPECT_THROW(b.validate(), std::invalid_argument);
  b = MachineBody{};
  b.length(Arm::OverlapDetector) = 0.0;
  EXPECT_THROW(b.validate(), std::invalid_argument);
}

TEST(ArmTip, CanonicalPose) {
  const MachineBody body;
  const Pose p;
  const Vec2d left = armTip(p, body, Arm::Left);
  EXPECT_DOUBLE_EQ(left.x(), -1.0);
  EXPECT_DOUBLE_EQ(left.y(), 0.0);
  const Vec2d od = armTip(p, body, Arm::OverlapDetector);
  EXPECT_DOUBLE_EQ(od.x(), 0.0);
  EXPECT_DOUBLE_EQ(od.y(), -0.35);
}

TEST(ArmTip, RotatedRightArmMatchesRotationMatrix) {
  const MachineBody body;
  Pose p;
  p.position = {2.0, 3.0};
  p.heading = kPi / 2;
  // Independent oracle: explicit 2x2 rotation.
  const double c = std::cos(p.heading), s = std::sin(p.heading);
  const Vec2d expected(2.0 + c * 1.0 - s * 0.0, 3.0 + s * 1.0 + c * 0.0);
  const Vec2d tip = armTip(p, body, Arm::Right);
  EXPECT_NEAR(tip.x(), expected.x(), 1e-15);
  EXPECT_NEAR(tip.y(), expected.y(), 1e-15);
  EXPECT_NEAR(tip.x(), 2.0, 1e-15);
  EXPECT_NEAR(tip.y(), 4.0, 1e-15);
}

TEST(ArmTip, EquivariantUnderRigidMotion) {
  const MachineBody body;
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int trial = 0; trial < 500; ++trial) {
    Pose p;
    p.position = {u(gen), u(gen)};
    p.heading = u(gen);
    const double theta = u(gen);
    const Vec2d shift(u(gen), u(gen));
    const Eigen::Rotation2Dd rot(theta);
    Pose moved;
    moved.position = rot * p.position + shift;
    moved.heading = p.heading + theta;
    for (Arm arm : kAllArms) {
      const Vec2d a = armTip(moved, body, arm);
      const Vec2d b = rot * armTip(p, body, arm) + shift;
      EXPECT_NEAR((a - b).norm(), 0.0, 1e-11);
    }
    EXPECT_NEAR((armTip(p, body, Arm::Left) - armTip(p, body, Arm::Right)).norm(),
                body.length(Arm::Left) + body.length(Arm::Right), 1e-12);
  }
}

TEST(RelativeBondAngle, Examples) {
  Pose a, b;
  EXPECT_DOUBLE_EQ(relativeBondAngle(a, b, BondKind::Sideways), 0.0);
  b.heading = a.heading + kPi;
  EXPECT_NEAR(relativeBondAngle(a, b, BondKind::Up), 0.0, 1e-15);
  b.heading = 2 * kPi / 3;
  EXPECT_NEAR(relativeBondAngle(a, b, BondKind::Sideways), 2 * kPi / 3, 1e-15);
}

TEST(RelativeBondAngle, AntisymmetricAndInRange) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int trial = 0; trial < 1000; ++trial) {
    Pose a, b;
    a.heading = u(gen);
    b.heading = u(gen);
    const double ab = relativeBondAngle(a, b, BondKind::Sideways);
    const double ba = relativeBondAngle(b, a, BondKind::Sideways);
    EXPECT_GT(ab, -kPi);
    EXPECT_LE(ab, kPi);
    // Equal up to the shared endpoint pi.
    EXPECT_NEAR(std::abs(normalizeAngle(ab + ba)), 0.0, 1e-9);
  }
}

TEST(Angles, NormalizeAndWrap) {
  EXPECT_DOUBLE_EQ(normalizeAngle(kPi), kPi);
  EXPECT_DOUBLE_EQ(normalizeAngle(-kPi), kPi);
  EXPECT_NEAR(normalizeAngle(3 * kPi), kPi, 1e-12);
  EXPECT_NEAR(normalizeAngle(0.5 + 4 * kPi), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(wrapHeading(0.0), 0.0);
  EXPECT_NEAR(wrapHeading(-0.5), kTwoPi - 0.5, 1e-12);
  EXPECT_LT(wrapHeading(kTwoPi), kTwoPi);
  EXPECT_GE(wrapHeading(-1e-18), 0.0);
}

TEST(RodInertia, ScalesWithMass) {
  const MachineBody body;
  EXPECT_GT(rodInertia(body, 1.0), 0.0);
  EXPECT_NEAR(rodInertia(body, 2.0), 2.0 * rodInertia(body, 1.0), 1e-12);
}
