#ifndef JV2_GEOMETRY_HPP
#define JV2_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace jv2 {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
using Vec2d = Vec2<double>;

using MachineId = std::uint32_t;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double degToRad(double deg) { return deg * kPi / 180.0; }
inline constexpr double radToDeg(double rad) { return rad * 180.0 / kPi; }

/// Maps an angle onto (-pi, pi].
template <typename Scalar>
Scalar normalizeAngle(Scalar a) {
  using std::floor;
  const Scalar twoPi = Scalar(kTwoPi);
  a -= twoPi * floor((a + Scalar(kPi)) / twoPi);
  // floor puts us in [-pi, pi); shift the lower endpoint up.
  if (a <= -Scalar(kPi)) a += twoPi;
  return a;
}

/// Maps a heading onto [0, 2pi).
template <typename Scalar>
Scalar wrapHeading(Scalar a) {
  using std::floor;
  const Scalar twoPi = Scalar(kTwoPi);
  a -= twoPi * floor(a / twoPi);
  if (a >= twoPi) a -= twoPi;
  return a;
}

template <typename Scalar>
Scalar cross2(const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// One of the four machine types. Only 1..4 can be constructed.
class MachineType {
 public:
  constexpr MachineType() = default;

  /// Throws std::out_of_range for anything outside 1..4.
  static MachineType of(int value);

  static constexpr std::array<MachineType, 4> all() {
    return {MachineType(1), MachineType(2), MachineType(3), MachineType(4)};
  }

  constexpr int value() const { return value_; }
  constexpr bool isStraight() const { return value_ == 1; }

  friend constexpr bool operator==(MachineType, MachineType) = default;
  friend constexpr auto operator<=>(MachineType, MachineType) = default;

 private:
  constexpr explicit MachineType(std::uint8_t v) : value_(v) {}
  std::uint8_t value_ = 1;
};

enum class Arm : std::uint8_t { Left, Right, Up, Repellor, OverlapDetector };
inline constexpr std::size_t kArmCount = 5;
inline constexpr std::array<Arm, kArmCount> kAllArms = {Arm::Left, Arm::Right, Arm::Up, Arm::Repellor,
                                                        Arm::OverlapDetector};

const char* armName(Arm arm);

/// Arm lengths of the plus-shaped body. Directions are fixed in the canonical position:
/// Left points -x, Right +x, Up and Repellor +y, OverlapDetector -y.
struct MachineBody {
  std::array<double, kArmCount> armLength{1.0, 1.0, 0.6, 0.5, 0.35};

  double length(Arm arm) const { return armLength[static_cast<std::size_t>(arm)]; }
  double& length(Arm arm) { return armLength[static_cast<std::size_t>(arm)]; }

  static Vec2d direction(Arm arm) {
    switch (arm) {
      case Arm::Left: return {-1.0, 0.0};
      case Arm::Right: return {1.0, 0.0};
      case Arm::Up:
      case Arm::Repellor: return {0.0, 1.0};
      case Arm::OverlapDetector: return {0.0, -1.0};
    }
    return {0.0, 0.0};
  }

  double maxArmLength() const;

  /// Distance between the middles of two sideways-bonded machines at rest.
  double sidewaysPitch() const { return length(Arm::Left) + length(Arm::Right); }

  /// Throws std::invalid_argument unless Left == Right > Up > Repellor, OverlapDetector > 0.
  void validate() const;

  friend bool operator==(const MachineBody&, const MachineBody&) = default;
};

/// Position of the machine's middle and its heading (CCW-positive, radians).
template <typename Scalar>
struct PoseT {
  Vec2<Scalar> position = Vec2<Scalar>::Zero();
  Scalar heading = Scalar(0);

  friend bool operator==(const PoseT&, const PoseT&) = default;
};
using Pose = PoseT<double>;

struct Kinematics {
  Vec2d velocity = Vec2d::Zero();
  double omega = 0.0;

  friend bool operator==(const Kinematics&, const Kinematics&) = default;
};

enum class BondKind : std::uint8_t { Sideways, Up };

template <typename Scalar>
Vec2<Scalar> armOffset(Scalar heading, const MachineBody& body, Arm arm) {
  const Eigen::Rotation2D<Scalar> rot(heading);
  return rot * (MachineBody::direction(arm).cast<Scalar>() * Scalar(body.length(arm)));
}

template <typename Scalar>
Vec2<Scalar> armTip(const PoseT<Scalar>& pose, const MachineBody& body, Arm arm) {
  return pose.position + armOffset(pose.heading, body, arm);
}

/// Sideways: A's Right arm is bonded to B's Left arm, result is headingB - headingA.
/// Up: result is headingB - headingA - pi, so a mirror-facing pair reads 0.
template <typename Scalar>
Scalar relativeBondAngle(const PoseT<Scalar>& a, const PoseT<Scalar>& b, BondKind kind) {
  Scalar diff = b.heading - a.heading;
  if (kind == BondKind::Up) diff -= Scalar(kPi);
  return normalizeAngle(diff);
}

/// Moment of inertia of the arms treated as uniform rods of total mass `mass`.
double rodInertia(const MachineBody& body, double mass);

}  // namespace jv2

#endif  // JV2_GEOMETRY_HPP
