#ifndef JV2_PHYSICS_HPP
#define JV2_PHYSICS_HPP

#include <utility>

#include "jv2/geometry.hpp"
#include "jv2/rng.hpp"

namespace jv2 {

struct PhysicsParams {
  double dt = 0.1;
  double fieldRadius = 0.25;
  double springK = 4.0;
  double twistK = 1.5;
  double repelK = 8.0;
  double brownianLinearSigma = 0.04;
  double brownianAngularSigma = 0.02;
  double linearDrag = 0.08;
  double angularDrag = 0.08;
  double mass = 1.0;
  double inertia = 0.5;
  double speedClamp = 0.5;
  double containerWidth = 40.0;
  double containerHeight = 40.0;

  /// Throws std::invalid_argument naming the offending field.
  void validate(const MachineBody& body) const;

  friend bool operator==(const PhysicsParams&, const PhysicsParams&) = default;
};

template <typename Scalar>
struct ForceAccumulatorT {
  Vec2<Scalar> force = Vec2<Scalar>::Zero();
  Scalar torque = Scalar(0);

  void reset() {
    force.setZero();
    torque = Scalar(0);
  }

  /// Adds a force applied at `offset` from the middle.
  void addAt(const Vec2<Scalar>& f, const Vec2<Scalar>& offset) {
    force += f;
    torque += cross2(offset, f);
  }
};
using ForceAccumulator = ForceAccumulatorT<double>;

/// Forces and torques on the two ends of a pairwise interaction.
template <typename Scalar>
struct PairForcesT {
  Vec2<Scalar> forceA = Vec2<Scalar>::Zero();
  Vec2<Scalar> forceB = Vec2<Scalar>::Zero();
  Scalar torqueA = Scalar(0);
  Scalar torqueB = Scalar(0);
};
using PairForces = PairForcesT<double>;

/// Arms a bond of the given kind joins: Sideways means A's Right to B's Left.
inline std::pair<Arm, Arm> bondArms(BondKind kind) {
  return kind == BondKind::Sideways ? std::pair{Arm::Right, Arm::Left} : std::pair{Arm::Up, Arm::Up};
}

/// Linear spring between two arm tips, applied at the tips. Potential 0.5 k |tipB - tipA|^2.
template <typename Scalar>
PairForcesT<Scalar> tipSpring(const PoseT<Scalar>& a, Arm armA, const PoseT<Scalar>& b, Arm armB,
                              const MachineBody& body, Scalar k) {
  const Vec2<Scalar> offA = armOffset(a.heading, body, armA);
  const Vec2<Scalar> offB = armOffset(b.heading, body, armB);
  const Vec2<Scalar> f = k * ((b.position + offB) - (a.position + offA));
  PairForcesT<Scalar> out;
  out.forceA = f;
  out.forceB = -f;
  out.torqueA = cross2(offA, f);
  out.torqueB = cross2(offB, Vec2<Scalar>(-f));
  return out;
}

/// Spring between the bonded tips plus a twist spring on the relative bond angle.
/// Potential 0.5 springK d^2 + 0.5 twistK err^2, err = normalize(relative - desired).
template <typename Scalar>
PairForcesT<Scalar> bondForces(const PoseT<Scalar>& a, const PoseT<Scalar>& b, const MachineBody& body,
                               BondKind kind, Scalar desiredAngle, const PhysicsParams& params) {
  const auto [armA, armB] = bondArms(kind);
  PairForcesT<Scalar> out = tipSpring(a, armA, b, armB, body, Scalar(params.springK));
  const Scalar err = normalizeAngle(relativeBondAngle(a, b, kind) - desiredAngle);
  out.torqueA += Scalar(params.twistK) * err;
  out.torqueB -= Scalar(params.twistK) * err;
  return out;
}

/// Potential energy of a bond; bondForces is its negative gradient.
template <typename Scalar>
Scalar bondPotential(const PoseT<Scalar>& a, const PoseT<Scalar>& b, const MachineBody& body, BondKind kind,
                     Scalar desiredAngle, const PhysicsParams& params) {
  const auto [armA, armB] = bondArms(kind);
  const Scalar d2 = (armTip(b, body, armB) - armTip(a, body, armA)).squaredNorm();
  const Scalar err = normalizeAngle(relativeBondAngle(a, b, kind) - desiredAngle);
  return Scalar(0.5) * Scalar(params.springK) * d2 + Scalar(0.5) * Scalar(params.twistK) * err * err;
}

/// Push between two active repellor tips: repelK (fieldRadius - separation) along the tip axis.
/// Coincident tips are pushed apart along the line between the middles.
PairForces repellorForce(const Pose& a, const Pose& b, const MachineBody& body, const PhysicsParams& params);

struct BrownianKick {
  Vec2d dv = Vec2d::Zero();
  double domega = 0.0;
};

/// Three normals (x and y share one polar pair). The draws consumed do not depend on the sigmas.
BrownianKick brownianKick(Rng& rng, const PhysicsParams& params);

/// Semi-implicit Euler with multiplicative drag, speed clamp and slippery walls.
std::pair<Pose, Kinematics> integrate(const Pose& pose, const Kinematics& kin, const ForceAccumulator& acc,
                                      const PhysicsParams& params);

/// Same, with a Brownian velocity kick added before drag.
std::pair<Pose, Kinematics> integrate(const Pose& pose, const Kinematics& kin, const ForceAccumulator& acc,
                                      const BrownianKick& kick, const PhysicsParams& params);

double kineticEnergy(const Kinematics& kin, const PhysicsParams& params);

}  // namespace jv2

#endif  // JV2_PHYSICS_HPP
