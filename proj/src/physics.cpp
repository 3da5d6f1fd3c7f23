#include "jv2/physics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace jv2 {

void PhysicsParams::validate(const MachineBody& body) const {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive and finite");
  };
  const auto nonNegative = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be non-negative");
  };
  positive(dt, "dt");
  positive(fieldRadius, "fieldRadius");
  positive(springK, "springK");
  positive(twistK, "twistK");
  positive(repelK, "repelK");
  nonNegative(brownianLinearSigma, "brownianLinearSigma");
  nonNegative(brownianAngularSigma, "brownianAngularSigma");
  positive(linearDrag, "linearDrag");
  positive(angularDrag, "angularDrag");
  positive(mass, "mass");
  positive(inertia, "inertia");
  positive(speedClamp, "speedClamp");
  positive(containerWidth, "containerWidth");
  positive(containerHeight, "containerHeight");
  if (!(linearDrag < 1.0)) throw std::invalid_argument("linearDrag must be below 1");
  if (!(angularDrag < 1.0)) throw std::invalid_argument("angularDrag must be below 1");
  if (!(fieldRadius < body.length(Arm::Up))) {
    throw std::invalid_argument("fieldRadius must be shorter than the up arm");
  }
}

PairForces repellorForce(const Pose& a, const Pose& b, const MachineBody& body, const PhysicsParams& params) {
  PairForces out;
  const Vec2d offA = armOffset(a.heading, body, Arm::Repellor);
  const Vec2d offB = armOffset(b.heading, body, Arm::Repellor);
  const Vec2d d = (b.position + offB) - (a.position + offA);
  const double sep = d.norm();
  if (sep >= params.fieldRadius) return out;
  Vec2d axis;
  if (sep > 0.0) {
    axis = d / sep;
  } else {
    const Vec2d mid = b.position - a.position;
    axis = mid.norm() > 0.0 ? Vec2d(mid.normalized()) : Vec2d(1.0, 0.0);
  }
  const Vec2d f = params.repelK * (params.fieldRadius - sep) * axis;
  out.forceA = -f;
  out.forceB = f;
  out.torqueA = cross2(offA, Vec2d(-f));
  out.torqueB = cross2(offB, f);
  return out;
}

BrownianKick brownianKick(Rng& rng, const PhysicsParams& params) {
  BrownianKick k;
  const auto [nx, ny] = rng.normalPair();
  k.dv.x() = params.brownianLinearSigma * nx;
  k.dv.y() = params.brownianLinearSigma * ny;
  k.domega = params.brownianAngularSigma * rng.normal();
  return k;
}

std::pair<Pose, Kinematics> integrate(const Pose& pose, const Kinematics& kin, const ForceAccumulator& acc,
                                      const PhysicsParams& params) {
  return integrate(pose, kin, acc, BrownianKick{}, params);
}

std::pair<Pose, Kinematics> integrate(const Pose& pose, const Kinematics& kin, const ForceAccumulator& acc,
                                      const BrownianKick& kick, const PhysicsParams& params) {
  Kinematics k;
  k.velocity = (kin.velocity + params.dt * acc.force / params.mass + kick.dv) * (1.0 - params.linearDrag);
  const double speed = k.velocity.norm();
  if (speed > params.speedClamp) k.velocity *= params.speedClamp / speed;
  k.omega = (kin.omega + params.dt * acc.torque / params.inertia + kick.domega) * (1.0 - params.angularDrag);
  k.omega = std::clamp(k.omega, -params.speedClamp, params.speedClamp);

  Pose p;
  p.position = pose.position + params.dt * k.velocity;
  p.heading = wrapHeading(pose.heading + params.dt * k.omega);

  const double limits[2] = {params.containerWidth, params.containerHeight};
  for (int axis = 0; axis < 2; ++axis) {
    if (p.position[axis] < 0.0) {
      p.position[axis] = 0.0;
      if (k.velocity[axis] < 0.0) k.velocity[axis] = 0.0;
    } else if (p.position[axis] > limits[axis]) {
      p.position[axis] = limits[axis];
      if (k.velocity[axis] > 0.0) k.velocity[axis] = 0.0;
    }
  }
  return {p, k};
}

double kineticEnergy(const Kinematics& kin, const PhysicsParams& params) {
  return 0.5 * params.mass * kin.velocity.squaredNorm() + 0.5 * params.inertia * kin.omega * kin.omega;
}

}  // namespace jv2
