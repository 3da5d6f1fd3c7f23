#include "jv2/geometry.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace jv2 {

MachineType MachineType::of(int value) {
  if (value < 1 || value > 4) {
    throw std::out_of_range("machine type must be 1..4, got " + std::to_string(value));
  }
  return MachineType(static_cast<std::uint8_t>(value));
}

const char* armName(Arm arm) {
  switch (arm) {
    case Arm::Left: return "left";
    case Arm::Right: return "right";
    case Arm::Up: return "up";
    case Arm::Repellor: return "repellor";
    case Arm::OverlapDetector: return "overlap";
  }
  return "?";
}

double MachineBody::maxArmLength() const { return *std::max_element(armLength.begin(), armLength.end()); }

void MachineBody::validate() const {
  const double left = length(Arm::Left);
  const double right = length(Arm::Right);
  const double up = length(Arm::Up);
  const double rep = length(Arm::Repellor);
  const double od = length(Arm::OverlapDetector);
  if (!(rep > 0.0 && od > 0.0)) throw std::invalid_argument("arm lengths must be positive");
  if (left != right) throw std::invalid_argument("left and right arms must have equal length");
  if (!(up < left)) throw std::invalid_argument("up arm must be shorter than left/right arms");
  if (!(rep < up && od < up)) {
    throw std::invalid_argument("repellor and overlap-detector arms must be shorter than the up arm");
  }
}

double rodInertia(const MachineBody& body, double mass) {
  double total = 0.0;
  for (double l : body.armLength) total += l;
  // each arm is a rod pivoting at one end: (m_i l_i^2) / 3 with m_i proportional to l_i
  double inertia = 0.0;
  for (double l : body.armLength) inertia += (mass * l / total) * l * l / 3.0;
  return inertia;
}

}  // namespace jv2
