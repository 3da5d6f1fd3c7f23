#include "jv2/render.hpp"

#include <cstdio>
#include <string>

namespace jv2 {

namespace {

class Svg {
 public:
  Svg(const World& w, const RenderOptions& o) : w_(w), o_(o) {}

  double sx(double x) const { return o_.margin + x * o_.pixelsPerUnit; }
  double sy(double y) const { return o_.margin + (w_.params.containerHeight - y) * o_.pixelsPerUnit; }

  void line(const Vec2d& a, const Vec2d& b, const char* cls, const char* colour, double width) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<line class=\"%s\" x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" stroke=\"%s\" "
                  "stroke-width=\"%.2f\"/>\n",
                  cls, sx(a.x()), sy(a.y()), sx(b.x()), sy(b.y()), colour, width);
    out += buf;
  }

  std::string out;

 private:
  const World& w_;
  const RenderOptions& o_;
};

const char* colourOf(const MachineState& m) {
  if (m.internal.inMesh) return "#2e8b57";
  if (m.internal.folded) return "#e07b00";
  if (m.isFree()) return "#808080";
  return "#1f5fbf";
}

}  // namespace

std::string renderFrame(const World& world, const RenderOptions& options) {
  Svg svg(world, options);
  const double width = world.params.containerWidth * options.pixelsPerUnit + 2 * options.margin;
  const double height = world.params.containerHeight * options.pixelsPerUnit + 2 * options.margin;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                width, height, width, height);
  svg.out += buf;
  std::snprintf(buf, sizeof buf,
                "<rect class=\"container\" x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" fill=\"none\" "
                "stroke=\"#a0a0a0\" stroke-width=\"2\"/>\n",
                options.margin, options.margin, world.params.containerWidth * options.pixelsPerUnit,
                world.params.containerHeight * options.pixelsPerUnit);
  svg.out += buf;
  std::snprintf(buf, sizeof buf, "<!-- step %llu, %zu machines -->\n",
                static_cast<unsigned long long>(world.stepNumber), world.machines.size());
  svg.out += buf;

  static constexpr Arm kDrawOrder[] = {Arm::Repellor, Arm::Up, Arm::Left, Arm::Right, Arm::OverlapDetector};
  for (const MachineState& m : world.machines) {
    std::snprintf(buf, sizeof buf, "<g class=\"machine\" id=\"m%u\" data-type=\"%d\">\n", m.id(), m.type().value());
    svg.out += buf;
    for (Arm arm : kDrawOrder) {
      svg.line(m.pose.position, armTip(m.pose, world.body, arm), armName(arm), colourOf(m), 2.0);
    }
    svg.out += "</g>\n";
  }

  // Each bond once, from its lower-id end.
  for (const MachineState& m : world.machines) {
    for (BondSlot slot : kAllSlots) {
      const auto& other = m.bonds[slot];
      if (!other || *other < m.id()) continue;
      const MachineState& o = world.machines[*other];
      const Vec2d a = armTip(m.pose, world.body, slotArm(slot));
      const Vec2d b = armTip(o.pose, world.body, slotArm(partnerSlot(slot)));
      svg.line(a, b, "bond", "#000000", 1.0);
    }
  }
  svg.out += "</svg>\n";
  return svg.out;
}

}  // namespace jv2
