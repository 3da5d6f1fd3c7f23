#ifndef JV2_RENDER_HPP
#define JV2_RENDER_HPP

#include <string>

#include "jv2/engine.hpp"

namespace jv2 {

struct RenderOptions {
  double pixelsPerUnit = 20.0;
  double margin = 10.0;  // pixels around the container
};

/// SVG of the container and every machine, in id order. Arms are drawn Repellor first so the
/// Up arm covers it. Legend by stroke colour: free grey, gene blue, folded orange, in-mesh
/// green; bonds are thin black segments between the bonded tips. Numbers are printed with
/// fixed precision so the text is identical across platforms.
std::string renderFrame(const World& world, const RenderOptions& options = {});

}  // namespace jv2

#endif  // JV2_RENDER_HPP
