#ifndef JV2_SPATIAL_INDEX_HPP
#define JV2_SPATIAL_INDEX_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "jv2/geometry.hpp"

namespace jv2 {

/// Uniform grid over machine middles, stored as counting-sorted cell ranges.
/// A query returns every machine whose middle lies within radius + pad of the point, where
/// pad covers the longest arm plus one field radius. Results are sorted by id.
class SpatialIndex {
 public:
  enum class Mode : std::uint8_t { Grid, BruteForce };

  SpatialIndex() = default;

  /// `positions[i]` is the middle of machine i. `cellSize` <= 0 picks 2 * pad.
  void build(std::span<const Vec2d> positions, double pad, Mode mode = Mode::Grid, double cellSize = 0.0);

  void neighboursWithin(const Vec2d& point, double radius, std::vector<MachineId>& out) const;
  std::vector<MachineId> neighboursWithin(const Vec2d& point, double radius) const;

  double pad() const { return pad_; }
  Mode mode() const { return mode_; }
  std::size_t size() const { return positions_.size(); }

 private:
  std::int64_t cellCoord(double v, double origin) const;

  Mode mode_ = Mode::Grid;
  double pad_ = 0.0;
  double cell_ = 1.0;
  Vec2d origin_ = Vec2d::Zero();
  std::int64_t nx_ = 0;
  std::int64_t ny_ = 0;
  std::vector<Vec2d> positions_;
  std::vector<std::uint32_t> cellStart_;  // nx*ny + 1 offsets into items_
  std::vector<MachineId> items_;
};

}  // namespace jv2

#endif  // JV2_SPATIAL_INDEX_HPP
