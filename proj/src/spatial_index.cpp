#include "jv2/spatial_index.hpp"

#include <algorithm>
#include <cmath>

namespace jv2 {

void SpatialIndex::build(std::span<const Vec2d> positions, double pad, Mode mode, double cellSize) {
  mode_ = mode;
  pad_ = pad;
  positions_.assign(positions.begin(), positions.end());
  items_.clear();
  cellStart_.clear();
  nx_ = ny_ = 0;
  if (mode_ == Mode::BruteForce || positions_.empty()) return;

  cell_ = cellSize > 0.0 ? cellSize : std::max(2.0 * pad, 1e-6);
  Vec2d lo = positions_.front();
  Vec2d hi = lo;
  for (const Vec2d& p : positions_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  origin_ = lo;
  nx_ = cellCoord(hi.x(), origin_.x()) + 1;
  ny_ = cellCoord(hi.y(), origin_.y()) + 1;

  const std::size_t cells = std::size_t(nx_ * ny_);
  cellStart_.assign(cells + 1, 0);
  std::vector<std::uint32_t> cellOf(positions_.size());
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    const auto c = std::uint32_t(cellCoord(positions_[i].y(), origin_.y()) * nx_ +
                                 cellCoord(positions_[i].x(), origin_.x()));
    cellOf[i] = c;
    ++cellStart_[c + 1];
  }
  for (std::size_t c = 0; c < cells; ++c) cellStart_[c + 1] += cellStart_[c];
  items_.resize(positions_.size());
  std::vector<std::uint32_t> fill(cellStart_.begin(), cellStart_.end() - 1);
  for (std::size_t i = 0; i < positions_.size(); ++i) items_[fill[cellOf[i]]++] = MachineId(i);
}

std::int64_t SpatialIndex::cellCoord(double v, double origin) const {
  return std::int64_t(std::floor((v - origin) / cell_));
}

void SpatialIndex::neighboursWithin(const Vec2d& point, double radius, std::vector<MachineId>& out) const {
  out.clear();
  const double reach = radius + pad_;
  const double reach2 = reach * reach;
  if (mode_ == Mode::BruteForce || nx_ == 0) {
    for (std::size_t i = 0; i < positions_.size(); ++i) {
      if ((positions_[i] - point).squaredNorm() <= reach2) out.push_back(MachineId(i));
    }
    return;
  }
  const std::int64_t x0 = std::max<std::int64_t>(0, cellCoord(point.x() - reach, origin_.x()));
  const std::int64_t x1 = std::min<std::int64_t>(nx_ - 1, cellCoord(point.x() + reach, origin_.x()));
  const std::int64_t y0 = std::max<std::int64_t>(0, cellCoord(point.y() - reach, origin_.y()));
  const std::int64_t y1 = std::min<std::int64_t>(ny_ - 1, cellCoord(point.y() + reach, origin_.y()));
  for (std::int64_t y = y0; y <= y1; ++y) {
    for (std::int64_t x = x0; x <= x1; ++x) {
      const std::size_t c = std::size_t(y * nx_ + x);
      for (std::uint32_t k = cellStart_[c]; k < cellStart_[c + 1]; ++k) {
        const MachineId id = items_[k];
        if ((positions_[id] - point).squaredNorm() <= reach2) out.push_back(id);
      }
    }
  }
  std::sort(out.begin(), out.end());
}

std::vector<MachineId> SpatialIndex::neighboursWithin(const Vec2d& point, double radius) const {
  std::vector<MachineId> out;
  neighboursWithin(point, radius, out);
  return out;
}

}  // namespace jv2
