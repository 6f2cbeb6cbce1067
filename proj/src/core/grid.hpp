#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace levyfield {

struct AxisSpec {
  double min = 0.0;
  double max = 1.0;
  int count = 2;
};

// Rectangular lattice in R^d. Points are indexed with axis 0 varying fastest.
// Coordinates are stored explicitly so that sub-grids share bitwise-identical
// coordinates with their parent.
class GridSpec {
 public:
  GridSpec() = default;
  explicit GridSpec(std::vector<AxisSpec> axes);

  int dim() const { return static_cast<int>(axes_.size()); }
  const std::vector<AxisSpec>& axes() const { return axes_; }
  const std::vector<double>& coords(int axis) const { return coords_[axis]; }
  int count(int axis) const { return static_cast<int>(coords_[axis].size()); }
  std::size_t size() const;

  // Distance between consecutive coordinates (0 for single-point axes).
  double spacing(int axis) const;
  double min_spacing() const;

  std::size_t flat_index(const std::array<int, 3>& idx) const;
  std::array<int, 3> multi_index(std::size_t flat) const;
  Vec point(std::size_t flat) const;
  Vec point(const std::array<int, 3>& idx) const;

  // Index of the origin when it is a grid point.
  bool find_origin(std::size_t& flat) const;
  double max_norm() const;

  // Every `stride`-th point along each axis, starting at index 0.
  GridSpec subgrid(int stride) const;
  // Flat indices in this grid of the points of subgrid(stride).
  std::vector<std::size_t> subgrid_indices(int stride) const;

  bool same_as(const GridSpec& other) const;

 private:
  std::vector<AxisSpec> axes_;
  std::vector<std::vector<double>> coords_;
};

}  // namespace levyfield
