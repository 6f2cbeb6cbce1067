#pragma once

#include <array>
#include <utility>
#include <vector>

#include "grid.hpp"

namespace levyfield {

// Grid points within Euclidean distance `radius` of a point, as a list of
// axis-0 runs: for every offset (d1, d2) along axes 1 and 2, the run covers
// axis-0 offsets [-w0, w0].
struct BallShape {
  double radius = 0.0;
  struct Run {
    int d1, d2, w0;
  };
  std::vector<Run> runs;
};

BallShape ball_shape(const GridSpec& grid, double radius);

// Range minimum/maximum over axis-0 runs of a gridded field (sparse tables
// per row), used for oscillations over balls and boxes.
class BallExtrema {
 public:
  // `default_radius` is the ball used by range(flat).
  BallExtrema(const GridSpec& grid, const std::vector<double>& values, double default_radius);

  std::pair<double, double> range(std::size_t flat, const BallShape& shape) const;
  std::pair<double, double> range(std::size_t flat) const { return range(flat, default_shape_); }
  std::size_t count(std::size_t flat, const BallShape& shape) const;

  // Extrema over the index box lo..hi (inclusive on every axis).
  std::pair<double, double> box_range(const std::array<int, 3>& lo, const std::array<int, 3>& hi) const;

 private:
  std::pair<double, double> row_range(std::size_t row_start, int l, int r) const;

  const GridSpec& grid_;
  const std::vector<double>& values_;
  int n0_ = 1;
  int levels_ = 1;
  // level k holds extrema over [i, i + 2^k) within each row
  std::vector<std::vector<double>> min_, max_;
  BallShape default_shape_;
};

}  // namespace levyfield
