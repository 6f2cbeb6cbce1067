#include "balls.hpp"

#include <algorithm>
#include <bit>

namespace levyfield {

BallShape ball_shape(const GridSpec& grid, double radius) {
  BallShape shape;
  shape.radius = radius;
  const double r2 = radius * radius * (1.0 + 1e-12);
  const double h0 = grid.spacing(0);
  const double h1 = grid.dim() > 1 ? grid.spacing(1) : 0.0;
  const double h2 = grid.dim() > 2 ? grid.spacing(2) : 0.0;
  const int w1 = h1 > 0.0 ? static_cast<int>(std::floor(radius / h1 * (1.0 + 1e-12))) : 0;
  const int w2 = h2 > 0.0 ? static_cast<int>(std::floor(radius / h2 * (1.0 + 1e-12))) : 0;
  for (int d2 = -w2; d2 <= w2; ++d2) {
    for (int d1 = -w1; d1 <= w1; ++d1) {
      const double rest = (d1 * h1) * (d1 * h1) + (d2 * h2) * (d2 * h2);
      if (rest > r2) continue;
      const int w0 = h0 > 0.0 ? static_cast<int>(std::floor(std::sqrt((r2 - rest) / (h0 * h0)))) : 0;
      shape.runs.push_back({d1, d2, w0});
    }
  }
  return shape;
}

BallExtrema::BallExtrema(const GridSpec& grid, const std::vector<double>& values, double default_radius)
    : grid_(grid), values_(values), n0_(grid.count(0)) {
  require(values.size() == grid.size(), ErrorKind::Argument, "field has ", values.size(), " values for ",
          grid.size(), " grid points");
  levels_ = static_cast<int>(std::bit_width(static_cast<unsigned>(n0_)));
  min_.assign(levels_, {});
  max_.assign(levels_, {});
  min_[0] = values;
  max_[0] = values;
  const std::size_t n = values.size();
  for (int k = 1; k < levels_; ++k) {
    const int half = 1 << (k - 1);
    min_[k].resize(n);
    max_[k].resize(n);
    for (std::size_t row = 0; row < n; row += n0_) {
      for (int i = 0; i < n0_; ++i) {
        const std::size_t f = row + i;
        if (i + half < n0_) {
          min_[k][f] = std::min(min_[k - 1][f], min_[k - 1][f + half]);
          max_[k][f] = std::max(max_[k - 1][f], max_[k - 1][f + half]);
        } else {
          min_[k][f] = min_[k - 1][f];
          max_[k][f] = max_[k - 1][f];
        }
      }
    }
  }
  default_shape_ = ball_shape(grid, default_radius);
}

std::pair<double, double> BallExtrema::row_range(std::size_t row_start, int l, int r) const {
  const int len = r - l + 1;
  const int k = std::bit_width(static_cast<unsigned>(len)) - 1;
  const std::size_t a = row_start + l;
  const std::size_t b = row_start + r + 1 - (1 << k);
  return {std::min(min_[k][a], min_[k][b]), std::max(max_[k][a], max_[k][b])};
}

std::pair<double, double> BallExtrema::range(std::size_t flat, const BallShape& shape) const {
  const auto idx = grid_.multi_index(flat);
  double lo = kInf, hi = kNegInf;
  for (const auto& run : shape.runs) {
    std::array<int, 3> j = idx;
    j[1] += run.d1;
    j[2] += run.d2;
    if (grid_.dim() > 1 && (j[1] < 0 || j[1] >= grid_.count(1))) continue;
    if (grid_.dim() > 2 && (j[2] < 0 || j[2] >= grid_.count(2))) continue;
    j[0] = 0;
    const int l = std::max(0, idx[0] - run.w0);
    const int r = std::min(n0_ - 1, idx[0] + run.w0);
    const auto [a, b] = row_range(grid_.flat_index(j), l, r);
    lo = std::min(lo, a);
    hi = std::max(hi, b);
  }
  return {lo, hi};
}

std::size_t BallExtrema::count(std::size_t flat, const BallShape& shape) const {
  const auto idx = grid_.multi_index(flat);
  std::size_t c = 0;
  for (const auto& run : shape.runs) {
    if (grid_.dim() > 1 && (idx[1] + run.d1 < 0 || idx[1] + run.d1 >= grid_.count(1))) continue;
    if (grid_.dim() > 2 && (idx[2] + run.d2 < 0 || idx[2] + run.d2 >= grid_.count(2))) continue;
    c += std::min(n0_ - 1, idx[0] + run.w0) - std::max(0, idx[0] - run.w0) + 1;
  }
  return c;
}

std::pair<double, double> BallExtrema::box_range(const std::array<int, 3>& lo, const std::array<int, 3>& hi) const {
  double mn = kInf, mx = kNegInf;
  const int d = grid_.dim();
  for (int i2 = d > 2 ? lo[2] : 0; i2 <= (d > 2 ? hi[2] : 0); ++i2) {
    for (int i1 = d > 1 ? lo[1] : 0; i1 <= (d > 1 ? hi[1] : 0); ++i1) {
      const auto [a, b] = row_range(grid_.flat_index({0, i1, i2}), lo[0], hi[0]);
      mn = std::min(mn, a);
      mx = std::max(mx, b);
    }
  }
  return {mn, mx};
}

}  // namespace levyfield
