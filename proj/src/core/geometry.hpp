#pragma once

#include <array>
#include <cmath>
#include <limits>

#include "errors.hpp"

namespace levyfield {

// Points and vectors of R^d, d <= 3. Unused trailing components are zero so
// that every inner product is evaluated with the same operation sequence.
using Vec = std::array<double, 3>;

inline constexpr int kMaxDim = 3;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline void check_dim(int d) {
  require(d >= 1 && d <= kMaxDim, ErrorKind::Config, "dimension must be 1, 2 or 3 (got ", d, ")");
}

// Always ((a0*b0 + a1*b1) + a2*b2); the jump-field evaluator relies on this
// exact sequence being shared by every indicator test.
inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec scaled(const Vec& a, double c) { return {a[0] * c, a[1] * c, a[2] * c}; }

inline Vec negated(const Vec& a) { return {-a[0], -a[1], -a[2]}; }

inline Vec sum(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }

inline Vec difference(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

// Unit vector of R^d.
class Direction {
 public:
  Direction() = default;

  // Normalizes any nonzero vector; components beyond `dim` must be zero.
  static Direction normalized(const Vec& v, int dim) {
    check_dim(dim);
    for (int i = dim; i < kMaxDim; ++i)
      require(v[i] == 0.0, ErrorKind::Config, "direction has a nonzero component beyond dimension ", dim);
    const double n = norm(v);
    require(std::isfinite(n) && n > 0.0, ErrorKind::Config, "direction must be a finite nonzero vector");
    Direction d;
    // Leave vectors that are already unit up to rounding untouched so that
    // normalizing twice is the identity.
    d.coords_ = std::abs(n - 1.0) <= 4e-16 ? v : scaled(v, 1.0 / n);
    return d;
  }

  static Direction axis(int i) {
    Direction d;
    d.coords_ = {0.0, 0.0, 0.0};
    d.coords_[i] = 1.0;
    return d;
  }

  const Vec& coords() const { return coords_; }
  double operator[](int i) const { return coords_[i]; }
  Direction operator-() const {
    Direction d;
    d.coords_ = negated(coords_);
    return d;
  }
  friend bool operator==(const Direction&, const Direction&) = default;

 private:
  Vec coords_{1.0, 0.0, 0.0};
};

}  // namespace levyfield
