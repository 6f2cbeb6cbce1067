#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "field.hpp"
#include "measure.hpp"

namespace levyfield {

// d_mu(0,u)^2 = (1/2) \int |<s,u>| mu(ds)
double variogram(const SphericalMeasure& mu, const Vec& u);

// Cov(B(t), B(t2)) = (V(t) + V(t2) - V(t - t2)) / 2
double covariance(const SphericalMeasure& mu, const Vec& t, const Vec& t2);

struct GaussianOptions {
  std::size_t cholesky_cap = 4096;
};

// Centered Gaussian vector with the covariance above on every grid point.
// In d = 1 the field is a two-sided Brownian motion and is sampled exactly
// through independent increments, without a point cap. Otherwise the
// covariance is factorized (Cholesky with diagonal jitter of at most
// 1e-10 * trace/n). Points of zero variance, such as the origin, are 0.
std::vector<double> sample_gaussian(const SphericalMeasure& mu, const GridSpec& grid, std::uint64_t seed,
                                    const GaussianOptions& opts = {});

// For each delta: max |B(t') - B(t)| over grid pairs with |t - t'| <= delta,
// divided by (delta log(1/delta))^{1/2}.
std::vector<std::pair<double, double>> modulus_statistic(const FieldSample& sample, const std::vector<double>& deltas);

}  // namespace levyfield
