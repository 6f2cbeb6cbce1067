#include "gaussian.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <random>

#include "balls.hpp"
#include "rng.hpp"

namespace levyfield {

namespace {

void check_vector_dim(const Vec& u, int dim) {
  for (int i = dim; i < kMaxDim; ++i)
    require(u[i] == 0.0, ErrorKind::Argument, "vector has a nonzero component beyond dimension ", dim);
}

std::vector<double> sample_brownian_1d(double rate, const GridSpec& grid, Rng& rng) {
  const auto& t = grid.coords(0);
  const std::size_t n = t.size();
  std::vector<double> values(n, 0.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto first_pos = static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), 0.0) - t.begin());

  double prev_t = 0.0;
  double prev_v = 0.0;
  for (std::size_t i = first_pos; i < n; ++i) {
    if (t[i] != 0.0) prev_v += std::sqrt(rate * (t[i] - prev_t)) * normal(rng);
    values[i] = prev_v;
    prev_t = t[i];
  }
  prev_t = 0.0;
  prev_v = 0.0;
  for (std::size_t i = first_pos; i-- > 0;) {
    prev_v += std::sqrt(rate * (prev_t - t[i])) * normal(rng);
    values[i] = prev_v;
    prev_t = t[i];
  }
  return values;
}

}  // namespace

double variogram(const SphericalMeasure& mu, const Vec& u) {
  check_vector_dim(u, mu.dim());
  return 0.5 * mu.abs_moment(u);
}

double covariance(const SphericalMeasure& mu, const Vec& t, const Vec& t2) {
  return 0.5 * (variogram(mu, t) + variogram(mu, t2) - variogram(mu, difference(t, t2)));
}

std::vector<double> sample_gaussian(const SphericalMeasure& mu, const GridSpec& grid, std::uint64_t seed,
                                    const GaussianOptions& opts) {
  require(grid.dim() == mu.dim(), ErrorKind::Argument, "grid dimension ", grid.dim(),
          " does not match the measure dimension ", mu.dim());
  const std::size_t n = grid.size();
  Rng rng = make_rng(seed, StreamTag::Gaussian);
  if (mu.is_zero()) return std::vector<double>(n, 0.0);
  if (mu.dim() == 1) return sample_brownian_1d(0.5 * mu.total_mass(), grid, rng);

  require(n <= opts.cholesky_cap, ErrorKind::Config, "grid has ", n, " points, above the Cholesky cap of ",
          opts.cholesky_cap);

  std::vector<std::size_t> active;
  std::vector<Vec> pts;
  for (std::size_t f = 0; f < n; ++f) {
    const Vec p = grid.point(f);
    if (variogram(mu, p) > 0.0) {
      active.push_back(f);
      pts.push_back(p);
    }
  }
  const auto m = static_cast<Eigen::Index>(active.size());
  std::vector<double> values(n, 0.0);
  if (m == 0) return values;

  std::vector<double> var(m);
  for (Eigen::Index i = 0; i < m; ++i) var[i] = variogram(mu, pts[i]);
  Eigen::MatrixXd K(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    K(i, i) = var[i];
    for (Eigen::Index k = 0; k < i; ++k) {
      const double c = 0.5 * (var[i] + var[k] - variogram(mu, difference(pts[i], pts[k])));
      K(i, k) = c;
      K(k, i) = c;
    }
  }

  const double mean_diag = K.trace() / static_cast<double>(m);
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  for (double jitter = 1e-12; llt.info() != Eigen::Success; jitter *= 10.0) {
    require(jitter <= 1e-10 * 1.0000001, ErrorKind::Numeric,
            "covariance matrix is not positive semidefinite within jitter tolerance");
    Eigen::MatrixXd Kj = K;
    Kj.diagonal().array() += jitter * mean_diag;
    llt.compute(Kj);
  }

  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(m);
  for (Eigen::Index i = 0; i < m; ++i) z(i) = normal(rng);
  const Eigen::VectorXd y = llt.matrixL() * z;
  for (Eigen::Index i = 0; i < m; ++i) values[active[i]] = y(i);
  return values;
}

std::vector<std::pair<double, double>> modulus_statistic(const FieldSample& sample,
                                                         const std::vector<double>& deltas) {
  require(sample.tag == ComponentTag::Gaussian, ErrorKind::Argument, "modulus statistic needs a gaussian sample");
  const GridSpec& g = sample.grid;
  std::vector<std::pair<double, double>> out;
  for (double delta : deltas) {
    require(delta >= g.min_spacing() && delta < 1.0, ErrorKind::Argument, "delta ", delta,
            " must lie between the grid spacing and 1");
    BallExtrema balls(g, sample.values, delta);
    double sup = 0.0;
    for (std::size_t f = 0; f < g.size(); ++f) {
      const auto [lo, hi] = balls.range(f);
      sup = std::max({sup, hi - sample.values[f], sample.values[f] - lo});
    }
    out.emplace_back(delta, sup / std::sqrt(delta * std::log(1.0 / delta)));
  }
  return out;
}

}  // namespace levyfield
