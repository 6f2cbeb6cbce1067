#include "analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "balls.hpp"

namespace levyfield {

const char* flag_name(PointFlag flag) {
  switch (flag) {
    case PointFlag::Ok: return "OK";
    case PointFlag::Saturated: return "SATURATED";
    case PointFlag::JumpLocus: return "JUMP_LOCUS";
  }
  return "OK";
}

namespace {

constexpr double kOscFloor = 1e-12;

// Oscillations below this count as zero: 1e-12, relative to the field size
// once values exceed 1 in magnitude.
double saturation_threshold(const std::vector<double>& values) {
  double m = 1.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return kOscFloor * m;
}

double detrended_oscillation(const GridSpec& g, const std::vector<double>& values, std::size_t flat,
                             const BallShape& shape) {
  const int d = g.dim();
  const auto idx = g.multi_index(flat);
  const Vec c = g.point(flat);
  const double v0 = values[flat];

  auto for_each_point = [&](auto&& fn) {
    for (const auto& run : shape.runs) {
      std::array<int, 3> j = idx;
      j[1] += run.d1;
      j[2] += run.d2;
      if (d > 1 && (j[1] < 0 || j[1] >= g.count(1))) continue;
      if (d > 2 && (j[2] < 0 || j[2] >= g.count(2))) continue;
      const int l = std::max(0, idx[0] - run.w0);
      const int r = std::min(g.count(0) - 1, idx[0] + run.w0);
      for (j[0] = l; j[0] <= r; ++j[0]) {
        const std::size_t f = g.flat_index(j);
        fn(difference(g.point(j), c), values[f] - v0);
      }
    }
  };

  Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
  Eigen::Vector4d rhs = Eigen::Vector4d::Zero();
  for_each_point([&](const Vec& u, double v) {
    Eigen::Vector4d x(1.0, u[0], u[1], u[2]);
    M += x * x.transpose();
    rhs += x * v;
  });
  const int p = d + 1;
  const Eigen::VectorXd coef = M.topLeftCorner(p, p).completeOrthogonalDecomposition().solve(rhs.head(p));
  double lo = kInf, hi = kNegInf;
  for_each_point([&](const Vec& u, double v) {
    double fit = coef(0);
    for (int a = 0; a < d; ++a) fit += coef(a + 1) * u[a];
    lo = std::min(lo, v - fit);
    hi = std::max(hi, v - fit);
  });
  return hi - lo;
}

struct Fit {
  double slope = 0.0;
  double r2 = 1.0;
};

Fit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  Fit f;
  f.slope = sxy / sxx;
  if (syy > 0.0) f.r2 = std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  return f;
}

// Fit of log2 oscillation against -k.
Fit exponent_fit(const std::vector<double>& osc, int k_min) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < osc.size(); ++i) {
    x.push_back(-static_cast<double>(k_min + static_cast<int>(i)));
    y.push_back(std::log2(std::max(osc[i], kOscFloor)));
  }
  return linear_fit(x, y);
}

void check_sample(const FieldSample& sample) {
  require(sample.values.size() == sample.grid.size(), ErrorKind::Argument, "sample has ", sample.values.size(),
          " values for ", sample.grid.size(), " grid points");
  require(sample.grid.size() > 0, ErrorKind::Argument, "degenerate grid");
}

}  // namespace

double oscillation(const FieldSample& sample, std::size_t flat, int k, bool detrended) {
  check_sample(sample);
  const double radius = std::ldexp(1.0, -k);
  const BallExtrema balls(sample.grid, sample.values, radius);
  const BallShape shape = ball_shape(sample.grid, radius);
  require(balls.count(flat, shape) >= 4, ErrorKind::Argument, "scale 2^-", k,
          " is below the grid resolution (fewer than 4 points in the ball)");
  if (detrended) return detrended_oscillation(sample.grid, sample.values, flat, shape);
  const auto [lo, hi] = balls.range(flat, shape);
  return hi - lo;
}

HolderMap holder_map(const FieldSample& sample, const HolderOptions& opts) {
  check_sample(sample);
  require(opts.k_max - opts.k_min >= 2, ErrorKind::Argument, "holder map needs at least 3 scales (k_min = ",
          opts.k_min, ", k_max = ", opts.k_max, ")");
  require(opts.h_max > 0.0, ErrorKind::Argument, "h_max must be positive");
  const GridSpec& g = sample.grid;
  const int nk = opts.k_max - opts.k_min + 1;
  std::vector<BallShape> shapes;
  for (int k = opts.k_min; k <= opts.k_max; ++k) shapes.push_back(ball_shape(g, std::ldexp(1.0, -k)));
  const BallExtrema balls(g, sample.values, std::ldexp(1.0, -opts.k_min));
  const double thr = saturation_threshold(sample.values);

  HolderMap map;
  map.grid = g.subgrid(opts.stride);
  map.source = g.subgrid_indices(opts.stride);
  map.k_min = opts.k_min;
  map.k_max = opts.k_max;
  const std::size_t n = map.source.size();
  map.exponent.assign(n, 0.0);
  map.r2.assign(n, 1.0);
  map.flag.assign(n, PointFlag::Ok);
  map.detrended.assign(n, 0);

  std::vector<double> osc(nk);
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t f = map.source[p];
    require(balls.count(f, shapes.back()) >= 4, ErrorKind::Argument, "scale 2^-", opts.k_max,
            " is below the grid resolution (fewer than 4 points in the ball)");
    bool all_small = true;
    for (int i = 0; i < nk; ++i) {
      const auto [lo, hi] = balls.range(f, shapes[i]);
      osc[i] = hi - lo;
      all_small = all_small && osc[i] < thr;
    }
    // Locally affine at the finest scale: no singularity is resolved here.
    if (all_small || detrended_oscillation(g, sample.values, f, shapes.back()) < thr) {
      map.flag[p] = PointFlag::Saturated;
      map.exponent[p] = opts.h_max;
      continue;
    }
    Fit fit = exponent_fit(osc, opts.k_min);
    if (fit.slope > 0.95) {
      for (int i = 0; i < nk; ++i) osc[i] = detrended_oscillation(g, sample.values, f, shapes[i]);
      fit = exponent_fit(osc, opts.k_min);
      map.detrended[p] = 1;
    }
    map.exponent[p] = std::clamp(fit.slope, 0.0, opts.h_max);
    map.r2[p] = fit.r2;
  }
  return map;
}

SpectrumEstimate spectrum_estimate(const FieldSample& sample, const SpectrumOptions& opts) {
  check_sample(sample);
  require(opts.k_max - opts.k_min >= 2, ErrorKind::Argument, "spectrum needs at least 3 scales");
  require(opts.delta_h >= 0.05 && opts.delta_h <= 0.3, ErrorKind::Argument, "delta_h must lie in [0.05, 0.3] (got ",
          opts.delta_h, ")");
  require(opts.bins >= 1, ErrorKind::Argument, "spectrum needs at least one bin");
  const GridSpec& g = sample.grid;
  const int d = g.dim();
  for (int a = 0; a < d; ++a) require(g.count(a) >= 2, ErrorKind::Argument, "spectrum needs >= 2 points per axis");
  const BallExtrema balls(g, sample.values, 0.0);
  const double thr = saturation_threshold(sample.values);

  SpectrumEstimate est;
  est.delta_h = opts.delta_h;
  for (int i = 0; i < opts.bins; ++i) est.h_center.push_back(i * opts.delta_h);
  est.counts.assign(opts.bins, {});

  for (int k = opts.k_min; k <= opts.k_max; ++k) {
    est.scales.push_back(k);
    const double side = std::ldexp(1.0, -k);
    std::array<std::vector<std::pair<int, int>>, 3> boxes;
    for (int a = 0; a < d; ++a) {
      const double h = g.spacing(a);
      const auto& ax = g.axes()[a];
      const int nb = static_cast<int>(std::floor((ax.max - ax.min) / side + 1e-9));
      for (int b = 0; b < nb; ++b) {
        const int lo = static_cast<int>(std::ceil(b * side / h - 1e-9));
        const int hi = std::min(g.count(a) - 1, static_cast<int>(std::floor((b + 1) * side / h + 1e-9)));
        require(hi > lo, ErrorKind::Argument, "box side 2^-", k, " is below the grid resolution");
        boxes[a].emplace_back(lo, hi);
      }
    }
    for (int a = d; a < 3; ++a) boxes[a] = {{0, 0}};

    std::vector<long long> n_bin(opts.bins, 0);
    long long n_sat = 0, n_total = 0;
    for (const auto& b2 : boxes[2])
      for (const auto& b1 : boxes[1])
        for (const auto& b0 : boxes[0]) {
          const auto [lo, hi] = balls.box_range({b0.first, b1.first, b2.first}, {b0.second, b1.second, b2.second});
          ++n_total;
          const double w = hi - lo;
          if (w < thr) {
            ++n_sat;
            continue;
          }
          const double e = -std::log2(w) / k;
          const long long bin = std::max(0LL, static_cast<long long>(std::floor(e / opts.delta_h + 0.5)));
          if (bin < opts.bins) ++n_bin[bin];
        }
    if (n_total == 0) fail(ErrorKind::Argument, "no complete box of side 2^-", k, " fits in the grid");
    for (int i = 0; i < opts.bins; ++i) est.counts[i].push_back(n_bin[i]);
    est.saturated.push_back(n_sat);
    est.total_boxes.push_back(n_total);
  }

  const int ns = static_cast<int>(est.scales.size());
  struct BinFit {
    bool absent;
    double D, r2;
  };
  auto fit_counts = [&](const std::vector<long long>& c) -> BinFit {
    std::vector<double> x, y;
    for (int s = std::max(0, ns - 3); s < ns; ++s)
      if (c[s] > 0) {
        x.push_back(est.scales[s]);
        y.push_back(std::log2(static_cast<double>(c[s])));
      }
    if ((c[ns - 1] == 0 && c[ns - 2] == 0) || x.size() < 2) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      return {true, nan, nan};
    }
    const Fit fit = linear_fit(x, y);
    return {false, std::clamp(fit.slope, 0.0, static_cast<double>(d)), fit.r2};
  };
  for (int i = 0; i < opts.bins; ++i) {
    const BinFit f = fit_counts(est.counts[i]);
    est.absent.push_back(f.absent);
    est.D.push_back(f.D);
    est.r2.push_back(f.r2);
  }
  const BinFit sat = fit_counts(est.saturated);
  est.saturated_absent = sat.absent;
  est.saturated_D = sat.D;
  est.saturated_r2 = sat.r2;
  return est;
}

ApproxExponentMap approx_exponent_map(const AtomSet& atoms, const GridSpec& grid, int j_floor, double alpha_cap) {
  require(grid.dim() == atoms.dim, ErrorKind::Argument, "grid and atoms differ in dimension");
  require(atoms.J_trunc >= j_floor + 4, ErrorKind::Argument, "approximation map needs J_trunc >= j_floor + 4 (J_trunc = ",
          atoms.J_trunc, ", j_floor = ", j_floor, ")");
  require(alpha_cap > 0.0, ErrorKind::Argument, "alpha_cap must be positive");
  ApproxExponentMap map;
  map.grid = grid;
  map.alpha_cap = alpha_cap;
  map.j_lo = std::max(1, j_floor);
  map.j_hi = atoms.J_trunc;
  const int nb = map.j_hi - map.j_lo + 1;
  const std::size_t n = grid.size();
  map.band_min.assign(n * nb, kInf);
  map.flag.assign(n, PointFlag::Ok);
  map.a_hat.assign(n, kInf);

  constexpr double kLocus = 1e-14;
  const auto& c0 = grid.coords(0);
  const int n0 = grid.count(0);
  const double h0 = grid.spacing(0);

  for (int j = 0; j < static_cast<int>(atoms.bands.size()); ++j) {
    const bool scored = j >= map.j_lo && j <= map.j_hi;
    for (const auto& a : atoms.bands[j]) {
      const double ax = std::abs(a.x);
      const double width = scored ? std::min(1.0, std::pow(ax, 1.0 / alpha_cap)) : kLocus;
      const double log_x = std::log(ax);
      for (std::size_t row = 0; row < n; row += n0) {
        Vec t = grid.point(row);
        int lo = 0, hi = n0 - 1;
        if (a.s[0] != 0.0 && n0 > 1) {
          const double rest = a.s[1] * t[1] + a.s[2] * t[2];
          const double center = (a.rho - rest) / a.s[0];
          const double half = width / std::abs(a.s[0]);
          const double first = std::floor((center - half - c0[0]) / h0) - 1.0;
          const double last = std::ceil((center + half - c0[0]) / h0) + 1.0;
          if (last < 0.0 || first > n0 - 1) continue;
          lo = static_cast<int>(std::max(0.0, first));
          hi = static_cast<int>(std::min<double>(n0 - 1, last));
        } else if (std::abs(a.rho - dot(a.s.coords(), t)) > width) {
          continue;
        }
        for (int i = lo; i <= hi; ++i) {
          t[0] = c0[i];
          const double dist = std::abs(a.rho - dot(a.s.coords(), t));
          if (dist < kLocus) {
            map.flag[row + i] = PointFlag::JumpLocus;
            continue;
          }
          if (!scored || dist > width || dist >= 1.0) continue;
          const double alpha = log_x / std::log(dist);
          double& slot = map.band_min[(row + i) * nb + (j - map.j_lo)];
          if (alpha <= alpha_cap) slot = std::min(slot, alpha);
        }
      }
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    for (int b = 0; b < nb; ++b) map.a_hat[p] = std::min(map.a_hat[p], map.band_min[p * nb + b]);
  }
  return map;
}

AgreementReport exponent_agreement(const HolderMap& holder, const ApproxExponentMap& approx, bool combined,
                                   double tolerance) {
  require(holder.grid.same_as(approx.grid), ErrorKind::Argument, "holder and approximation maps use different grids");
  AgreementReport rep;
  rep.tolerance = tolerance;
  std::vector<double> diffs;
  for (std::size_t p = 0; p < holder.exponent.size(); ++p) {
    if (holder.flag[p] != PointFlag::Ok || approx.flag[p] != PointFlag::Ok) continue;
    if (!std::isfinite(approx.a_hat[p])) continue;
    const double ref = combined ? std::min(0.5, approx.a_hat[p]) : approx.a_hat[p];
    rep.pairs.emplace_back(holder.exponent[p], ref);
    rep.points.push_back(p);
    diffs.push_back(std::abs(holder.exponent[p] - ref));
  }
  if (diffs.empty()) return rep;
  rep.median_abs_diff = quantile(diffs, 0.5);
  const auto within = std::count_if(diffs.begin(), diffs.end(), [&](double x) { return x <= tolerance; });
  rep.fraction_within = static_cast<double>(within) / static_cast<double>(diffs.size());
  return rep;
}

double quantile(std::vector<double> values, double q) {
  require(!values.empty(), ErrorKind::Argument, "quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(i);
  return values[i] + frac * (values[i + 1] - values[i]);
}

ExponentSummary summarize(const HolderMap& holder) {
  std::vector<double> v;
  for (std::size_t p = 0; p < holder.exponent.size(); ++p)
    if (holder.flag[p] == PointFlag::Ok) v.push_back(holder.exponent[p]);
  ExponentSummary s;
  s.count = v.size();
  if (v.empty()) return s;
  s.median = quantile(v, 0.5);
  s.q1 = quantile(v, 0.25);
  s.q3 = quantile(v, 0.75);
  return s;
}

}  // namespace levyfield
