#include <doctest.h>

#include <cmath>

#include "analysis.hpp"
#include "oracles.hpp"

using namespace levyfield;

namespace {

FieldSample make_sample(const GridSpec& g, const std::function<double(const Vec&)>& f) {
  FieldSample s;
  s.grid = g;
  s.tag = ComponentTag::Jump;
  for (std::size_t i = 0; i < g.size(); ++i) s.values.push_back(f(g.point(i)));
  return s;
}

// Fractional Brownian-like deterministic cusp.
double cusp(double t, double t0, double h) { return std::pow(std::abs(t - t0), h); }

}  // namespace

TEST_CASE("oscillation is nonincreasing in k and matches a cusp") {
  const GridSpec g({{0.0, 1.0, 4097}});
  const auto s = make_sample(g, [](const Vec& t) { return cusp(t[0], 0.5, 0.3); });
  double prev = kInf;
  for (int k = 1; k <= 9; ++k) {
    const double o = oscillation(s, 2048, k);
    CHECK(o <= prev);
    // Ball of radius 2^-k around the cusp: sup is r^0.3, inf is 0.
    CHECK(o == doctest::Approx(std::pow(std::ldexp(1.0, -k), 0.3)).epsilon(1e-12));
    prev = o;
  }
  CHECK_THROWS_AS(oscillation(s, 2048, 12), Error);
}

TEST_CASE("holder map recovers cusp exponents") {
  const GridSpec g({{0.0, 1.0, 4097}});
  for (double h : {0.2, 0.5, 0.8}) {
    const auto s = make_sample(g, [&](const Vec& t) { return cusp(t[0], 0.5, h); });
    const auto m = holder_map(s, {2, 8, 2.0, 1});
    CHECK(m.flag[2048] == PointFlag::Ok);
    CHECK(m.exponent[2048] == doctest::Approx(h).epsilon(1e-9));
  }
  // |t|^1.5 needs the detrended oscillation.
  const auto s = make_sample(g, [](const Vec& t) { return cusp(t[0], 0.5, 1.5); });
  const auto m = holder_map(s, {2, 8, 2.0, 1});
  CHECK(m.detrended[2048]);
  CHECK(std::abs(m.exponent[2048] - 1.5) <= 0.05);
}

TEST_CASE("constant and affine fields are saturated") {
  const GridSpec g({{0.0, 1.0, 65}, {0.0, 1.0, 65}});
  const auto c = make_sample(g, [](const Vec&) { return 3.25; });
  const auto hc = holder_map(c, {2, 5, 2.0, 1});
  for (auto f : hc.flag) CHECK(f == PointFlag::Saturated);
  const auto est = spectrum_estimate(c, {21, 0.1, 2, 5});
  for (char a : est.absent) CHECK(a);

  const auto lin = make_sample(g, [](const Vec& t) { return 2.0 * t[0] - t[1]; });
  const auto hl = holder_map(lin, {2, 5, 2.0, 4});
  for (auto f : hl.flag) CHECK(f == PointFlag::Saturated);
}

TEST_CASE("adding a constant leaves exponents unchanged") {
  const GridSpec g({{0.0, 1.0, 129}, {0.0, 1.0, 129}});
  auto f = [](const Vec& t) { return std::sin(7 * t[0]) * cusp(t[1], 0.41, 0.35) + cusp(t[0], 0.63, 0.6); };
  const auto a = make_sample(g, f);
  const auto b = make_sample(g, [&](const Vec& t) { return f(t) + 1.0; });
  const auto ha = holder_map(a, {2, 5, 2.0, 3});
  const auto hb = holder_map(b, {2, 5, 2.0, 3});
  REQUIRE(ha.exponent.size() == hb.exponent.size());
  for (std::size_t i = 0; i < ha.exponent.size(); ++i) {
    CHECK(ha.flag[i] == hb.flag[i]);
    CHECK(std::abs(ha.exponent[i] - hb.exponent[i]) <= 1e-12);
  }
}

TEST_CASE("spectrum bookkeeping") {
  const GridSpec g({{0.0, 1.0, 257}, {0.0, 1.0, 257}});
  const auto s = make_sample(g, [](const Vec& t) { return cusp(t[0], 0.3, 0.4) + t[1]; });
  const auto est = spectrum_estimate(s, {21, 0.1, 2, 6});
  CHECK(est.scales == std::vector<int>{2, 3, 4, 5, 6});
  for (std::size_t k = 0; k < est.scales.size(); ++k) {
    long long sum = est.saturated[k];
    for (const auto& row : est.counts) sum += row[k];
    CHECK(sum == est.total_boxes[k]);
    // Closed boxes of side 2^-k aligned on a 256-cell grid: (2^k)^2 of them.
    CHECK(est.total_boxes[k] == (1LL << (2 * est.scales[k])));
  }
  for (std::size_t i = 0; i < est.h_center.size(); ++i) {
    CHECK(est.h_center[i] == doctest::Approx(0.1 * i));
    if (!est.absent[i]) {
      CHECK(est.D[i] >= 0.0);
      CHECK(est.D[i] <= 2.0);
    }
  }
  // Only boxes along the cusp line {t_1 = 0.3} have small coarse exponents
  // (biased upward from 0.4 at finite k): their number grows like 2^k, not 4^k.
  for (std::size_t k = 2; k < est.scales.size(); ++k) {
    long long low = 0;
    for (std::size_t i = 0; i <= 6; ++i) low += est.counts[i][k];
    CHECK(low >= (1LL << est.scales[k]));
    CHECK(low <= 8 * (1LL << est.scales[k]));
  }
}

TEST_CASE("approximation map") {
  AtomSet atoms;
  atoms.dim = 1;
  atoms.A = 1.0;
  atoms.J_trunc = 12;
  atoms.bands.resize(13);
  atoms.bands[2] = {{0.5, Direction::axis(0), 0.3, 2}};
  const GridSpec g({{0.0, 1.0, 17}});
  const auto far = approx_exponent_map(atoms, g, 4);
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (p == 8) {
      CHECK(far.flag[p] == PointFlag::JumpLocus);
    } else {
      CHECK(far.flag[p] == PointFlag::Ok);
      CHECK(std::isinf(far.a_hat[p]));
    }
  }
  // With the band included the critical exponent is log|x| / log d.
  const auto near = approx_exponent_map(atoms, g, 1);
  const double d = std::abs(g.coords(0)[9] - 0.5);
  CHECK(near.a_hat[9] == doctest::Approx(std::log(0.3) / std::log(d)).epsilon(1e-12));
  CHECK_THROWS_AS(approx_exponent_map(atoms, g, 9), Error);

  const JumpMeasure nu(2, ProductLaw{SphericalMeasure(2, 1.0, {}), StableRadial{1.2, 1.0}});
  const GridSpec g2({{-0.5, 0.5, 33}, {-0.5, 0.5, 33}});
  const auto a10 = approx_exponent_map(sample_atoms(nu, 0.71, 10, 3), g2, 4);
  const auto a14 = approx_exponent_map(sample_atoms(nu, 0.71, 14, 3), g2, 4);
  for (std::size_t p = 0; p < g2.size(); ++p) CHECK(a14.a_hat[p] <= a10.a_hat[p]);
}

TEST_CASE("agreement of identical maps") {
  const GridSpec g({{0.0, 1.0, 11}});
  HolderMap h;
  h.grid = g;
  ApproxExponentMap a;
  a.grid = g;
  for (std::size_t i = 0; i < g.size(); ++i) {
    h.source.push_back(i);
    h.exponent.push_back(0.1 * i);
    h.r2.push_back(1.0);
    h.flag.push_back(i == 3 ? PointFlag::Saturated : PointFlag::Ok);
    h.detrended.push_back(0);
    a.a_hat.push_back(0.1 * i);
    a.flag.push_back(i == 5 ? PointFlag::JumpLocus : PointFlag::Ok);
  }
  const auto rep = exponent_agreement(h, a);
  CHECK(rep.pairs.size() == 9);
  CHECK(rep.median_abs_diff == 0.0);
  CHECK(rep.fraction_within == 1.0);
  const auto comb = exponent_agreement(h, a, true);
  for (const auto& [x, y] : comb.pairs) CHECK(y == std::min(0.5, x));

  HolderMap other = h;
  other.grid = GridSpec({{0.0, 2.0, 11}});
  CHECK_THROWS_AS(exponent_agreement(other, a), Error);
}

TEST_CASE("quantiles interpolate linearly") {
  CHECK(quantile({4, 1, 3, 2}, 0.5) == 2.5);
  CHECK(quantile({4, 1, 3, 2}, 0.25) == 1.75);
  CHECK(quantile({7}, 0.9) == 7);
  CHECK_THROWS_AS(quantile({}, 0.5), Error);
}
