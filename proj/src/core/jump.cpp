#include "jump.hpp"

#include <algorithm>
#include <bit>
#include <climits>
#include <numbers>
#include <optional>
#include <random>

#include "rng.hpp"

namespace levyfield {

namespace {

using Int128 = __int128;

Direction isotropic_direction(int dim, Rng& rng) {
  if (dim == 1) return uniform01(rng) < 0.5 ? Direction::axis(0) : -Direction::axis(0);
  const double phi = 2.0 * std::numbers::pi * uniform01(rng);
  if (dim == 2) return Direction::normalized({std::cos(phi), std::sin(phi), 0.0}, 2);
  const double z = 2.0 * uniform01(rng) - 1.0;
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return Direction::normalized({r * std::cos(phi), r * std::sin(phi), z}, 3);
}

// Index drawn proportionally to cumulative weights.
std::size_t pick(const std::vector<double>& cumulative, Rng& rng) {
  const double u = uniform01(rng) * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

class DirectionSampler {
 public:
  explicit DirectionSampler(const SphericalMeasure& mu) : mu_(mu) {
    double c = 0.0;
    for (const auto& a : mu.half_atoms()) cumulative_.push_back(c += a.weight);
    iso_fraction_ = mu.isotropic_mass() / mu.total_mass();
  }

  Direction draw(Rng& rng) const {
    if (cumulative_.empty() || uniform01(rng) < iso_fraction_) return isotropic_direction(mu_.dim(), rng);
    const Direction s = mu_.half_atoms()[pick(cumulative_, rng)].s;
    return uniform01(rng) < 0.5 ? s : -s;
  }

 private:
  const SphericalMeasure& mu_;
  std::vector<double> cumulative_;
  double iso_fraction_ = 0.0;
};

// Keep a sampled magnitude inside band j despite rounding.
double clamp_to_band(double u, int j) {
  const double lo = band_lower(j);
  if (!(u > lo)) return std::nextafter(lo, kInf);
  if (j > 0 && u > band_upper(j)) return band_upper(j);
  return u;
}

// Magnitude within band j for one unit of directional mass.
double draw_magnitude(const RadialFamily& radial, int j, const std::vector<double>& cumulative,
                      const std::vector<double>& values, Rng& rng) {
  if (const auto* st = std::get_if<StableRadial>(&radial)) {
    const double U = uniform01(rng);
    if (j == 0) return clamp_to_band(std::pow(1.0 - U, -1.0 / st->alpha), 0);
    const double ta = std::pow(band_lower(j), -st->alpha);
    const double tb = std::pow(band_upper(j), -st->alpha);
    return clamp_to_band(std::pow(ta - U * (ta - tb), -1.0 / st->alpha), j);
  }
  if (std::holds_alternative<FiniteRadial>(radial)) return values[pick(cumulative, rng)];
  // Band tables carry no within-band law; use density proportional to 1/|x|.
  return clamp_to_band(band_lower(j) * std::exp2(uniform01(rng)), j);
}

// Second moment \int_{band j} x^2 of the radial family (both signs of x).
double band_second_moment(const RadialFamily& radial, int j) {
  if (const auto* st = std::get_if<StableRadial>(&radial)) {
    require(j > 0, ErrorKind::Argument, "second moment of band 0 is not used");
    const double p = 2.0 - st->alpha;
    return 2.0 * st->scale * (std::pow(band_upper(j), p) - std::pow(band_lower(j), p)) / p;
  }
  if (const auto* fin = std::get_if<FiniteRadial>(&radial)) {
    double m = 0.0;
    for (const auto& a : fin->half_atoms)
      if (band_index(a.x) == j) m += 2.0 * a.weight * a.x * a.x;
    return m;
  }
  const double lo = band_lower(j);
  return radial_band_mass(radial, j) * 3.0 * lo * lo / (2.0 * std::numbers::ln2);
}

double radial_tail_second_moment(const RadialFamily& radial, int J) {
  if (const auto* st = std::get_if<StableRadial>(&radial)) {
    const double p = 2.0 - st->alpha;
    return 2.0 * st->scale * std::pow(2.0, -J * p) / p;
  }
  if (const auto* fin = std::get_if<FiniteRadial>(&radial)) {
    double m = 0.0;
    for (const auto& a : fin->half_atoms)
      if (band_index(a.x) > J) m += 2.0 * a.weight * a.x * a.x;
    return m;
  }
  const auto& tab = std::get<BandTableRadial>(radial);
  const int n_table = static_cast<int>(tab.bands.size());
  double m = 0.0;
  for (int j = J + 1; j <= n_table; ++j) m += band_second_moment(radial, j);
  if (tab.continuation == Continuation::Zero) return m;
  for (int j = std::max(J, n_table) + 1; j < std::max(J, n_table) + 100000; ++j) {
    const double term = band_second_moment(radial, j);
    m += term;
    if (term <= 1e-17 * m || term == 0.0) break;
  }
  return m;
}

}  // namespace

std::size_t AtomSet::size() const {
  std::size_t n = 0;
  for (const auto& b : bands) n += b.size();
  return n;
}

namespace {

// Draws the Poisson hyperplane atoms band by band and hands each one to
// `emit(atom)`; `reserve(j, count)` is called before band j is drawn. Atoms
// whose (rho, s) fail `keep` are dropped before their magnitude is drawn.
template <class Reserve, class Keep, class Emit>
void draw_atoms(const JumpMeasure& nu, double A, int J_trunc, std::uint64_t seed, StreamTag tag,
                std::uint64_t replica, const SampleLimits& limits, Reserve&& reserve, Keep&& keep, Emit&& emit) {
  std::size_t total = 0;
  std::optional<DirectionSampler> directions;
  if (nu.is_product()) directions.emplace(nu.product().directional);
  std::vector<JointAtom> expanded;
  if (!nu.is_product()) expanded = nu.expanded_atoms();

  for (int j = 0; j <= J_trunc; ++j) {
    const double mass = band_mass(nu, j);
    require(std::isfinite(mass), ErrorKind::Config, "band ", j, " has infinite mass");
    const double mean = A * mass;
    if (mean == 0.0) continue;
    require(mean + static_cast<double>(total) <= static_cast<double>(limits.max_atoms), ErrorKind::Numeric,
            "expected atom count ", mean, " in band ", j, " exceeds the limit of ", limits.max_atoms,
            " atoms; lower A or J_trunc");
    Rng rng = make_rng(seed, tag, static_cast<std::uint64_t>(j), replica);
    std::poisson_distribution<long long> poisson(mean);
    const auto count = static_cast<std::size_t>(poisson(rng));
    total += count;
    require(total <= limits.max_atoms, ErrorKind::Numeric, "sampled atom count exceeds the limit of ",
            limits.max_atoms);

    // Per-band discrete laws.
    std::vector<double> cumulative, values;
    std::vector<const JointAtom*> joint;
    if (nu.is_product()) {
      if (const auto* fin = std::get_if<FiniteRadial>(&nu.product().radial)) {
        double c = 0.0;
        for (const auto& a : fin->half_atoms)
          if (band_index(a.x) == j) {
            cumulative.push_back(c += a.weight);
            values.push_back(a.x);
          }
      }
    } else {
      double c = 0.0;
      for (const auto& a : expanded)
        if (band_index(a.x) == j) {
          cumulative.push_back(c += a.weight);
          joint.push_back(&a);
        }
    }

    reserve(j, count);
    for (std::size_t n = 0; n < count; ++n) {
      HyperplaneAtom atom;
      atom.band = j;
      do atom.rho = A * uniform01(rng);
      while (atom.rho == 0.0);
      if (nu.is_product()) {
        atom.s = directions->draw(rng);
        if (!keep(atom)) continue;
        const double u = draw_magnitude(nu.product().radial, j, cumulative, values, rng);
        atom.x = uniform01(rng) < 0.5 ? u : -u;
      } else {
        const JointAtom& a = *joint[pick(cumulative, rng)];
        atom.s = a.s;
        atom.x = a.x;
        if (!keep(atom)) continue;
      }
      emit(atom);
    }
  }
}

}  // namespace

AtomSet sample_atoms(const JumpMeasure& nu, double A, int J_trunc, std::uint64_t seed, const SampleLimits& limits) {
  require(std::isfinite(A) && A > 0.0, ErrorKind::Config, "domain radius A must be positive (got ", A, ")");
  require(J_trunc >= 0, ErrorKind::Config, "J_trunc must be >= 0 (got ", J_trunc, ")");
  check_levy_integrability(nu);

  AtomSet set;
  set.dim = nu.dim();
  set.A = A;
  set.J_trunc = J_trunc;
  set.seed = seed;
  set.bands.resize(J_trunc + 1);
  if (nu.is_zero()) return set;

  draw_atoms(
      nu, A, J_trunc, seed, StreamTag::Jump, 0, limits, [&](int j, std::size_t count) { set.bands[j].reserve(count); },
      [](const HyperplaneAtom&) { return true; }, [&](const HyperplaneAtom& atom) { set.bands[atom.band].push_back(atom); });
  for (auto& band : set.bands)
    std::sort(band.begin(), band.end(), [](const HyperplaneAtom& a, const HyperplaneAtom& b) { return a.rho < b.rho; });
  return set;
}

Vec CompensatorTable::total() const {
  Vec t{};
  for (std::size_t j = 1; j < b.size(); ++j) t = sum(t, b[j]);
  return t;
}

CompensatorTable compensator_table(const JumpMeasure& nu, int J_trunc) {
  CompensatorTable table;
  table.b.assign(J_trunc + 1, Vec{});
  if (nu.is_product()) return table;  // symmetric radial law: every first moment vanishes
  for (const auto& a : nu.atom_list().half_atoms) {
    const int j = band_index(a.x);
    if (j >= 1 && j <= J_trunc) table.b[j] = sum(table.b[j], scaled(a.s.coords(), a.weight * a.x));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Grid evaluation.
//
// Every jump x is an integer multiple of 2^e_min, where e_min is the exponent
// of the unit in the last place of the smallest atom. Atoms whose multiples fit
// with headroom are accumulated in 128-bit integers, which makes the atom sum
// exact and independent of atom order. The few atoms too large for that are
// summed per point in a canonical order.

std::vector<double> evaluate_jump_field(const AtomSet& atoms, const CompensatorTable& comp, const GridSpec& grid) {
  require(grid.dim() == atoms.dim, ErrorKind::Argument, "grid dimension ", grid.dim(),
          " does not match the atom dimension ", atoms.dim);
  require(grid.max_norm() <= atoms.A, ErrorKind::Config, "grid leaves the ball of radius A = ", atoms.A,
          " (farthest corner at distance ", grid.max_norm(), ")");

  const std::size_t n = grid.size();
  const std::size_t total = atoms.size();
  const Vec B = comp.total();
  std::vector<double> out(n, 0.0);

  int e_min = INT_MAX;
  for (const auto& band : atoms.bands)
    for (const auto& a : band) {
      int e = 0;
      std::frexp(a.x, &e);
      e_min = std::min(e_min, e - 53);
    }
  const int headroom = static_cast<int>(std::bit_width(total + 1));
  const int limit = 126 - headroom;

  struct Exact {
    double rho;
    Vec s;
    Int128 k;
  };
  std::vector<Exact> exact;
  std::vector<HyperplaneAtom> large;
  exact.reserve(total);
  for (const auto& band : atoms.bands)
    for (const auto& a : band) {
      int e = 0;
      std::frexp(a.x, &e);
      if (e - e_min <= limit)
        exact.push_back({a.rho, a.s.coords(), static_cast<Int128>(std::ldexp(a.x, -e_min))});
      else
        large.push_back(a);
    }
  std::sort(large.begin(), large.end(), [](const HyperplaneAtom& a, const HyperplaneAtom& b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.rho != b.rho) return a.rho < b.rho;
    return a.s.coords() < b.s.coords();
  });

  const auto& c0 = grid.coords(0);
  const int n0 = grid.count(0);
  const double h0 = grid.spacing(0);
  std::vector<Int128> diff(n0 + 1);

  for (std::size_t row = 0; row < n; row += n0) {
    const Vec first = grid.point(row);
    Vec t = first;
    auto value_at = [&](const Vec& s, int i) {
      t[0] = c0[i];
      return dot(s, t);
    };

    std::fill(diff.begin(), diff.end(), Int128{0});
    Int128 row_const = 0;
    for (const auto& a : exact) {
      const double v_lo = value_at(a.s, 0);
      const double v_hi = value_at(a.s, n0 - 1);
      if (a.rho < std::min(v_lo, v_hi)) {
        row_const += a.k;
        continue;
      }
      if (a.rho >= std::max(v_lo, v_hi)) continue;
      // The indicator rho < <s,t> is monotone along the row: find where it flips.
      const bool rising = a.s[0] > 0.0;
      auto active = [&](int i) { return a.rho < value_at(a.s, i); };
      const double rest = a.s[1] * first[1] + a.s[2] * first[2];
      const double t_star = (a.rho - rest) / a.s[0];
      const double guess = std::ceil((t_star - c0[0]) / h0);
      int i = guess < 1.0 ? 1 : guess > n0 - 1 ? n0 - 1 : static_cast<int>(guess);
      // first index whose state differs from index 0 lies in [1, n0 - 1]
      const bool start = active(0);
      int steps = 0;
      while (i > 1 && active(i - 1) != start && steps < 4) --i, ++steps;
      while (i < n0 && active(i) == start && steps < 4) ++i, ++steps;
      if (steps >= 4 || i >= n0 || active(i) == start || active(i - 1) != start) {
        int lo = 1, hi = n0 - 1;
        while (lo < hi) {
          const int mid = lo + (hi - lo) / 2;
          if (active(mid) != start) hi = mid;
          else lo = mid + 1;
        }
        i = lo;
      }
      if (rising) {
        diff[i] += a.k;
      } else {
        diff[0] += a.k;
        diff[i] -= a.k;
      }
    }

    Int128 acc = row_const;
    for (int i = 0; i < n0; ++i) {
      acc += diff[i];
      t[0] = c0[i];
      double big = 0.0;
      for (const auto& a : large)
        if (a.rho < dot(a.s.coords(), t)) big += a.x;
      const double v = std::ldexp(static_cast<double>(acc), e_min) + big - dot(B, t);
      out[row + i] = v == 0.0 ? 0.0 : v;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

double truncation_error_std(const JumpMeasure& nu, double A, int J_trunc, const Vec& t) {
  require(norm(t) <= A, ErrorKind::Argument, "point lies outside the ball of radius A");
  if (nu.is_product()) {
    const auto& law = nu.product();
    const double dir = law.directional.positive_moment(t);
    if (dir == 0.0) return 0.0;
    return std::sqrt(dir * radial_tail_second_moment(law.radial, J_trunc));
  }
  double m = 0.0;
  for (const auto& a : nu.expanded_atoms())
    if (band_index(a.x) > J_trunc) m += a.weight * std::max(dot(a.s.coords(), t), 0.0) * a.x * a.x;
  return std::sqrt(m);
}

double field_scale_estimate(const JumpMeasure& nu, const Vec& t) {
  if (nu.is_product()) {
    const auto& law = nu.product();
    const double dir = law.directional.positive_moment(t);
    if (dir == 0.0) return 0.0;
    if (const auto* st = std::get_if<StableRadial>(&law.radial))
      return dir * 2.0 * st->scale * (1.0 / (2.0 - st->alpha) + 1.0 / st->alpha);
    double m = radial_band_mass(law.radial, 0);
    if (const auto* fin = std::get_if<FiniteRadial>(&law.radial)) {
      for (const auto& a : fin->half_atoms)
        if (a.x <= 1.0) m += 2.0 * a.weight * a.x * a.x;
      return dir * m;
    }
    return dir * (m + radial_tail_second_moment(law.radial, 0));
  }
  double m = 0.0;
  for (const auto& a : nu.expanded_atoms())
    m += a.weight * std::max(dot(a.s.coords(), t), 0.0) * std::min(a.x * a.x, 1.0);
  return m;
}

int suggest_truncation(const JumpMeasure& nu, double A, double rel, int j_cap) {
  const Vec t = scaled(Direction::axis(0).coords(), A);
  const double target = rel * std::sqrt(field_scale_estimate(nu, t));
  for (int J = 1; J <= j_cap; ++J)
    if (truncation_error_std(nu, A, J, t) <= target) return J;
  return j_cap;
}

// ---------------------------------------------------------------------------

namespace {

// \int (cos(theta x) - 1) radial(dx) per unit of directional mass (the sine and
// compensator parts vanish by symmetry).
double radial_cf_exponent(const RadialFamily& radial, double theta) {
  if (theta == 0.0) return 0.0;
  if (const auto* st = std::get_if<StableRadial>(&radial)) {
    const double a = st->alpha;
    if (a == 1.0) return -std::numbers::pi * st->scale * std::abs(theta);
    return 2.0 * st->scale * std::pow(std::abs(theta), a) * std::tgamma(-a) * std::cos(std::numbers::pi * a / 2.0);
  }
  if (const auto* fin = std::get_if<FiniteRadial>(&radial)) {
    double r = 0.0;
    for (const auto& at : fin->half_atoms) r += 2.0 * at.weight * (std::cos(theta * at.x) - 1.0);
    return r;
  }
  // Band table: log-uniform law inside each band, Simpson's rule in log2 |x|.
  const auto& tab = std::get<BandTableRadial>(radial);
  const int n_table = static_cast<int>(tab.bands.size());
  auto band_term = [&](int j) {
    const double mass = radial_band_mass(radial, j);
    if (mass == 0.0) return 0.0;
    const int m = 256;
    double s = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      s += w * (std::cos(theta * band_lower(j) * std::exp2(static_cast<double>(i) / m)) - 1.0);
    }
    return mass * s / (3.0 * m);
  };
  double r = 0.0;
  for (int j = 0; j <= n_table; ++j) r += band_term(j);
  if (tab.continuation == Continuation::Geometric) {
    for (int j = n_table + 1; j < n_table + 100000; ++j) {
      const double term = band_term(j);
      r += term;
      const double bound = radial_band_mass(radial, j) * theta * theta * std::ldexp(1.0, -2 * j + 1);
      if (bound <= 1e-16 * std::abs(r)) break;
    }
  }
  return r;
}

}  // namespace

std::complex<double> log_char_function(const JumpMeasure& nu, const Vec& t, double theta) {
  if (nu.is_product()) {
    const double dir = nu.product().directional.positive_moment(t);
    if (dir == 0.0) return {0.0, 0.0};
    return {dir * radial_cf_exponent(nu.product().radial, theta), 0.0};
  }
  std::complex<double> r{0.0, 0.0};
  for (const auto& a : nu.expanded_atoms()) {
    const double p = std::max(dot(a.s.coords(), t), 0.0);
    if (p == 0.0) continue;
    const double comp = std::abs(a.x) <= 1.0 ? theta * a.x : 0.0;
    r += a.weight * p * std::complex<double>(std::cos(theta * a.x) - 1.0, std::sin(theta * a.x) - comp);
  }
  return r;
}

std::vector<CfRow> cf_validate(const JumpMeasure& nu, const Vec& t, const std::vector<double>& thetas, int replicas,
                               int J_trunc, std::uint64_t seed) {
  require(replicas >= 100, ErrorKind::Argument, "cf validation needs at least 100 replicas (got ", replicas, ")");
  check_levy_integrability(nu);
  const double A = norm(t);
  const Vec B = compensator_table(nu, J_trunc).total();
  std::vector<std::complex<double>> acc(thetas.size());
  for (int r = 0; r < replicas; ++r) {
    double L = 0.0;
    if (A > 0.0) {
      // Only L(t) is needed, so atoms are tested as they are drawn.
      draw_atoms(
          nu, A, J_trunc, seed, StreamTag::CharFunction, static_cast<std::uint64_t>(r), SampleLimits{},
          [](int, std::size_t) {}, [&](const HyperplaneAtom& a) { return a.rho < dot(a.s.coords(), t); },
          [&](const HyperplaneAtom& a) { L += a.x; });
      L -= dot(B, t);
    }
    for (std::size_t k = 0; k < thetas.size(); ++k) acc[k] += std::polar(1.0, thetas[k] * L);
  }
  std::vector<CfRow> out;
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    CfRow row;
    row.theta = thetas[k];
    row.analytic = std::exp(log_char_function(nu, t, thetas[k]));
    row.empirical = acc[k] / static_cast<double>(replicas);
    row.stderr_ = 1.0 / std::sqrt(static_cast<double>(replicas));
    out.push_back(row);
  }
  return out;
}

}  // namespace levyfield
