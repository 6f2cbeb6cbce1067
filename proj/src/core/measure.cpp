#include "measure.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace levyfield {

namespace {

void check_weight(double w, const char* what) {
  require(std::isfinite(w) && w > 0.0, ErrorKind::Config, what, " weight must be positive and finite (got ", w, ")");
}

void check_direction_dim(const Direction& s, int dim) {
  for (int i = dim; i < kMaxDim; ++i)
    require(s[i] == 0.0, ErrorKind::Config, "direction has a nonzero component beyond dimension ", dim);
  require(std::abs(norm(s.coords()) - 1.0) <= 1e-12, ErrorKind::Config, "direction is not a unit vector");
}

void validate_radial(const RadialFamily& radial) {
  if (const auto* st = std::get_if<StableRadial>(&radial)) {
    require(st->alpha > 0.0 && st->alpha < 2.0, ErrorKind::Config, "stable alpha must lie in (0,2) (got ", st->alpha, ")");
    require(std::isfinite(st->scale) && st->scale > 0.0, ErrorKind::Config, "stable scale must be positive (got ",
            st->scale, ")");
  } else if (const auto* fin = std::get_if<FiniteRadial>(&radial)) {
    for (const auto& a : fin->half_atoms) {
      require(std::isfinite(a.x) && a.x > 0.0, ErrorKind::Config, "radial atom position must be nonzero and finite");
      check_weight(a.weight, "radial atom");
    }
  } else {
    const auto& tab = std::get<BandTableRadial>(radial);
    require(std::isfinite(tab.nu0) && tab.nu0 >= 0.0, ErrorKind::Config, "band table nu0 must be finite and >= 0");
    for (std::size_t i = 0; i < tab.bands.size(); ++i)
      require(std::isfinite(tab.bands[i]) && tab.bands[i] >= 0.0, ErrorKind::Config, "band table entry ", i + 1,
              " must be finite and >= 0 (got ", tab.bands[i], ")");
  }
}

FiniteRadial normalize_radial_atoms(FiniteRadial fin) {
  for (auto& a : fin.half_atoms) a.x = std::abs(a.x);
  return fin;
}

// Stable radial mass of band j for scale c: both signs of x.
double stable_band_mass(const StableRadial& st, int j) {
  const double head = 2.0 * st.scale / st.alpha;
  if (j == 0) return head;
  return head * (std::exp2(j * st.alpha) - std::exp2((j - 1) * st.alpha));
}

}  // namespace

// ---------------------------------------------------------------------------

SphericalMeasure::SphericalMeasure(int dim, double isotropic_mass, std::vector<DirectionalAtom> half_atoms)
    : dim_(dim), isotropic_mass_(isotropic_mass), half_atoms_(std::move(half_atoms)) {
  check_dim(dim);
  require(std::isfinite(isotropic_mass) && isotropic_mass >= 0.0, ErrorKind::Config,
          "isotropic mass must be finite and >= 0 (got ", isotropic_mass, ")");
  for (const auto& a : half_atoms_) {
    check_direction_dim(a.s, dim);
    check_weight(a.weight, "spherical atom");
  }
}

double SphericalMeasure::total_mass() const {
  double m = isotropic_mass_;
  for (const auto& a : half_atoms_) m += 2.0 * a.weight;
  return m;
}

std::vector<DirectionalAtom> SphericalMeasure::expanded() const {
  std::vector<DirectionalAtom> out;
  out.reserve(2 * half_atoms_.size());
  for (const auto& a : half_atoms_) {
    out.push_back(a);
    out.push_back({-a.s, a.weight});
  }
  return out;
}

double SphericalMeasure::abs_moment(const Vec& u) const {
  double m = isotropic_mass_ == 0.0 ? 0.0 : isotropic_mass_ * isotropic_abs_mean(dim_) * norm(u);
  for (const auto& a : half_atoms_) m += 2.0 * a.weight * std::abs(dot(a.s.coords(), u));
  return m;
}

double isotropic_abs_mean(int d) {
  switch (d) {
    case 1: return 1.0;
    case 2: return 2.0 / std::numbers::pi;
    case 3: return 0.5;
  }
  fail(ErrorKind::Argument, "unsupported dimension ", d);
}

double isotropic_projection_mean(int d, int d_prime) {
  require(d_prime >= 1 && d_prime <= d && d <= kMaxDim, ErrorKind::Argument, "invalid projection ", d, " -> ",
          d_prime);
  if (d == d_prime) return 1.0;
  if (d_prime == 1) return isotropic_abs_mean(d);
  return std::numbers::pi / 4.0;  // d = 3, d' = 2: E sqrt(1 - z^2), z uniform on [-1,1]
}

// ---------------------------------------------------------------------------

int band_index(double x) {
  const double a = std::abs(x);
  require(a > 0.0 && std::isfinite(a), ErrorKind::Argument, "jump magnitude must be nonzero and finite");
  if (a > 1.0) return 0;
  int e = 0;
  const double m = std::frexp(a, &e);
  return m == 0.5 ? 2 - e : 1 - e;
}

double band_lower(int j) { return j == 0 ? 1.0 : std::ldexp(1.0, -j); }

double band_upper(int j) { return j == 0 ? kInf : std::ldexp(1.0, -j + 1); }

BandTail fit_band_tail(const BandTableRadial& table) {
  const int n_table = static_cast<int>(table.bands.size());
  const int n = std::min(8, n_table);
  require(n >= 2, ErrorKind::Config, "geometric continuation needs at least two tabulated bands");
  const int first = n_table - n + 1;
  for (int j = first; j <= n_table; ++j)
    require(table.bands[j - 1] > 0.0, ErrorKind::Config, "geometric continuation needs positive masses in the last ",
            n, " bands (band ", j, " is zero)");

  const int cols = n >= 3 ? 3 : 2;
  Eigen::MatrixXd X(n, cols);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const int j = first + i;
    X(i, 0) = 1.0;
    X(i, 1) = j;
    if (cols == 3) X(i, 2) = std::log2(static_cast<double>(j));
    y(i) = std::log2(table.bands[j - 1]);
  }
  const Eigen::VectorXd c = X.colPivHouseholderQr().solve(y);
  BandTail tail{c(0), c(1), cols == 3 ? c(2) : 0.0};
  // Pure geometric tables are recovered exactly up to rounding; drop the
  // negligible power term they leave behind.
  if (std::abs(tail.power) < 1e-7) {
    Eigen::MatrixXd X2 = X.leftCols(2);
    const Eigen::VectorXd c2 = X2.colPivHouseholderQr().solve(y);
    if ((X2 * c2 - y).cwiseAbs().maxCoeff() < 1e-9) tail = {c2(0), c2(1), 0.0};
  }
  return tail;
}

double radial_band_mass(const RadialFamily& radial, int j) {
  require(j >= 0, ErrorKind::Argument, "band index must be >= 0 (got ", j, ")");
  if (const auto* st = std::get_if<StableRadial>(&radial)) return stable_band_mass(*st, j);
  if (const auto* fin = std::get_if<FiniteRadial>(&radial)) {
    double m = 0.0;
    for (const auto& a : fin->half_atoms)
      if (band_index(a.x) == j) m += 2.0 * a.weight;
    return m;
  }
  const auto& tab = std::get<BandTableRadial>(radial);
  if (j == 0) return tab.nu0;
  if (j <= static_cast<int>(tab.bands.size())) return tab.bands[j - 1];
  if (tab.continuation == Continuation::Zero) return 0.0;
  const BandTail tail = fit_band_tail(tab);
  return std::exp2(tail.log2_scale + tail.rate * j + tail.power * std::log2(static_cast<double>(j)));
}

// ---------------------------------------------------------------------------

JumpMeasure::JumpMeasure(int dim, ProductLaw law) : dim_(dim) {
  check_dim(dim);
  require(law.directional.dim() == dim, ErrorKind::Config, "directional measure has dimension ",
          law.directional.dim(), ", expected ", dim);
  validate_radial(law.radial);
  if (auto* fin = std::get_if<FiniteRadial>(&law.radial)) law.radial = normalize_radial_atoms(*fin);
  law_ = std::move(law);
}

JumpMeasure::JumpMeasure(int dim, AtomListLaw law) : dim_(dim) {
  check_dim(dim);
  for (auto& a : law.half_atoms) {
    check_direction_dim(a.s, dim);
    require(std::isfinite(a.x) && a.x != 0.0, ErrorKind::Config, "jump atom magnitude must be nonzero and finite");
    check_weight(a.weight, "jump atom");
    if (a.x < 0.0) {
      a.s = -a.s;
      a.x = -a.x;
    }
  }
  law_ = std::move(law);
}

bool JumpMeasure::is_zero() const {
  if (!is_product()) return atom_list().half_atoms.empty();
  const auto& p = product();
  if (p.directional.is_zero()) return true;
  if (const auto* fin = std::get_if<FiniteRadial>(&p.radial)) return fin->half_atoms.empty();
  if (const auto* tab = std::get_if<BandTableRadial>(&p.radial)) {
    if (tab->nu0 > 0.0) return false;
    for (double v : tab->bands)
      if (v > 0.0) return false;
    return tab->continuation == Continuation::Zero || tab->bands.empty();
  }
  return false;
}

std::vector<JointAtom> JumpMeasure::expanded_atoms() const {
  std::vector<JointAtom> out;
  for (const auto& a : atom_list().half_atoms) {
    out.push_back(a);
    out.push_back({-a.s, -a.x, a.weight});
  }
  return out;
}

void CharTriple::validate() const {
  check_dim(dim);
  require(gaussian.dim() == dim, ErrorKind::Config, "gaussian measure has dimension ", gaussian.dim(),
          ", expected ", dim);
  require(jump.dim() == dim, ErrorKind::Config, "jump measure has dimension ", jump.dim(), ", expected ", dim);
  for (int i = 0; i < kMaxDim; ++i) {
    require(std::isfinite(drift[i]), ErrorKind::Config, "drift must be finite");
    if (i >= dim) require(drift[i] == 0.0, ErrorKind::Config, "drift has a component beyond dimension ", dim);
  }
}

// ---------------------------------------------------------------------------

TailLaw tail_law(const JumpMeasure& nu) {
  if (!nu.is_product() || nu.is_zero()) return {};
  const auto& radial = nu.product().radial;
  if (const auto* st = std::get_if<StableRadial>(&radial)) return {false, st->alpha, 0.0};
  if (std::holds_alternative<FiniteRadial>(radial)) return {};
  const auto& tab = std::get<BandTableRadial>(radial);
  if (tab.continuation == Continuation::Zero) return {};
  const BandTail tail = fit_band_tail(tab);
  return {false, tail.rate, tail.power};
}

namespace {
// Snap a fitted rate onto 2 when it agrees to fitting accuracy.
double snapped_rate(double rate) { return std::abs(rate - 2.0) < 1e-9 ? 2.0 : rate; }
}  // namespace

void check_levy_integrability(const JumpMeasure& nu) {
  if (nu.is_product()) validate_radial(nu.product().radial);
  const double nu0 = band_mass(nu, 0);
  require(std::isfinite(nu0), ErrorKind::Config, "nu(|x| > 1) is infinite");
  const TailLaw tail = tail_law(nu);
  if (tail.finite) return;
  const double rate = snapped_rate(tail.rate);
  require(rate < 2.0 || (rate == 2.0 && tail.power < -1.0), ErrorKind::Config,
          "sum_j 2^{-2j} nu_j diverges: band masses grow like 2^{", tail.rate, " j} j^{", tail.power, "}");
}

double band_mass(const JumpMeasure& nu, int j) {
  require(j >= 0, ErrorKind::Argument, "band index must be >= 0 (got ", j, ")");
  if (nu.is_product()) {
    const auto& p = nu.product();
    const double dir = p.directional.total_mass();
    if (dir == 0.0) return 0.0;
    return dir * radial_band_mass(p.radial, j);
  }
  double m = 0.0;
  for (const auto& a : nu.atom_list().half_atoms)
    if (band_index(a.x) == j) m += 2.0 * a.weight;
  return m;
}

double index_beta(const JumpMeasure& nu) {
  check_levy_integrability(nu);
  const TailLaw tail = tail_law(nu);
  if (tail.finite) return 0.0;
  return std::clamp(snapped_rate(tail.rate), 0.0, 2.0);
}

ChiResult admissibility_chi(const JumpMeasure& nu, int j_max) {
  require(j_max >= 1, ErrorKind::Argument, "j_max must be >= 1 (got ", j_max, ")");
  ChiResult r;
  for (int j = 1; j <= j_max; ++j) r.partial_sum += std::ldexp(std::sqrt(j * band_mass(nu, j)), -j);
  const TailLaw tail = tail_law(nu);
  if (tail.finite) return r;
  const double rate = snapped_rate(tail.rate);
  // Terms behave like 2^{(rate/2 - 1) j} j^{(power + 1)/2}.
  r.converged = rate < 2.0 || (rate == 2.0 && tail.power < -3.0);
  return r;
}

double gauge_exponent(const JumpMeasure& nu, const PowerGauge& g) {
  require(g.exponent > 0.0 && g.exponent <= 1.0, ErrorKind::Argument, "gauge exponent s must lie in (0,1] (got ",
          g.exponent, ")");
  require(std::isfinite(g.log_correction), ErrorKind::Argument, "gauge log correction must be finite");
  const double beta = index_beta(nu);
  if (beta == 0.0) return kInf;
  if (g.log_correction == 0.0) {
    // s / beta, nudged by at most one ulp when the rounded quotient does not
    // multiply back to s exactly.
    const double q = g.exponent / beta;
    for (double c : {q, std::nextafter(q, 0.0), std::nextafter(q, kInf)})
      if (c * beta == g.exponent) return c;
    return q;
  }

  // Band sum of g(x^{1/h}) behaves like sum_j 2^{(rate - s/h) j} j^{power + b}.
  const TailLaw tail = tail_law(nu);
  const double rate = std::min(snapped_rate(tail.rate), 2.0);
  auto diverges = [&](double h) {
    const double e = rate - g.exponent / h;
    return e > 0.0 || (e == 0.0 && tail.power + g.log_correction >= -1.0);
  };
  double lo = 0.0;
  double hi = 1.0;
  while (!diverges(hi)) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (diverges(mid) ? hi : lo) = mid;
  }
  return hi;
}

double theoretical_spectrum(const CharTriple& triple, double h) {
  require(h >= 0.0, ErrorKind::Argument, "h must be >= 0 (got ", h, ")");
  const double beta = index_beta(triple.jump);
  require(beta > 0.0, ErrorKind::Argument,
          "index of the jump measure is zero: the field is compound-Poisson plus Gaussian; its exponent is 0 on the "
          "jump hyperplanes and that of the remaining components elsewhere");
  const double d = triple.dim;
  if (!triple.gaussian.is_zero()) {
    if (h < 0.5) return d - 1.0 + beta * h;
    return h == 0.5 ? d : kNegInf;
  }
  return h <= 1.0 / beta ? d - 1.0 + beta * h : kNegInf;
}

// ---------------------------------------------------------------------------

namespace {

struct Projector {
  std::vector<Vec> basis;
  int d_prime;

  Vec apply(const Vec& v) const {
    Vec p{};
    for (int i = 0; i < d_prime; ++i) p[i] = dot(v, basis[i]);
    return p;
  }
};

constexpr double kTraceCutoff = 1e-12;

// Length of a projected unit direction; rounding noise around 1 is dropped so
// that directions inside the subspace keep their weight exactly.
double projected_length(const Vec& p) {
  const double n = norm(p);
  return std::abs(n - 1.0) <= 4e-16 ? 1.0 : n;
}

SphericalMeasure trace_spherical(const SphericalMeasure& mu, const Projector& P) {
  const double iso = mu.isotropic_mass() * isotropic_projection_mean(mu.dim(), P.d_prime);
  std::vector<DirectionalAtom> atoms;
  for (const auto& a : mu.half_atoms()) {
    const Vec p = P.apply(a.s.coords());
    const double n = projected_length(p);
    if (n < kTraceCutoff || a.weight * n < kTraceCutoff) continue;
    atoms.push_back({Direction::normalized(p, P.d_prime), a.weight * n});
  }
  return SphericalMeasure(P.d_prime, iso < kTraceCutoff ? 0.0 : iso, std::move(atoms));
}

}  // namespace

CharTriple trace_triple(const CharTriple& triple, std::span<const Vec> basis) {
  triple.validate();
  const int d = triple.dim;
  const int d_prime = static_cast<int>(basis.size());
  require(d_prime >= 1 && d_prime <= d, ErrorKind::Argument, "trace basis must have between 1 and ", d,
          " vectors (got ", d_prime, ")");
  for (int i = 0; i < d_prime; ++i) {
    for (int c = d; c < kMaxDim; ++c)
      require(basis[i][c] == 0.0, ErrorKind::Argument, "basis vector ", i + 1, " has a component beyond dimension ",
              d);
    for (int k = 0; k <= i; ++k) {
      const double expected = i == k ? 1.0 : 0.0;
      require(std::abs(dot(basis[i], basis[k]) - expected) <= 1e-10, ErrorKind::Argument,
              "trace basis is not orthonormal (vectors ", k + 1, " and ", i + 1, ")");
    }
  }
  Projector P{{basis.begin(), basis.end()}, d_prime};

  CharTriple out;
  out.dim = d_prime;
  out.drift = P.apply(triple.drift);
  out.gaussian = trace_spherical(triple.gaussian, P);
  if (triple.jump.is_product()) {
    const auto& law = triple.jump.product();
    out.jump = JumpMeasure(d_prime, ProductLaw{trace_spherical(law.directional, P), law.radial});
  } else {
    AtomListLaw list;
    for (const auto& a : triple.jump.atom_list().half_atoms) {
      const Vec p = P.apply(a.s.coords());
      const double n = projected_length(p);
      if (n < kTraceCutoff || a.weight * n < kTraceCutoff) continue;
      list.half_atoms.push_back({Direction::normalized(p, d_prime), a.x, a.weight * n});
    }
    out.jump = JumpMeasure(d_prime, std::move(list));
  }
  return out;
}

}  // namespace levyfield
