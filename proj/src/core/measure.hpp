#pragma once

// Characteristic triples (a, mu, nu) of Levy fields and the deterministic
// quantities derived from them: band masses, the index beta, admissibility,
// power-gauge exponents, theoretical spectra and traces on subspaces.

#include <span>
#include <variant>
#include <vector>

#include "geometry.hpp"

namespace levyfield {

// ---------------------------------------------------------------------------
// Spherical measures

struct DirectionalAtom {
  Direction s;
  double weight = 0.0;
};

// Finite symmetric measure on S^{d-1}: a uniform component of total mass
// `isotropic_mass` plus atoms. Each stored atom (s, w) stands for the pair
// w*delta_s + w*delta_{-s}.
class SphericalMeasure {
 public:
  SphericalMeasure() = default;
  SphericalMeasure(int dim, double isotropic_mass, std::vector<DirectionalAtom> half_atoms);

  static SphericalMeasure zero(int dim) { return SphericalMeasure(dim, 0.0, {}); }

  int dim() const { return dim_; }
  double isotropic_mass() const { return isotropic_mass_; }
  const std::vector<DirectionalAtom>& half_atoms() const { return half_atoms_; }

  // mu(S^{d-1}) = isotropic_mass + 2 * sum of half-atom weights.
  double total_mass() const;
  bool is_zero() const { return total_mass() == 0.0; }

  // Both members of every symmetric pair.
  std::vector<DirectionalAtom> expanded() const;

  // \int |<s,u>| mu(ds)
  double abs_moment(const Vec& u) const;
  // \int max(<s,u>, 0) mu(ds); equals abs_moment(u)/2 by symmetry.
  double positive_moment(const Vec& u) const { return 0.5 * abs_moment(u); }

 private:
  int dim_ = 1;
  double isotropic_mass_ = 0.0;
  std::vector<DirectionalAtom> half_atoms_;
};

// E|<s,e>| for s uniform on S^{d-1} and a unit vector e.
double isotropic_abs_mean(int d);
// E||p_e(s)|| for s uniform on S^{d-1}, projected onto a d'-dimensional subspace.
double isotropic_projection_mean(int d, int d_prime);

// c_mu = (mu(S^{d-1})/2)^{1/2}
inline double c_mu(const SphericalMeasure& mu) { return std::sqrt(0.5 * mu.total_mass()); }

// ---------------------------------------------------------------------------
// Radial families (per unit of directional mass). Magnitude bands:
// band 0 is |x| > 1, band j >= 1 is |x| in (2^-j, 2^{-j+1}].

// Density c |x|^{-1-alpha} dx on R*.
struct StableRadial {
  double alpha = 1.0;
  double scale = 1.0;
};

struct RadialAtom {
  double x = 0.0;  // > 0; the atom stands for the pair at +x and -x
  double weight = 0.0;
};

struct FiniteRadial {
  std::vector<RadialAtom> half_atoms;
};

enum class Continuation { Zero, Geometric };

// Band masses given directly. `bands[j-1]` is the mass of band j. Beyond the
// table, masses are either zero or extrapolated by the tail model
// log2 nu_j = a + rate*j + power*log2(j) fitted on the last 8 bands.
struct BandTableRadial {
  double nu0 = 0.0;
  std::vector<double> bands;
  Continuation continuation = Continuation::Geometric;
};

using RadialFamily = std::variant<StableRadial, FiniteRadial, BandTableRadial>;

// Index of the magnitude band containing |x| (x != 0).
int band_index(double x);

// Lower and upper magnitude bound of band j (band 0: (1, inf)).
double band_lower(int j);
double band_upper(int j);

struct BandTail {
  double log2_scale = 0.0;  // a
  double rate = 0.0;        // exponential rate in base 2
  double power = 0.0;       // polynomial correction exponent
};

BandTail fit_band_tail(const BandTableRadial& table);

// Mass of band j for one unit of directional mass (both signs of x).
double radial_band_mass(const RadialFamily& radial, int j);

// ---------------------------------------------------------------------------
// Jump measures

struct ProductLaw {
  SphericalMeasure directional;
  RadialFamily radial = FiniteRadial{};
};

struct JointAtom {
  Direction s;
  double x = 0.0;
  double weight = 0.0;
};

// Explicit symmetric list; each stored atom (s, x, w) stands for itself and
// its mirror (-s, -x, w). Stored atoms are normalized to x > 0.
struct AtomListLaw {
  std::vector<JointAtom> half_atoms;
};

class JumpMeasure {
 public:
  JumpMeasure() : JumpMeasure(zero(1)) {}
  JumpMeasure(int dim, ProductLaw law);
  JumpMeasure(int dim, AtomListLaw law);

  static JumpMeasure zero(int dim) { return JumpMeasure(dim, ProductLaw{SphericalMeasure::zero(dim), FiniteRadial{}}); }

  int dim() const { return dim_; }
  bool is_product() const { return std::holds_alternative<ProductLaw>(law_); }
  const ProductLaw& product() const { return std::get<ProductLaw>(law_); }
  const AtomListLaw& atom_list() const { return std::get<AtomListLaw>(law_); }

  bool is_zero() const;
  // Expanded atom list (both members of each pair); atom-list coupling only.
  std::vector<JointAtom> expanded_atoms() const;

 private:
  int dim_ = 1;
  std::variant<ProductLaw, AtomListLaw> law_;
};

// ---------------------------------------------------------------------------
// Characteristic triple

struct CharTriple {
  int dim = 1;
  Vec drift{};
  SphericalMeasure gaussian;
  JumpMeasure jump;

  static CharTriple zero(int dim) {
    return CharTriple{dim, Vec{}, SphericalMeasure::zero(dim), JumpMeasure::zero(dim)};
  }

  // Throws ErrorKind::Config when dimensions disagree.
  void validate() const;
};

// Asymptotic band-mass law nu_j ~ C 2^{rate j} j^{power}; `finite` when only
// finitely many bands carry mass.
struct TailLaw {
  bool finite = true;
  double rate = 0.0;
  double power = 0.0;
};

TailLaw tail_law(const JumpMeasure& nu);

// Throws ErrorKind::Config when \int (1 ^ x^2) nu = inf.
void check_levy_integrability(const JumpMeasure& nu);

// nu(S^{d-1} x band j), band 0 meaning |x| > 1.
double band_mass(const JumpMeasure& nu, int j);

// Blumenthal-Getoor type index in [0, 2].
double index_beta(const JumpMeasure& nu);

struct ChiResult {
  double partial_sum = 0.0;
  bool converged = true;
};

// sum_{j=1}^{j_max} 2^-j (j nu_j)^{1/2} with a verdict on the full series.
ChiResult admissibility_chi(const JumpMeasure& nu, int j_max);

// g(r) = r^s (log 1/r)^b near zero.
struct PowerGauge {
  double exponent = 1.0;
  double log_correction = 0.0;
};

// h_nu(g); infinity when nu has index zero.
double gauge_exponent(const JumpMeasure& nu, const PowerGauge& g);

// Singularity spectrum of the canonical field with this triple; kNegInf
// outside the support. Requires index_beta(triple.jump) > 0.
double theoretical_spectrum(const CharTriple& triple, double h);

// Characteristic triple of t' -> Y(t'_1 e_1 + ... + t'_{d'} e_{d'}).
CharTriple trace_triple(const CharTriple& triple, std::span<const Vec> basis);

}  // namespace levyfield
