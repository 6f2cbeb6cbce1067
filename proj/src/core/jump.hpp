#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "grid.hpp"
#include "measure.hpp"

namespace levyfield {

// Jump of size x across the hyperplane {t : <s,t> = rho}.
struct HyperplaneAtom {
  double rho = 0.0;
  Direction s;
  double x = 0.0;
  int band = 0;
};

struct AtomSet {
  int dim = 1;
  double A = 1.0;
  int J_trunc = 1;
  std::uint64_t seed = 0;
  std::string fingerprint;
  std::vector<std::vector<HyperplaneAtom>> bands;  // bands[j], j = 0..J_trunc, sorted by rho

  std::size_t size() const;
};

struct SampleLimits {
  std::size_t max_atoms = 50'000'000;
};

// Poisson hyperplane atoms with rho in (0, A) and bands 0..J_trunc. Band j
// draws from its own substream, so raising J_trunc leaves lower bands intact.
AtomSet sample_atoms(const JumpMeasure& nu, double A, int J_trunc, std::uint64_t seed, const SampleLimits& limits = {});

// b[j] = \int_{|x| in I_j} x max(<s,.>, 0) nu: the mean of the band-j jump
// sum at t is <b[j], t>. b[0] is always zero (band 0 is not compensated).
struct CompensatorTable {
  std::vector<Vec> b;
  Vec total() const;
};

CompensatorTable compensator_table(const JumpMeasure& nu, int J_trunc);

// Sum over atoms of x 1{rho < <s,t>} minus <total compensator, t>, on every
// grid point. The atom sum is exact (order independent); the grid must lie in
// the closed ball of radius A.
std::vector<double> evaluate_jump_field(const AtomSet& atoms, const CompensatorTable& comp, const GridSpec& grid);

// Standard deviation of the contribution of bands j > J_trunc at t.
double truncation_error_std(const JumpMeasure& nu, double A, int J_trunc, const Vec& t);

// \int max(<s,t>,0) min(x^2, 1) nu: a scale for the size of the field at t.
double field_scale_estimate(const JumpMeasure& nu, const Vec& t);

// Smallest J with truncation_error_std <= rel * field_scale_estimate at A e_1.
int suggest_truncation(const JumpMeasure& nu, double A, double rel = 1e-3, int j_cap = 60);

struct CfRow {
  double theta = 0.0;
  std::complex<double> analytic;
  std::complex<double> empirical;
  double stderr_ = 0.0;
};

// log E exp(i theta L(t)) = \int max(<s,t>,0) (e^{i theta x} - 1 - i theta x 1{|x|<=1}) nu(ds,dx)
std::complex<double> log_char_function(const JumpMeasure& nu, const Vec& t, double theta);

// Empirical characteristic function of the truncated field at t over
// independent replicas (fresh atoms per replica), against the analytic one.
std::vector<CfRow> cf_validate(const JumpMeasure& nu, const Vec& t, const std::vector<double>& thetas, int replicas,
                               int J_trunc, std::uint64_t seed);

}  // namespace levyfield
