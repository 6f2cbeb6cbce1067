#pragma once

#include <vector>

#include "field.hpp"
#include "jump.hpp"

namespace levyfield {

enum class PointFlag { Ok, Saturated, JumpLocus };

const char* flag_name(PointFlag flag);

// sup - inf of the field over grid points within 2^-k of point `flat`;
// the detrended variant first removes the least-squares affine fit.
double oscillation(const FieldSample& sample, std::size_t flat, int k, bool detrended = false);

struct HolderOptions {
  int k_min = 2;
  int k_max = 6;
  double h_max = 2.0;
  int stride = 1;  // estimate on every stride-th point along each axis
};

struct HolderMap {
  GridSpec grid;                     // points where exponents are estimated
  std::vector<std::size_t> source;  // their flat indices in the sample grid
  std::vector<double> exponent;
  std::vector<double> r2;
  std::vector<PointFlag> flag;
  std::vector<char> detrended;
  int k_min = 0;
  int k_max = 0;
};

// Regression of log2 oscillation on -k over k_min..k_max; slopes above 0.95
// are redone on detrended oscillations. Points where the field is affine at
// the finest scale are SATURATED and carry h_max.
HolderMap holder_map(const FieldSample& sample, const HolderOptions& opts);

struct SpectrumOptions {
  int bins = 16;
  double delta_h = 0.1;
  int k_min = 2;
  int k_max = 6;
};

// Large-deviation box counting. A box of side 2^-k with oscillation w has
// coarse exponent -log2(w)/k; bin i collects exponents in
// [h_i - delta_h/2, h_i + delta_h/2) with h_i = i delta_h (bin 0 also takes
// negative exponents). Boxes with vanishing oscillation are counted apart.
struct SpectrumEstimate {
  std::vector<double> h_center;
  std::vector<double> D;  // NaN when the bin is absent
  std::vector<double> r2;
  std::vector<char> absent;
  std::vector<int> scales;                   // k values
  std::vector<std::vector<long long>> counts;  // counts[bin][scale]
  std::vector<long long> saturated;           // per scale
  // The saturated boxes fitted like a bin (the artifact row of smooth fields).
  bool saturated_absent = true;
  double saturated_D = 0.0;
  double saturated_r2 = 0.0;
  std::vector<long long> total_boxes;         // per scale
  double delta_h = 0.1;
};

SpectrumEstimate spectrum_estimate(const FieldSample& sample, const SpectrumOptions& opts);

struct ApproxExponentMap {
  GridSpec grid;
  std::vector<double> a_hat;  // infinity when no band gives an exponent <= alpha_cap
  std::vector<PointFlag> flag;
  int j_lo = 1;
  int j_hi = 1;
  double alpha_cap = 4.0;
  std::vector<double> band_min;  // band_min[p * (j_hi - j_lo + 1) + (j - j_lo)]
};

// A_hat(t) = min over bands j in [j_floor, J_trunc] of min over band-j atoms
// of log|x| / log d(t, H_n). Per-atom exponents above alpha_cap are treated as
// infinite. Points within 1e-14 of any sampled hyperplane are JUMP_LOCUS.
ApproxExponentMap approx_exponent_map(const AtomSet& atoms, const GridSpec& grid, int j_floor,
                                      double alpha_cap = 4.0);

struct AgreementReport {
  std::vector<std::pair<double, double>> pairs;  // (holder exponent, reference)
  std::vector<std::size_t> points;               // grid index of each pair
  double median_abs_diff = 0.0;
  double fraction_within = 0.0;
  double tolerance = 0.2;
};

// Compares holder exponents with A_hat (or min(1/2, A_hat) when `combined`).
AgreementReport exponent_agreement(const HolderMap& holder, const ApproxExponentMap& approx, bool combined = false,
                                   double tolerance = 0.2);

// Summary statistics of the finite, non-flagged holder exponents.
struct ExponentSummary {
  std::size_t count = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

ExponentSummary summarize(const HolderMap& holder);
double quantile(std::vector<double> values, double q);

}  // namespace levyfield
