#pragma once

#include <cstdint>
#include <string>

#include "grid.hpp"
#include "measure.hpp"

namespace levyfield {

struct SimSettings {
  double A = 0.0;
  int J_trunc = 0;
  std::uint64_t seed = 0;
  int replicas = 1000;
  std::size_t cholesky_cap = 4096;
};

struct AnalysisSettings {
  int k_min = 2;
  int k_max = 6;
  double h_max = 2.0;
  double delta_h = 0.1;
  int bins = 21;
  int j_floor = 1;
  int stride = 1;
};

struct ExperimentConfig {
  CharTriple triple;
  GridSpec grid;
  SimSettings sim;
  AnalysisSettings analysis;
  std::string output_dir = "out";
};

// Plain-text format with [triple], [grid], [sim], [analysis] and [outputs]
// sections of `key = value` lines; '#' starts a comment line. Lists use ';'
// between entries and ':' between the parts of an entry, e.g.
//   gaussian.atoms = 1 0 : 0.5 ; 0 1 : 0.25
// [sim] must give A, J_trunc and seed. Missing [analysis] keys take defaults
// derived from the grid and J_trunc.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical text; parse_config(serialize_config(c)) serializes identically.
std::string serialize_config(const ExperimentConfig& config);
std::string serialize_triple(const CharTriple& triple);

// FNV-1a 64-bit hash (hex) of the canonical [triple] section.
std::string triple_fingerprint(const CharTriple& triple);

std::string format_double(double v);
std::string fnv1a_hex(const std::string& bytes);

}  // namespace levyfield
