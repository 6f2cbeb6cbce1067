#pragma once

#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "field.hpp"
#include "jump.hpp"

namespace levyfield {

enum class Which { Gaussian, Jump, Combined };

Which parse_which(const std::string& name);

struct Simulation {
  FieldSample sample;
  std::optional<AtomSet> atoms;  // present when the jump part was simulated
};

// Y(t) = <a,t> + B(t) + L(t) with independent substreams for B and L.
Simulation simulate(const ExperimentConfig& config, Which which);

std::string jump_fingerprint(const JumpMeasure& nu);

// Each run writes its artifacts to out_dir and returns the written paths.
std::vector<std::string> run_simulate(const ExperimentConfig& config, Which which, const std::string& out_dir);
std::vector<std::string> run_analyze(const ExperimentConfig& config, const std::string& sample_csv,
                                     const std::string& atoms_csv, const std::string& out_dir);
std::vector<std::string> run_trace(const ExperimentConfig& config, const std::vector<Vec>& basis,
                                   const std::string& out_dir);
std::vector<std::string> run_validate_cf(const ExperimentConfig& config, const Vec& t, const std::vector<double>& thetas,
                                         const std::string& out_dir);
std::vector<std::string> run_report(const ExperimentConfig& config, const std::string& out_dir);

}  // namespace levyfield
