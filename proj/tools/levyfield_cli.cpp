// Command-line front end over the levyfield C API.
//
//   levyfield simulate    --config C [--out DIR] [--which gaussian|jump|combined] [--seed N]
//   levyfield analyze     --config C --sample S.csv [--atoms atoms.csv] [--out DIR]
//   levyfield trace       --config C --basis "e11,e12;e21,e22" [--out DIR]
//   levyfield validate-cf --config C [--point "1,0"] [--theta-min -5 --theta-max 5 --theta-count 41]
//   levyfield report      --config C [--out DIR]
//
// Exit codes: 0 success, 2 configuration or argument error, 3 numeric
// failure, 4 fingerprint mismatch, 1 anything else. Failures print a JSON
// object {"error": {"kind", "message"}} on stdout.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "levyfield/levyfield.h"

namespace {

struct CliError {
  lf_status status;
  std::string message;
};

const char* kind_name(lf_status s) {
  switch (s) {
    case LF_ERR_CONFIG: return "config";
    case LF_ERR_ARGUMENT: return "argument";
    case LF_ERR_NUMERIC: return "numeric";
    case LF_ERR_FINGERPRINT: return "fingerprint";
    case LF_ERR_IO: return "io";
    default: return "internal";
  }
}

int exit_code(lf_status s) {
  switch (s) {
    case LF_OK: return 0;
    case LF_ERR_CONFIG:
    case LF_ERR_ARGUMENT: return 2;
    case LF_ERR_NUMERIC: return 3;
    case LF_ERR_FINGERPRINT: return 4;
    default: return 1;
  }
}

void check(lf_status s) {
  if (s != LF_OK) throw CliError{s, lf_last_error_message()};
}

std::vector<double> parse_list(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, sep)) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || !end || *end != '\0') throw CliError{LF_ERR_ARGUMENT, "bad number '" + cell + "'"};
    out.push_back(v);
  }
  return out;
}

using ConfigPtr = std::unique_ptr<lf_config, decltype(&lf_config_free)>;

struct Options {
  std::string config;
  std::string out;
  std::string which = "combined";
  std::optional<std::uint64_t> seed;
  std::string sample;
  std::string atoms;
  std::string basis;
  std::string point;
  double theta_min = -5.0;
  double theta_max = 5.0;
  int theta_count = 41;
};

ConfigPtr load(const Options& o) {
  lf_config* raw = nullptr;
  check(lf_config_load(o.config.c_str(), &raw));
  ConfigPtr cfg(raw, &lf_config_free);
  if (o.seed) check(lf_config_set_seed(cfg.get(), *o.seed));
  return cfg;
}

std::string output_dir(const Options& o, const lf_config* cfg) {
  if (!o.out.empty()) return o.out;
  char* dir = nullptr;
  check(lf_config_output_dir(cfg, &dir));
  std::string s = dir;
  lf_string_free(dir);
  return s;
}

int dimension(const lf_config* cfg) {
  int d = 0;
  check(lf_config_dim(cfg, &d));
  return d;
}

void print_ok(const std::string& command, const std::string& dir) {
  nlohmann::json j = {{"status", "ok"}, {"command", command}, {"out", dir}};
  std::cout << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and regularity analysis of multivariate Levy fields"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Experiment configuration file")->required();
    sub->add_option("--out", o.out, "Output directory (default: [outputs] directory)");
    sub->add_option("--seed", o.seed, "Override the configured seed");
  };
  auto* simulate = app.add_subcommand("simulate", "Sample a field on the configured grid");
  common(simulate);
  simulate->add_option("--which", o.which, "gaussian, jump or combined")
      ->check(CLI::IsMember({"gaussian", "jump", "combined"}));
  auto* analyze = app.add_subcommand("analyze", "Estimate exponents and spectra of a sample");
  common(analyze);
  analyze->add_option("--sample", o.sample, "Sample CSV written by simulate")->required();
  analyze->add_option("--atoms", o.atoms, "Atom CSV written by simulate");
  auto* trace = app.add_subcommand("trace", "Characteristic triple of the field restricted to a subspace");
  common(trace);
  trace->add_option("--basis", o.basis, "Orthonormal basis, e.g. \"1,0;0,1\"")->required();
  auto* cf = app.add_subcommand("validate-cf", "Compare empirical and analytic characteristic functions");
  common(cf);
  cf->add_option("--point", o.point, "Point t, comma separated (default e_1)");
  cf->add_option("--theta-min", o.theta_min);
  cf->add_option("--theta-max", o.theta_max);
  cf->add_option("--theta-count", o.theta_count)->check(CLI::PositiveNumber);
  auto* report = app.add_subcommand("report", "Deterministic quantities of the triple");
  common(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    nlohmann::json j = {{"error", {{"kind", "argument"}, {"message", e.what()}}}};
    std::cout << j.dump() << "\n";
    return 2;
  }

  try {
    ConfigPtr cfg = load(o);
    const std::string dir = output_dir(o, cfg.get());
    std::string command;
    if (*simulate) {
      command = "simulate";
      const lf_component which = o.which == "gaussian" ? LF_COMPONENT_GAUSSIAN
                                 : o.which == "jump"   ? LF_COMPONENT_JUMP
                                                       : LF_COMPONENT_COMBINED;
      check(lf_run_simulate(cfg.get(), which, dir.c_str()));
    } else if (*analyze) {
      command = "analyze";
      check(lf_run_analyze(cfg.get(), o.sample.c_str(), o.atoms.empty() ? nullptr : o.atoms.c_str(), dir.c_str()));
    } else if (*trace) {
      command = "trace";
      const int d = dimension(cfg.get());
      std::vector<double> flat;
      int rows = 0;
      std::stringstream ss(o.basis);
      std::string row;
      while (std::getline(ss, row, ';')) {
        const auto v = parse_list(row, ',');
        if (static_cast<int>(v.size()) != d)
          throw CliError{LF_ERR_ARGUMENT, "each basis vector needs " + std::to_string(d) + " components"};
        flat.insert(flat.end(), v.begin(), v.end());
        ++rows;
      }
      check(lf_run_trace(cfg.get(), flat.data(), rows, dir.c_str()));
    } else if (*cf) {
      command = "validate-cf";
      const int d = dimension(cfg.get());
      std::vector<double> t(d, 0.0);
      t[0] = 1.0;
      if (!o.point.empty()) {
        t = parse_list(o.point, ',');
        if (static_cast<int>(t.size()) != d)
          throw CliError{LF_ERR_ARGUMENT, "--point needs " + std::to_string(d) + " components"};
      }
      std::vector<double> thetas;
      for (int i = 0; i < o.theta_count; ++i)
        thetas.push_back(o.theta_count == 1 ? o.theta_min
                                            : o.theta_min + (o.theta_max - o.theta_min) * i / (o.theta_count - 1));
      check(lf_run_validate_cf(cfg.get(), t.data(), thetas.data(), thetas.size(), dir.c_str()));
    } else {
      command = "report";
      check(lf_run_report(cfg.get(), dir.c_str()));
    }
    print_ok(command, dir);
    return 0;
  } catch (const CliError& e) {
    nlohmann::json j = {{"error", {{"kind", kind_name(e.status)}, {"message", e.message}}}};
    std::cout << j.dump() << "\n";
    return exit_code(e.status);
  }
}
