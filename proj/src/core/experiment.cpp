#include "experiment.hpp"

#include <filesystem>
#include <json.hpp>

#include "analysis.hpp"
#include "gaussian.hpp"
#include "io.hpp"

namespace levyfield {

using nlohmann::json;

namespace {

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

json number_or_string(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

}  // namespace

Which parse_which(const std::string& name) {
  if (name == "gaussian") return Which::Gaussian;
  if (name == "jump") return Which::Jump;
  if (name == "combined") return Which::Combined;
  fail(ErrorKind::Argument, "--which must be gaussian, jump or combined (got '", name, "')");
}

std::string jump_fingerprint(const JumpMeasure& nu) {
  CharTriple t = CharTriple::zero(nu.dim());
  t.jump = nu;
  return fnv1a_hex(serialize_triple(t));
}

Simulation simulate(const ExperimentConfig& config, Which which) {
  const CharTriple& triple = config.triple;
  const GridSpec& grid = config.grid;
  Simulation sim;
  sim.sample.grid = grid;
  sim.sample.seed = config.sim.seed;
  sim.sample.triple_fingerprint = triple_fingerprint(triple);
  const std::size_t n = grid.size();

  std::vector<double> gauss(n, 0.0), jump(n, 0.0);
  if (which != Which::Jump && !triple.gaussian.is_zero())
    gauss = sample_gaussian(triple.gaussian, grid, config.sim.seed, {config.sim.cholesky_cap});
  if (which != Which::Gaussian) {
    AtomSet atoms = sample_atoms(triple.jump, config.sim.A, config.sim.J_trunc, config.sim.seed);
    atoms.fingerprint = jump_fingerprint(triple.jump);
    jump = evaluate_jump_field(atoms, compensator_table(triple.jump, config.sim.J_trunc), grid);
    sim.atoms = std::move(atoms);
  }

  switch (which) {
    case Which::Gaussian:
      sim.sample.tag = ComponentTag::Gaussian;
      sim.sample.values = std::move(gauss);
      break;
    case Which::Jump:
      sim.sample.tag = ComponentTag::Jump;
      sim.sample.values = std::move(jump);
      break;
    case Which::Combined:
      sim.sample.tag = ComponentTag::Combined;
      sim.sample.values.resize(n);
      for (std::size_t f = 0; f < n; ++f) {
        const double v = dot(triple.drift, grid.point(f)) + gauss[f] + jump[f];
        sim.sample.values[f] = v == 0.0 ? 0.0 : v;
      }
      break;
  }
  return sim;
}

std::vector<std::string> run_simulate(const ExperimentConfig& config, Which which, const std::string& out_dir) {
  const Simulation sim = simulate(config, which);
  ensure_directory(out_dir);
  std::vector<std::string> files;
  const std::string stem = std::string("sample_") + tag_name(sim.sample.tag);
  const std::string csv = join_path(out_dir, stem + ".csv");
  write_sample(csv, sim.sample);
  files = {csv, sidecar_path(csv)};
  if (sim.atoms) {
    const std::string atoms_csv = join_path(out_dir, "atoms.csv");
    write_atoms(atoms_csv, *sim.atoms, sim.sample.triple_fingerprint);
    files.push_back(atoms_csv);
    files.push_back(sidecar_path(atoms_csv));
  }
  return files;
}

namespace {

std::string exponent_csv(const GridSpec& g, const std::vector<double>& exponent, const std::vector<PointFlag>& flag,
                         const std::vector<double>* r2) {
  std::string out;
  for (int a = 0; a < g.dim(); ++a) out += "t_" + std::to_string(a + 1) + ",";
  out += "exponent,flag,r2\n";
  for (std::size_t p = 0; p < g.size(); ++p) {
    const Vec t = g.point(p);
    for (int a = 0; a < g.dim(); ++a) out += format_double(t[a]) + ",";
    out += format_double(exponent[p]) + "," + flag_name(flag[p]) + ",";
    out += r2 ? format_double((*r2)[p]) : std::string("nan");
    out += "\n";
  }
  return out;
}

json fit_counts_json(const SpectrumEstimate& est) {
  json j = json::object();
  j["scales"] = est.scales;
  j["total_boxes"] = est.total_boxes;
  j["saturated"] = est.saturated;
  return j;
}

}  // namespace

std::vector<std::string> run_analyze(const ExperimentConfig& config, const std::string& sample_csv,
                                     const std::string& atoms_csv, const std::string& out_dir) {
  const FieldSample sample = read_sample(sample_csv);
  const std::string fp = triple_fingerprint(config.triple);
  require(sample.triple_fingerprint == fp, ErrorKind::Fingerprint, "sample fingerprint ", sample.triple_fingerprint,
          " does not match the configured triple (", fp, ")");
  std::optional<AtomSet> atoms;
  if (!atoms_csv.empty()) {
    std::string atoms_fp;
    atoms = read_atoms(atoms_csv, &atoms_fp);
    require(atoms_fp == sample.triple_fingerprint, ErrorKind::Fingerprint, "atom fingerprint ", atoms_fp,
            " does not match the sample fingerprint ", sample.triple_fingerprint);
    require(atoms->seed == sample.seed, ErrorKind::Fingerprint, "atoms were sampled with seed ", atoms->seed,
            ", the field with seed ", sample.seed);
  }
  ensure_directory(out_dir);
  std::vector<std::string> files;
  const auto& an = config.analysis;

  const HolderMap holder = holder_map(sample, {an.k_min, an.k_max, an.h_max, an.stride});
  const std::string holder_csv = join_path(out_dir, "holder.csv");
  write_text_file(holder_csv, exponent_csv(holder.grid, holder.exponent, holder.flag, &holder.r2));
  files.push_back(holder_csv);

  const SpectrumEstimate est = spectrum_estimate(sample, {an.bins, an.delta_h, an.k_min, an.k_max});
  {
    std::string out = "h_center,D,r2";
    for (int k : est.scales) out += ",N_k" + std::to_string(k);
    out += "\n";
    auto row = [&](const std::string& h, bool absent, double D, double r2, const std::vector<long long>& counts) {
      out += h + "," + (absent ? std::string("ABSENT") : format_double(D)) + "," +
             (absent ? std::string("nan") : format_double(r2));
      for (long long c : counts) out += "," + std::to_string(c);
      out += "\n";
    };
    for (std::size_t i = 0; i < est.h_center.size(); ++i)
      row(format_double(est.h_center[i]), est.absent[i], est.D[i], est.r2[i], est.counts[i]);
    row("saturated", est.saturated_absent, est.saturated_D, est.saturated_r2, est.saturated);
    const std::string path = join_path(out_dir, "spectrum.csv");
    write_text_file(path, out);
    files.push_back(path);
  }

  const double beta = index_beta(config.triple.jump);
  json curve = json::array();
  {
    std::string out = "h_center,D_estimated,D_theoretical\n";
    for (std::size_t i = 0; i < est.h_center.size(); ++i) {
      const double h = est.h_center[i];
      std::string theo = "nan";
      if (beta > 0.0) {
        const double D = theoretical_spectrum(config.triple, h);
        theo = format_double(D);
        curve.push_back({h, number_or_string(D)});
      }
      out += format_double(h) + "," + (est.absent[i] ? std::string("ABSENT") : format_double(est.D[i])) + "," + theo +
             "\n";
    }
    const std::string path = join_path(out_dir, "spectrum_overlay.csv");
    write_text_file(path, out);
    files.push_back(path);
  }

  json agreement = nullptr;
  if (atoms && config.triple.jump.is_zero()) {
    agreement = {{"skipped", "the triple has no jump part"}};
  } else if (atoms && atoms->J_trunc < std::max(1, an.j_floor) + 4) {
    agreement = {{"skipped", "approximation map needs J_trunc >= j_floor + 4"}};
  } else if (atoms) {
    const ApproxExponentMap approx = approx_exponent_map(*atoms, holder.grid, an.j_floor);
    const std::string approx_csv = join_path(out_dir, "approx.csv");
    write_text_file(approx_csv, exponent_csv(approx.grid, approx.a_hat, approx.flag, nullptr));
    files.push_back(approx_csv);

    std::string bands;
    for (int a = 0; a < approx.grid.dim(); ++a) bands += "t_" + std::to_string(a + 1) + ",";
    for (int j = approx.j_lo; j <= approx.j_hi; ++j) bands += "band_" + std::to_string(j) + (j < approx.j_hi ? "," : "\n");
    const int nb = approx.j_hi - approx.j_lo + 1;
    for (std::size_t p = 0; p < approx.grid.size(); ++p) {
      const Vec t = approx.grid.point(p);
      for (int a = 0; a < approx.grid.dim(); ++a) bands += format_double(t[a]) + ",";
      for (int b = 0; b < nb; ++b) bands += format_double(approx.band_min[p * nb + b]) + (b + 1 < nb ? "," : "\n");
    }
    const std::string bands_csv = join_path(out_dir, "approx_bands.csv");
    write_text_file(bands_csv, bands);
    files.push_back(bands_csv);

    const bool combined = sample.tag == ComponentTag::Combined && !config.triple.gaussian.is_zero();
    const AgreementReport rep = exponent_agreement(holder, approx, combined);
    std::vector<double> finite_a;
    for (std::size_t p = 0; p < approx.a_hat.size(); ++p)
      if (approx.flag[p] == PointFlag::Ok && std::isfinite(approx.a_hat[p])) finite_a.push_back(approx.a_hat[p]);
    agreement = {{"eligible_points", rep.pairs.size()},
                 {"median_abs_diff", rep.median_abs_diff},
                 {"fraction_within", rep.fraction_within},
                 {"tolerance", rep.tolerance},
                 {"combined", combined},
                 {"median_a_hat", finite_a.empty() ? json(nullptr) : json(quantile(finite_a, 0.5))},
                 {"j_floor", an.j_floor},
                 {"alpha_cap", approx.alpha_cap}};
    const std::string path = join_path(out_dir, "agreement.json");
    write_text_file(path, agreement.dump(2) + "\n");
    files.push_back(path);
  }

  const ExponentSummary hs = summarize(holder);
  json summary = {{"triple_fingerprint", fp},
                  {"component_tag", tag_name(sample.tag)},
                  {"seed", sample.seed},
                  {"beta_used", beta},
                  {"theoretical_curve_points", beta > 0.0 ? curve : json(nullptr)},
                  {"agreement_stats", agreement},
                  {"holder", {{"count", hs.count}, {"median", hs.median}, {"q1", hs.q1}, {"q3", hs.q3}}},
                  {"spectrum_boxes", fit_counts_json(est)}};
  const std::string path = join_path(out_dir, "summary.json");
  write_text_file(path, summary.dump(2) + "\n");
  files.push_back(path);
  return files;
}

std::vector<std::string> run_trace(const ExperimentConfig& config, const std::vector<Vec>& basis,
                                   const std::string& out_dir) {
  ExperimentConfig traced = config;
  traced.triple = trace_triple(config.triple, basis);
  std::vector<AxisSpec> axes(config.grid.axes().begin(), config.grid.axes().begin() + traced.triple.dim);
  traced.grid = GridSpec(std::move(axes));
  const double beta_original = index_beta(config.triple.jump);
  const double beta_trace = index_beta(traced.triple.jump);
  require(beta_trace <= beta_original, ErrorKind::Numeric, "traced index ", beta_trace, " exceeds the original ",
          beta_original);

  ensure_directory(out_dir);
  const std::string ini = join_path(out_dir, "traced.ini");
  write_text_file(ini, serialize_config(traced));
  json b = json::array();
  for (const auto& v : basis) {
    json row = json::array();
    for (int i = 0; i < config.triple.dim; ++i) row.push_back(v[i]);
    b.push_back(row);
  }
  const json report = {{"beta_original", beta_original},
                       {"beta_trace", beta_trace},
                       {"basis", b},
                       {"fingerprint_original", triple_fingerprint(config.triple)},
                       {"fingerprint_trace", triple_fingerprint(traced.triple)},
                       {"jump_empty", traced.triple.jump.is_zero()}};
  const std::string rep = join_path(out_dir, "trace_report.json");
  write_text_file(rep, report.dump(2) + "\n");
  return {ini, rep};
}

std::vector<std::string> run_validate_cf(const ExperimentConfig& config, const Vec& t, const std::vector<double>& thetas,
                                         const std::string& out_dir) {
  const auto rows =
      cf_validate(config.triple.jump, t, thetas, config.sim.replicas, config.sim.J_trunc, config.sim.seed);
  ensure_directory(out_dir);
  std::string out = "theta,an_re,an_im,emp_re,emp_im,stderr\n";
  std::size_t within = 0;
  for (const auto& r : rows) {
    out += format_double(r.theta) + "," + format_double(r.analytic.real()) + "," + format_double(r.analytic.imag()) +
           "," + format_double(r.empirical.real()) + "," + format_double(r.empirical.imag()) + "," +
           format_double(r.stderr_) + "\n";
    if (std::abs(r.empirical - r.analytic) <= 4.0 * r.stderr_) ++within;
  }
  const std::string csv = join_path(out_dir, "cf.csv");
  write_text_file(csv, out);
  json tj = json::array();
  for (int i = 0; i < config.triple.dim; ++i) tj.push_back(t[i]);
  const json meta = {{"t", tj},
                     {"replicas", config.sim.replicas},
                     {"J_trunc", config.sim.J_trunc},
                     {"seed", config.sim.seed},
                     {"triple_fingerprint", triple_fingerprint(config.triple)},
                     {"fraction_within_4_stderr", rows.empty() ? 1.0 : static_cast<double>(within) / rows.size()}};
  const std::string js = join_path(out_dir, "cf.json");
  write_text_file(js, meta.dump(2) + "\n");
  return {csv, js};
}

std::vector<std::string> run_report(const ExperimentConfig& config, const std::string& out_dir) {
  const CharTriple& triple = config.triple;
  const JumpMeasure& nu = triple.jump;
  const double beta = index_beta(nu);
  const ChiResult chi = admissibility_chi(nu, 60);
  json bands = json::array();
  for (int j = 0; j <= config.sim.J_trunc; ++j) bands.push_back(band_mass(nu, j));
  json gauges = json::array();
  for (double s : {0.25, 0.5, 0.75, 1.0})
    gauges.push_back({{"s", s}, {"h", number_or_string(gauge_exponent(nu, {s, 0.0}))}});
  json spectrum = nullptr;
  if (beta > 0.0) {
    spectrum = json::array();
    for (int i = 0; i <= 20; ++i) {
      const double h = 0.05 * i;
      spectrum.push_back({h, number_or_string(theoretical_spectrum(triple, h))});
    }
  }
  const Vec far = scaled(Direction::axis(0).coords(), config.sim.A);
  const json report = {
      {"triple_fingerprint", triple_fingerprint(triple)},
      {"dim", triple.dim},
      {"beta", beta},
      {"chi", {{"partial_sum", chi.partial_sum}, {"j_max", 60}, {"converged", chi.converged}}},
      {"band_masses", bands},
      {"c_mu", c_mu(triple.gaussian)},
      {"gauge_exponents", gauges},
      {"theoretical_spectrum", spectrum},
      {"truncation",
       {{"J_trunc", config.sim.J_trunc},
        {"error_std_at_A_e1", truncation_error_std(nu, config.sim.A, config.sim.J_trunc, far)},
        {"field_scale_at_A_e1", std::sqrt(field_scale_estimate(nu, far))},
        {"suggested_J_trunc", suggest_truncation(nu, config.sim.A)}}}};
  ensure_directory(out_dir);
  const std::string path = join_path(out_dir, "report.json");
  write_text_file(path, report.dump(2) + "\n");
  return {path};
}

}  // namespace levyfield
