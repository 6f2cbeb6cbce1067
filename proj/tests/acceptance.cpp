// Acceptance suite: one PASS/FAIL line per criterion, with the measured
// quantities. Exit status is nonzero when any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "config.hpp"
#include "gaussian.hpp"
#include "jump.hpp"
#include "measure.hpp"

using namespace levyfield;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [fail]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

JumpMeasure stable(int dim, double alpha) {
  return JumpMeasure(dim, ProductLaw{SphericalMeasure(dim, 1.0, {}), StableRadial{alpha, 1.0}});
}

// Composite Simpson rule.
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

std::vector<double> finite_exponents(const HolderMap& m) {
  std::vector<double> out;
  for (std::size_t p = 0; p < m.exponent.size(); ++p)
    if (m.flag[p] == PointFlag::Ok) out.push_back(m.exponent[p]);
  return out;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  std::vector<double> thetas;
  for (int i = 0; i < 41; ++i) thetas.push_back(-5.0 + 0.25 * i);
  const int replicas = 10000;
  const double tol = 4.0 / std::sqrt(static_cast<double>(replicas));
  {
    const auto t0 = std::chrono::steady_clock::now();
    const double w = 1.0;
    const JumpMeasure nu(2, AtomListLaw{{{Direction::axis(0), 2.0, w}}});
    const auto rows = cf_validate(nu, {1, 0, 0}, thetas, replicas, 12, 2024);
    int hits = 0;
    for (const auto& r : rows) {
      // Poisson(w) count of +2 jumps: exp(w (e^{2 i theta} - 1)).
      const std::complex<double> oracle = std::exp(w * (std::exp(std::complex<double>(0.0, 2.0 * r.theta)) - 1.0));
      hits += std::abs(r.empirical - oracle) <= tol;
    }
    const double frac = hits / 41.0, secs = seconds_since(t0);
    o.check(frac >= 0.95, "compound Poisson within 4 SE at " + fmt("%.3f", frac) + " of theta");
    o.check(secs < 120.0, "runtime " + fmt("%.1f", secs) + " s");
  }
  {
    const auto t0 = std::chrono::steady_clock::now();
    const double alpha = 1.2;
    const auto rows = cf_validate(stable(2, alpha), {1, 0, 0}, thetas, replicas, 12, 2025);
    // Quadrature of \int max(<s,e1>,0) (cos(theta x) - 1) |x|^{-1-alpha} over the
    // unit circle (mass 1) and R*: angular factor E max(cos, 0) = 1/pi.
    const double angular = 1.0 / std::numbers::pi;
    int hits = 0;
    for (const auto& r : rows) {
      const double th = r.theta;
      const double inner = simpson([&](double x) { return x == 0.0 ? 0.0 : (std::cos(th * x) - 1.0) * std::pow(x, -1.0 - alpha); },
                                   0.0, 1.0, 400000);
      const double outer = simpson([&](double u) {
        if (u == 0.0) return 0.0;
        const double x = 1.0 / u;
        return (std::cos(th * x) - 1.0) * std::pow(x, -1.0 - alpha) / (u * u);
      }, 0.0, 1.0, 400000);
      const std::complex<double> oracle = std::exp(2.0 * angular * (inner + outer));
      hits += std::abs(r.empirical - oracle) <= tol;
    }
    const double frac = hits / 41.0, secs = seconds_since(t0);
    o.check(frac >= 0.95, "stable 1.2 within 4 SE at " + fmt("%.3f", frac) + " of theta");
    o.check(secs < 120.0, "runtime " + fmt("%.1f", secs) + " s");
  }
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const SphericalMeasure mu(2, std::numbers::pi, {});
  const GridSpec g({{0.2, 1.0, 5}, {0.0, 0.0, 1}});
  const int seeds = 2000;
  std::vector<std::vector<double>> s;
  for (int seed = 0; seed < seeds; ++seed) s.push_back(sample_gaussian(mu, g, seed));
  // Analytic covariance from the angular average of |<s,u>| (independent of the
  // library's closed form): V(u) = (1/2) pi E|<s,u>|.
  auto V = [](const Vec& u) {
    double acc = 0.0;
    const int m = 20000;
    for (int i = 0; i < m; ++i) {
      const double th = 2.0 * std::numbers::pi * (i + 0.5) / m;
      acc += std::abs(std::cos(th) * u[0] + std::sin(th) * u[1]);
    }
    return 0.5 * std::numbers::pi * acc / m;
  };
  int bad = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t k = i; k < g.size(); ++k) {
      const Vec a = g.point(i), b = g.point(k);
      const double c = 0.5 * (V(a) + V(b) - V(difference(a, b)));
      double mean = 0.0, m2 = 0.0;
      for (int r = 0; r < seeds; ++r) {
        const double x = s[r][i] * s[r][k];
        const double d = x - mean;
        mean += d / (r + 1);
        m2 += d * (x - mean);
      }
      const double se = std::sqrt(m2 / (seeds - 1) / seeds);
      const double z = std::abs(mean - c) / se;
      worst = std::max(worst, z);
      bad += z > 4.0;
    }
  double var = 0.0;
  for (int r = 0; r < seeds; ++r) var += s[r][4] * s[r][4] / seeds;
  o.check(bad == 0, "15 covariance entries, worst deviation " + fmt("%.2f", worst) + " SE");
  o.check(std::abs(var - 1.0) <= 0.06, "Var B(e1) = " + fmt("%.4f", var));
  const double secs = seconds_since(t0);
  o.check(secs < 60.0, "runtime " + fmt("%.1f", secs) + " s");
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  FieldSample s;
  s.grid = GridSpec({{0.0, 1.0, 1 << 14}});
  s.values = sample_gaussian(SphericalMeasure(1, 2.0, {}), s.grid, 314159);
  s.tag = ComponentTag::Gaussian;
  const int k_max = static_cast<int>(std::floor(std::log2(1.0 / s.grid.min_spacing()))) - 2;
  const auto m = holder_map(s, {2, k_max, 2.0, 1});
  const auto e = finite_exponents(m);
  const double med = median(e), iqr = quantile(e, 0.75) - quantile(e, 0.25);
  o.check(med >= 0.4 && med <= 0.6, "median " + fmt("%.3f", med));
  o.check(iqr <= 0.2, "IQR " + fmt("%.3f", iqr));
  const double secs = seconds_since(t0);
  o.check(secs < 60.0, "runtime " + fmt("%.1f", secs) + " s");
  return o;
}

// Shared run of criteria 4 and 5: d = 2 stable alpha = 1.2 on a 512^2 grid.
struct StableRun {
  std::vector<SpectrumEstimate> spectra;
  std::vector<AgreementReport> agreement;
  std::vector<double> median_a_hat;
  double seconds_spectrum = 0.0;
};

StableRun stable_runs() {
  StableRun run;
  const double alpha = 1.2;
  const int J = 16;
  const auto nu = stable(2, alpha);
  const GridSpec g({{-0.5, 0.5, 512}, {-0.5, 0.5, 512}});
  const auto comp = compensator_table(nu, J);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto t0 = std::chrono::steady_clock::now();
    const AtomSet atoms = sample_atoms(nu, 0.71, J, seed);
    FieldSample s;
    s.grid = g;
    s.values = evaluate_jump_field(atoms, comp, g);
    s.tag = ComponentTag::Jump;
    run.spectra.push_back(spectrum_estimate(s, {21, 0.1, 2, 7}));
    run.seconds_spectrum += seconds_since(t0);
    const HolderMap h = holder_map(s, {2, 7, 2.0, 8});
    const ApproxExponentMap a = approx_exponent_map(atoms, h.grid, J - 8);
    run.agreement.push_back(exponent_agreement(h, a));
    std::vector<double> finite_a;
    for (std::size_t p = 0; p < a.a_hat.size(); ++p)
      if (a.flag[p] == PointFlag::Ok && std::isfinite(a.a_hat[p])) finite_a.push_back(a.a_hat[p]);
    run.median_a_hat.push_back(median(finite_a));
  }
  return run;
}

Outcome criterion4(const StableRun& run) {
  Outcome o;
  const double beta = 1.2;
  for (double h : {0.3, 0.5, 0.7}) {
    const int bin = static_cast<int>(std::lround(h / 0.1));
    double sum = 0.0;
    int present = 0;
    for (const auto& est : run.spectra)
      if (!est.absent[bin]) sum += est.D[bin], ++present;
    const double mean = present ? sum / present : std::nan("");
    o.check(present == 5 && std::abs(mean - (1.0 + beta * h)) <= 0.25,
            "D(" + fmt("%.1f", h) + ") = " + fmt("%.3f", mean) + " vs " + fmt("%.2f", 1.0 + beta * h));
  }
  // Finest-scale box fraction of bins centred above 1/beta + 0.2.
  double worst = 0.0;
  for (const auto& est : run.spectra) {
    const std::size_t last = est.scales.size() - 1;
    for (std::size_t i = 0; i < est.h_center.size(); ++i)
      if (est.h_center[i] > 1.0 / beta + 0.2)
        worst = std::max(worst, static_cast<double>(est.counts[i][last]) / est.total_boxes[last]);
  }
  o.check(worst <= 1e-3, "largest finest-scale fraction above h = 1/beta + 0.2: " + fmt("%.5f", worst));
  o.check(run.seconds_spectrum < 600.0, "runtime " + fmt("%.1f", run.seconds_spectrum) + " s");
  return o;
}

Outcome criterion5(const StableRun& run) {
  Outcome o;
  double frac = 0.0, med = 0.0, eligible = 0.0;
  for (std::size_t i = 0; i < run.agreement.size(); ++i) {
    frac += run.agreement[i].fraction_within / run.agreement.size();
    med += run.median_a_hat[i] / run.agreement.size();
    eligible += static_cast<double>(run.agreement[i].pairs.size()) / run.agreement.size();
  }
  o.check(frac >= 0.6, "within 0.2 at " + fmt("%.3f", frac) + " of " + fmt("%.0f", eligible) + " eligible points");
  o.check(std::abs(med - 1.0 / 1.2) <= 0.15, "median A_hat " + fmt("%.3f", med));
  return o;
}

Outcome criterion6() {
  Outcome o;
  const int dim = 2;
  auto dir = [](double a, double b) { return Direction::normalized({a, b, 0.0}, 2); };
  const JumpMeasure nu(dim, AtomListLaw{{{dir(1, 0), 0.75, 1.5}, {dir(0.6, 0.8), 2.0, 1.0}, {dir(-0.28, 0.96), 0.3, 2.0}}});
  const int J = 6;
  const AtomSet atoms = sample_atoms(nu, 1.5, J, 77);
  const GridSpec g({{0.0, 1.0, 128}, {0.0, 1.0, 128}});
  FieldSample s;
  s.grid = g;
  s.values = evaluate_jump_field(atoms, compensator_table(nu, J), g);
  s.tag = ComponentTag::Jump;

  // Independent form: indicator sum minus the linear map
  // t -> sum over stored pairs with |x| <= 1 of w x <s,t>.
  double bx = 0.0, by = 0.0;
  for (const auto& a : nu.atom_list().half_atoms)
    if (std::abs(a.x) <= 1.0) bx += a.weight * a.x * a.s[0], by += a.weight * a.x * a.s[1];
  double worst = 0.0;
  for (std::size_t f = 0; f < g.size(); ++f) {
    const Vec t = g.point(f);
    long double acc = 0.0L;
    for (const auto& band : atoms.bands)
      for (const auto& a : band)
        if (a.rho < a.s[0] * t[0] + a.s[1] * t[1]) acc += a.x;
    const double explicit_value = static_cast<double>(acc - (static_cast<long double>(bx) * t[0] + static_cast<long double>(by) * t[1]));
    worst = std::max(worst, std::abs(explicit_value - s.values[f]));
  }
  o.check(worst <= 1e-12, "max deviation from explicit form " + fmt("%.2e", worst) + " over " +
                              std::to_string(atoms.size()) + " atoms");

  // Radius 2^-2 balls routinely hold several hyperplanes of this field, so
  // the regression starts at k = 3.
  const int k_min = 3, k_max = 6;
  const auto m = holder_map(s, {k_min, k_max, 2.0, 1});
  const double cell = g.min_spacing();
  const double r_fine = std::ldexp(1.0, -k_max);
  int off_total = 0, off_sat = 0, near_total = 0;
  std::vector<double> near;
  for (std::size_t f = 0; f < g.size(); ++f) {
    const Vec t = g.point(f);
    double d = kInf;
    for (const auto& band : atoms.bands)
      for (const auto& a : band) d = std::min(d, std::abs(a.rho - (a.s[0] * t[0] + a.s[1] * t[1])));
    if (d > r_fine * (1.0 + 1e-9)) {
      ++off_total;
      off_sat += m.flag[f] == PointFlag::Saturated;
    } else if (d <= cell) {
      ++near_total;
      near.push_back(m.flag[f] == PointFlag::Ok ? m.exponent[f] : 2.0);
    }
  }
  o.check(off_sat == off_total, std::to_string(off_sat) + "/" + std::to_string(off_total) +
                                    " points off the hyperplanes SATURATED");
  const double near_median = near.empty() ? std::nan("") : median(near);
  const double near_q90 = near.empty() ? std::nan("") : quantile(near, 0.9);
  o.check(near_total > 0 && near_median <= 0.25, std::to_string(near_total) + " points within one cell: median exponent " +
                                                    fmt("%.3f", near_median) + ", 90% quantile " + fmt("%.3f", near_q90));
  return o;
}

Outcome criterion7() {
  Outcome o;
  const GridSpec g({{0.0, 1.0, 1 << 14}});
  const int k_max = static_cast<int>(std::floor(std::log2(1.0 / g.min_spacing()))) - 2;
  const SphericalMeasure brown(1, 2.0, {});
  auto jump_field = [&](double alpha, int J, std::uint64_t seed) {
    const auto nu = stable(1, alpha);
    return evaluate_jump_field(sample_atoms(nu, 1.0, J, seed), compensator_table(nu, J), g);
  };
  auto med_of = [&](std::vector<double> values) {
    FieldSample s;
    s.grid = g;
    s.values = std::move(values);
    s.tag = ComponentTag::Combined;
    return median(finite_exponents(holder_map(s, {2, k_max, 2.0, 1})));
  };
  // Medians averaged over seeds: single jump-only runs of the heavy-tailed
  // alpha = 0.8 field scatter by about 0.1.
  const double alphas[2] = {1.2, 0.8};
  const int Js[2] = {16, 24};
  const int seeds = 5;
  double med_c[2] = {0, 0}, med_j[2] = {0, 0};
  for (int seed = 0; seed < seeds; ++seed) {
    const auto gauss = sample_gaussian(brown, g, 100 + seed);
    for (int i = 0; i < 2; ++i) {
      const auto jump = jump_field(alphas[i], Js[i], 200 + 10 * i + seed);
      std::vector<double> combined(g.size());
      for (std::size_t f = 0; f < g.size(); ++f) combined[f] = gauss[f] + jump[f];
      med_c[i] += med_of(combined) / seeds;
      med_j[i] += med_of(jump) / seeds;
    }
  }
  for (int i = 0; i < 2; ++i)
    o.check(med_c[i] >= 0.4 && med_c[i] <= 0.6,
            "combined alpha " + fmt("%.1f", alphas[i]) + " median " + fmt("%.3f", med_c[i]));
  o.check(std::abs(med_j[0] - 1.0 / 1.2) <= 0.2, "jump-only alpha 1.2 median " + fmt("%.3f", med_j[0]));
  o.check(std::abs(med_j[1] - 1.0 / 0.8) <= 0.2, "jump-only alpha 0.8 median " + fmt("%.3f", med_j[1]));
  o.check(med_j[1] > med_j[0], "jump-only medians ordered by 1/beta");
  return o;
}

Outcome criterion8() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  bool exact = true, gauge = true, trace = true;
  for (double alpha : {0.3, 0.5, 0.7, 0.9, 1.1, 1.3, 1.5, 1.7, 1.9}) {
    exact = exact && index_beta(stable(2, alpha)) == alpha;
    for (double s : {0.2, 0.5, 1.0}) gauge = gauge && gauge_exponent(stable(2, alpha), {s, 0.0}) * alpha == s;
    CharTriple t = CharTriple::zero(3);
    t.jump = stable(3, alpha);
    const std::vector<Vec> line{{0.0, 0.6, 0.8}};
    const std::vector<Vec> plane{{1, 0, 0}, {0, 0.6, 0.8}};
    trace = trace && index_beta(trace_triple(t, line).jump) == alpha &&
            index_beta(trace_triple(t, plane).jump) == alpha;
  }
  o.check(exact, "index of Stable{alpha} equals alpha for 9 values");
  o.check(trace, "isotropic traces keep the index");
  o.check(gauge, "gauge exponent times index equals s");
  double worst = 0.0;
  for (double alpha : {0.5, 0.8, 1.2, 1.6, 1.9}) {
    // Band table from closed-form stable band masses.
    std::vector<double> bands;
    for (int j = 1; j <= 40; ++j)
      bands.push_back((2.0 / alpha) * (std::pow(2.0, j * alpha) - std::pow(2.0, (j - 1) * alpha)));
    const JumpMeasure nu(1, ProductLaw{SphericalMeasure(1, 1.0, {}), BandTableRadial{2.0 / alpha, bands, Continuation::Geometric}});
    worst = std::max(worst, std::abs(index_beta(nu) - alpha));
  }
  o.check(worst <= 0.02, "band table recovery error " + fmt("%.2e", worst));
  const double secs = seconds_since(t0);
  o.check(secs < 1.0, "runtime " + fmt("%.3f", secs) + " s");
  return o;
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(LF_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion9() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "levyfield_acceptance_c9";
  fs::remove_all(root);
  int configs = 0, identical = 0, fixed_points = 0, files = 0;
  std::vector<fs::path> inis;
  for (const auto& e : fs::directory_iterator(LF_CONFIG_DIR))
    if (e.path().extension() == ".ini") inis.push_back(e.path());
  std::sort(inis.begin(), inis.end());
  for (const auto& ini : inis) {
    ++configs;
    const std::string name = ini.stem().string();
    bool ok = true;
    for (int pass = 0; pass < 2; ++pass) {
      const fs::path dir = root / name / std::to_string(pass);
      const std::string cfg = " --config " + ini.string();
      ok = ok && run_cli("simulate" + cfg + " --out " + dir.string()) == 0;
      std::string analyze = "analyze" + cfg + " --sample " + (dir / "sample_combined.csv").string();
      if (fs::exists(dir / "atoms.csv")) analyze += " --atoms " + (dir / "atoms.csv").string();
      ok = ok && run_cli(analyze + " --out " + (dir / "analysis").string()) == 0;
      ok = ok && run_cli("report" + cfg + " --out " + (dir / "report").string()) == 0;
      const int dim = load_config(ini.string()).triple.dim;
      const std::string basis = dim == 1 ? "1" : dim == 2 ? "0.6,0.8" : "0,0.6,0.8";
      ok = ok && run_cli("trace" + cfg + " --basis " + basis + " --out " + (dir / "trace").string()) == 0;
    }
    for (const auto& e : fs::recursive_directory_iterator(root / name / "0")) {
      if (!e.is_regular_file()) continue;
      ++files;
      const fs::path other = root / name / "1" / fs::relative(e.path(), root / name / "0");
      ok = ok && fs::exists(other) && slurp(e.path()) == slurp(other);
    }
    identical += ok;
    const auto c = load_config(ini.string());
    const std::string once = serialize_config(c);
    fixed_points += serialize_config(parse_config(once)) == once;
  }
  o.check(configs > 0 && identical == configs,
          std::to_string(identical) + "/" + std::to_string(configs) + " configs byte-identical over " +
              std::to_string(files) + " files per run");
  o.check(fixed_points == configs, std::to_string(fixed_points) + "/" + std::to_string(configs) +
                                       " configs serialize to a fixed point");
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const std::function<Outcome()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::printf("criterion %d: %s (%s) [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  };
  report(1, criterion1);
  report(2, criterion2);
  report(3, criterion3);
  std::optional<StableRun> run;
  report(4, [&] {
    run = stable_runs();
    return criterion4(*run);
  });
  report(5, [&] {
    if (!run) run = stable_runs();
    return criterion5(*run);
  });
  report(6, criterion6);
  report(7, criterion7);
  report(8, criterion8);
  report(9, criterion9);
  std::printf("%s: %d of 9 criteria failed\n", failed ? "FAIL" : "PASS", failed);
  return failed ? 1 : 0;
}
