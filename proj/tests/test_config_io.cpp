#include <doctest.h>

#include <filesystem>
#include <json.hpp>

#include "config.hpp"
#include "experiment.hpp"
#include "io.hpp"

using namespace levyfield;
namespace fs = std::filesystem;

namespace {

const char* kBase = R"(
[triple]
dim = 2
drift = 0.25 -1
gaussian.isotropic_mass = 1.5
gaussian.atoms = 1 1 : 0.5
jump.coupling = product
jump.directional.isotropic_mass = 1
jump.radial.kind = stable
jump.radial.alpha = 1.2

[grid]
axis.1 = 0 0.5 17
axis.2 = -0.25 0.25 17

[sim]
A = 1
J_trunc = 8
seed = 12
)";

std::string temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("levyfield_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("every example config round-trips to a fixed point") {
  int n = 0;
  for (const auto& entry : fs::directory_iterator(LF_CONFIG_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    ++n;
    const auto cfg = load_config(entry.path().string());
    const std::string once = serialize_config(cfg);
    const std::string twice = serialize_config(parse_config(once));
    CHECK_MESSAGE(once == twice, entry.path().string());
    CHECK(triple_fingerprint(parse_config(once).triple) == triple_fingerprint(cfg.triple));
  }
  CHECK(n >= 6);
}

TEST_CASE("defaults and canonical form") {
  const auto c = parse_config(kBase);
  CHECK(c.sim.replicas == 1000);
  CHECK(c.analysis.k_min == 2);
  // spacing 1/32: floor(log2 32) - 2
  CHECK(c.analysis.k_max == 3);
  CHECK(c.analysis.j_floor == 1);
  CHECK(c.analysis.bins == 21);
  CHECK(c.output_dir == "out");
  const double r = 1.0 / std::sqrt(2.0);
  REQUIRE(c.triple.gaussian.half_atoms().size() == 1);
  CHECK(c.triple.gaussian.half_atoms()[0].s[0] == doctest::Approx(r));
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-0.0) == "0");
}

TEST_CASE("config errors") {
  auto with = [](const std::string& from, const std::string& to) {
    std::string s = kBase;
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
  };
  CHECK(kind_of([&] { parse_config(with("seed = 12\n", "")); }) == ErrorKind::Config);
  CHECK(kind_of([&] { parse_config(with("A = 1\n", "")); }) == ErrorKind::Config);
  CHECK(kind_of([&] { parse_config(with("J_trunc = 8\n", "")); }) == ErrorKind::Config);
  CHECK(kind_of([&] { parse_config(with("A = 1\n", "A = 0.3\n")); }) == ErrorKind::Config);
  CHECK(kind_of([&] { parse_config(with("dim = 2", "dim = 4")); }) == ErrorKind::Config);
  CHECK(kind_of([&] { parse_config(with("seed = 12", "seed = -1")); }) == ErrorKind::Config);
  CHECK(kind_of([&] { parse_config(with("seed = 12", "seed = 12\ncolour = red")); }) == ErrorKind::Config);
  CHECK(kind_of([&] { parse_config(with("[sim]", "[simulation]")); }) == ErrorKind::Config);
  CHECK(kind_of([&] { parse_config(with("jump.radial.alpha = 1.2", "jump.radial.alpha = 2.5")); }) ==
        ErrorKind::Config);
  CHECK(kind_of([&] { parse_config(with("axis.2 = -0.25 0.25 17", "axis.2 = 0.25 -0.25 17")); }) ==
        ErrorKind::Config);
  CHECK(kind_of([&] { load_config("/nonexistent/file.ini"); }) == ErrorKind::Io);
}

TEST_CASE("fingerprints follow the triple only") {
  const auto a = parse_config(kBase);
  std::string other = kBase;
  other.replace(other.find("seed = 12"), 9, "seed = 13");
  CHECK(triple_fingerprint(parse_config(other).triple) == triple_fingerprint(a.triple));
  std::string changed = kBase;
  changed.replace(changed.find("alpha = 1.2"), 11, "alpha = 1.3");
  CHECK(triple_fingerprint(parse_config(changed).triple) != triple_fingerprint(a.triple));
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("samples and atoms survive a file round trip bit for bit") {
  const auto cfg = parse_config(kBase);
  const auto sim = simulate(cfg, Which::Combined);
  REQUIRE(sim.atoms);
  const std::string dir = temp_dir("roundtrip");
  write_sample(dir + "/s.csv", sim.sample);
  const auto back = read_sample(dir + "/s.csv");
  CHECK(back.values == sim.sample.values);
  CHECK(back.grid.same_as(sim.sample.grid));
  CHECK(back.seed == sim.sample.seed);
  CHECK(back.tag == ComponentTag::Combined);
  CHECK(back.triple_fingerprint == triple_fingerprint(cfg.triple));

  write_atoms(dir + "/a.csv", *sim.atoms, sim.sample.triple_fingerprint);
  std::string fp;
  const auto atoms = read_atoms(dir + "/a.csv", &fp);
  CHECK(fp == sim.sample.triple_fingerprint);
  REQUIRE(atoms.bands.size() == sim.atoms->bands.size());
  for (std::size_t j = 0; j < atoms.bands.size(); ++j) {
    REQUIRE(atoms.bands[j].size() == sim.atoms->bands[j].size());
    for (std::size_t i = 0; i < atoms.bands[j].size(); ++i) {
      CHECK(atoms.bands[j][i].rho == sim.atoms->bands[j][i].rho);
      CHECK(atoms.bands[j][i].x == sim.atoms->bands[j][i].x);
      CHECK(atoms.bands[j][i].s == sim.atoms->bands[j][i].s);
    }
  }
  const auto csv = read_text_file(dir + "/s.csv");
  CHECK(csv.rfind("t_1,t_2,value\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("drift-only and zero triples") {
  std::string drift = kBase;
  for (const char* key : {"gaussian.isotropic_mass = 1.5\n", "gaussian.atoms = 1 1 : 0.5\n",
                          "jump.directional.isotropic_mass = 1\n"})
    drift.erase(drift.find(key), std::string(key).size());
  drift.replace(drift.find("drift = 0.25 -1"), 15, "drift = 1 0");
  const auto cfg = parse_config(drift);
  const auto sim = simulate(cfg, Which::Combined);
  for (std::size_t f = 0; f < cfg.grid.size(); ++f) CHECK(sim.sample.values[f] == cfg.grid.point(f)[0]);
  auto zero = cfg;
  zero.triple = CharTriple::zero(2);
  for (double v : simulate(zero, Which::Combined).sample.values) CHECK(v == 0.0);
}

TEST_CASE("components are independent substreams of one seed") {
  const auto cfg = parse_config(kBase);
  const auto g = simulate(cfg, Which::Gaussian).sample.values;
  const auto j = simulate(cfg, Which::Jump).sample.values;
  const auto c = simulate(cfg, Which::Combined).sample.values;
  for (std::size_t f = 0; f < g.size(); ++f) {
    const double expected = dot(cfg.triple.drift, cfg.grid.point(f)) + g[f] + j[f];
    CHECK(c[f] == (expected == 0.0 ? 0.0 : expected));
  }
}

TEST_CASE("analyze refuses inputs from another triple") {
  auto cfg = parse_config(kBase);
  cfg.analysis.k_max = 4;
  cfg.analysis.j_floor = 2;
  const std::string dir = temp_dir("mismatch");
  run_simulate(cfg, Which::Jump, dir);
  auto other = cfg;
  other.triple.drift = {0.5, 0.0, 0.0};
  CHECK(kind_of([&] { run_analyze(other, dir + "/sample_jump.csv", "", dir + "/an"); }) == ErrorKind::Fingerprint);

  auto reseeded = cfg;
  reseeded.sim.seed = 99;
  const std::string dir2 = temp_dir("mismatch2");
  run_simulate(reseeded, Which::Jump, dir2);
  CHECK(kind_of([&] { run_analyze(cfg, dir + "/sample_jump.csv", dir2 + "/atoms.csv", dir + "/an"); }) ==
        ErrorKind::Fingerprint);

  const auto files = run_analyze(cfg, dir + "/sample_jump.csv", dir + "/atoms.csv", dir + "/an");
  CHECK(files.size() >= 7);
  const auto summary = nlohmann::json::parse(read_text_file(dir + "/an/summary.json"));
  CHECK(summary["beta_used"].get<double>() == 1.2);
  CHECK(summary["theoretical_curve_points"].size() == 21);
}

TEST_CASE("trace runs") {
  const auto cfg = parse_config(kBase);
  const std::string dir = temp_dir("trace");
  const std::vector<Vec> id{{1, 0, 0}, {0, 1, 0}};
  run_trace(cfg, id, dir);
  const auto traced = load_config(dir + "/traced.ini");
  CHECK(serialize_triple(traced.triple) == serialize_triple(cfg.triple));
  const auto report = nlohmann::json::parse(read_text_file(dir + "/trace_report.json"));
  CHECK(report["beta_trace"].get<double>() == report["beta_original"].get<double>());

  const std::vector<Vec> bad{{1, 0, 0}, {1, 0, 0}};
  CHECK(kind_of([&] { run_trace(cfg, bad, dir); }) == ErrorKind::Argument);
}
