#include "config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace levyfield {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

double parse_number(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  require(!t.empty(), ErrorKind::Config, "key '", key, "': expected a number");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  require(end && *end == '\0' && errno != ERANGE, ErrorKind::Config, "key '", key, "': '", t,
          "' is not a finite number");
  require(std::isfinite(v), ErrorKind::Config, "key '", key, "': value must be finite");
  return v;
}

long long parse_integer(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  require(!t.empty() && end && *end == '\0' && errno != ERANGE, ErrorKind::Config, "key '", key, "': '", t,
          "' is not an integer");
  return v;
}

std::uint64_t parse_seed(const std::string& text) {
  const std::string t = trim(text);
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  require(!t.empty() && t[0] != '-' && end && *end == '\0' && errno != ERANGE, ErrorKind::Config,
          "key 'seed': '", t, "' is not an unsigned 64-bit integer");
  return v;
}

std::vector<double> parse_numbers(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) out.push_back(parse_number(tok, key));
  return out;
}

Vec parse_vector(const std::string& text, int dim, const std::string& key) {
  const auto v = parse_numbers(text, key);
  require(static_cast<int>(v.size()) == dim, ErrorKind::Config, "key '", key, "': expected ", dim,
          " components, got ", v.size());
  Vec out{};
  for (int i = 0; i < dim; ++i) out[i] = v[i];
  return out;
}

// Entries "a : b : c ; ..." with the given number of parts; empty text means none.
std::vector<std::vector<std::string>> parse_entries(const std::string& text, std::size_t parts,
                                                    const std::string& key) {
  std::vector<std::vector<std::string>> out;
  if (trim(text).empty()) return out;
  for (const auto& entry : split(text, ';')) {
    if (entry.empty()) continue;
    auto p = split(entry, ':');
    require(p.size() == parts, ErrorKind::Config, "key '", key, "': entry '", entry, "' should have ", parts,
            " parts separated by ':'");
    out.push_back(std::move(p));
  }
  return out;
}

std::string join_vec(const Vec& v, int dim) {
  std::string s;
  for (int i = 0; i < dim; ++i) {
    if (i) s += ' ';
    s += format_double(v[i]);
  }
  return s;
}

using Section = std::map<std::string, std::string>;

class Sections {
 public:
  explicit Sections(const std::string& text) {
    std::istringstream is(text);
    std::string line, current;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      if (t.front() == '[') {
        require(t.back() == ']', ErrorKind::Config, "line ", lineno, ": malformed section header");
        current = trim(t.substr(1, t.size() - 2));
        require(kKnown.count(current) == 1, ErrorKind::Config, "line ", lineno, ": unknown section [", current, "]");
        require(data_.count(current) == 0, ErrorKind::Config, "line ", lineno, ": duplicate section [", current, "]");
        data_[current];
        continue;
      }
      require(!current.empty(), ErrorKind::Config, "line ", lineno, ": key outside of a section");
      const auto eq = t.find('=');
      require(eq != std::string::npos, ErrorKind::Config, "line ", lineno, ": expected 'key = value'");
      const std::string key = trim(t.substr(0, eq));
      require(!key.empty(), ErrorKind::Config, "line ", lineno, ": empty key");
      auto& sec = data_[current];
      require(sec.count(key) == 0, ErrorKind::Config, "line ", lineno, ": duplicate key '", key, "'");
      sec[key] = trim(t.substr(eq + 1));
    }
  }

  bool has(const std::string& sec, const std::string& key) const {
    const auto it = data_.find(sec);
    return it != data_.end() && it->second.count(key);
  }

  const std::string& get(const std::string& sec, const std::string& key) {
    require(has(sec, key), ErrorKind::Config, "missing key '", key, "' in section [", sec, "]");
    used_.insert(sec + "/" + key);
    return data_.at(sec).at(key);
  }

  std::string get_or(const std::string& sec, const std::string& key, const std::string& fallback) {
    return has(sec, key) ? get(sec, key) : fallback;
  }

  std::vector<std::string> keys(const std::string& sec) const {
    std::vector<std::string> out;
    const auto it = data_.find(sec);
    if (it != data_.end())
      for (const auto& [k, v] : it->second) out.push_back(k);
    return out;
  }

  void check_all_used() const {
    for (const auto& [sec, kv] : data_)
      for (const auto& [k, v] : kv)
        require(used_.count(sec + "/" + k) == 1, ErrorKind::Config, "unknown or unused key '", k, "' in section [",
                sec, "]");
  }

 private:
  inline static const std::set<std::string> kKnown{"triple", "grid", "sim", "analysis", "outputs"};
  std::map<std::string, Section> data_;
  std::set<std::string> used_;
};

SphericalMeasure parse_spherical(Sections& s, const std::string& prefix, int dim) {
  const double iso = parse_number(s.get_or("triple", prefix + ".isotropic_mass", "0"), prefix + ".isotropic_mass");
  std::vector<DirectionalAtom> atoms;
  for (const auto& e : parse_entries(s.get_or("triple", prefix + ".atoms", ""), 2, prefix + ".atoms"))
    atoms.push_back({Direction::normalized(parse_vector(e[0], dim, prefix + ".atoms"), dim),
                     parse_number(e[1], prefix + ".atoms")});
  return SphericalMeasure(dim, iso, std::move(atoms));
}

std::string serialize_spherical(const SphericalMeasure& mu, const std::string& prefix) {
  std::string out = prefix + ".isotropic_mass = " + format_double(mu.isotropic_mass()) + "\n";
  out += prefix + ".atoms =";
  bool first = true;
  for (const auto& a : mu.half_atoms()) {
    out += first ? " " : " ; ";
    first = false;
    out += join_vec(a.s.coords(), mu.dim()) + " : " + format_double(a.weight);
  }
  return out + "\n";
}

CharTriple parse_triple(Sections& s) {
  CharTriple t;
  const long long dim = parse_integer(s.get("triple", "dim"), "dim");
  require(dim >= 1 && dim <= 3, ErrorKind::Config, "dim must be 1, 2 or 3 (got ", dim, ")");
  t.dim = static_cast<int>(dim);
  t.drift = s.has("triple", "drift") ? parse_vector(s.get("triple", "drift"), t.dim, "drift") : Vec{};
  t.gaussian = parse_spherical(s, "gaussian", t.dim);

  const std::string coupling = s.get_or("triple", "jump.coupling", "product");
  if (coupling == "atomlist") {
    AtomListLaw law;
    for (const auto& e : parse_entries(s.get_or("triple", "jump.atoms", ""), 3, "jump.atoms"))
      law.half_atoms.push_back({Direction::normalized(parse_vector(e[0], t.dim, "jump.atoms"), t.dim),
                                parse_number(e[1], "jump.atoms"), parse_number(e[2], "jump.atoms")});
    t.jump = JumpMeasure(t.dim, std::move(law));
  } else if (coupling == "product") {
    ProductLaw law;
    law.directional = parse_spherical(s, "jump.directional", t.dim);
    const std::string kind = s.get_or("triple", "jump.radial.kind", "atoms");
    if (kind == "stable") {
      law.radial = StableRadial{parse_number(s.get("triple", "jump.radial.alpha"), "jump.radial.alpha"),
                                parse_number(s.get_or("triple", "jump.radial.scale", "1"), "jump.radial.scale")};
    } else if (kind == "atoms") {
      FiniteRadial fin;
      for (const auto& e : parse_entries(s.get_or("triple", "jump.radial.atoms", ""), 2, "jump.radial.atoms"))
        fin.half_atoms.push_back({parse_number(e[0], "jump.radial.atoms"), parse_number(e[1], "jump.radial.atoms")});
      law.radial = fin;
    } else if (kind == "bandtable") {
      BandTableRadial tab;
      tab.nu0 = parse_number(s.get_or("triple", "jump.radial.nu0", "0"), "jump.radial.nu0");
      tab.bands = parse_numbers(s.get("triple", "jump.radial.table"), "jump.radial.table");
      const std::string cont = s.get_or("triple", "jump.radial.continuation", "geometric");
      require(cont == "geometric" || cont == "zero", ErrorKind::Config,
              "jump.radial.continuation must be 'geometric' or 'zero' (got '", cont, "')");
      tab.continuation = cont == "zero" ? Continuation::Zero : Continuation::Geometric;
      law.radial = tab;
    } else {
      fail(ErrorKind::Config, "jump.radial.kind must be stable, atoms or bandtable (got '", kind, "')");
    }
    t.jump = JumpMeasure(t.dim, std::move(law));
  } else {
    fail(ErrorKind::Config, "jump.coupling must be 'product' or 'atomlist' (got '", coupling, "')");
  }
  t.validate();
  check_levy_integrability(t.jump);
  return t;
}

GridSpec parse_grid(Sections& s, int dim) {
  std::vector<AxisSpec> axes;
  for (int a = 1; a <= dim; ++a) {
    const std::string key = "axis." + std::to_string(a);
    const auto parts = split(s.get("grid", key), ' ');
    std::vector<std::string> tok;
    for (const auto& p : parts)
      if (!p.empty()) tok.push_back(p);
    require(tok.size() == 3, ErrorKind::Config, "grid key '", key, "' must be 'min max count'");
    const long long count = parse_integer(tok[2], key);
    require(count >= 1 && count <= (1LL << 26), ErrorKind::Config, "grid key '", key, "': bad point count");
    axes.push_back({parse_number(tok[0], key), parse_number(tok[1], key), static_cast<int>(count)});
  }
  for (const auto& k : s.keys("grid")) {
    bool ok = false;
    for (int a = 1; a <= dim; ++a) ok = ok || k == "axis." + std::to_string(a);
    require(ok, ErrorKind::Config, "unknown key '", k, "' in section [grid] for dimension ", dim);
  }
  return GridSpec(std::move(axes));
}

int default_k_max(const GridSpec& g) {
  double h = g.min_spacing();
  if (!std::isfinite(h)) return 2;
  return static_cast<int>(std::floor(std::log2(1.0 / h) + 1e-9)) - 2;
}

}  // namespace

std::string serialize_triple(const CharTriple& t) {
  std::string out = "[triple]\n";
  out += "dim = " + std::to_string(t.dim) + "\n";
  out += "drift = " + join_vec(t.drift, t.dim) + "\n";
  out += serialize_spherical(t.gaussian, "gaussian");
  if (t.jump.is_product()) {
    const auto& law = t.jump.product();
    out += "jump.coupling = product\n";
    out += serialize_spherical(law.directional, "jump.directional");
    if (const auto* st = std::get_if<StableRadial>(&law.radial)) {
      out += "jump.radial.kind = stable\n";
      out += "jump.radial.alpha = " + format_double(st->alpha) + "\n";
      out += "jump.radial.scale = " + format_double(st->scale) + "\n";
    } else if (const auto* fin = std::get_if<FiniteRadial>(&law.radial)) {
      out += "jump.radial.kind = atoms\njump.radial.atoms =";
      bool first = true;
      for (const auto& a : fin->half_atoms) {
        out += first ? " " : " ; ";
        first = false;
        out += format_double(a.x) + " : " + format_double(a.weight);
      }
      out += "\n";
    } else {
      const auto& tab = std::get<BandTableRadial>(law.radial);
      out += "jump.radial.kind = bandtable\n";
      out += "jump.radial.nu0 = " + format_double(tab.nu0) + "\n";
      out += "jump.radial.table =";
      for (double v : tab.bands) out += " " + format_double(v);
      out += "\njump.radial.continuation = ";
      out += tab.continuation == Continuation::Zero ? "zero\n" : "geometric\n";
    }
  } else {
    out += "jump.coupling = atomlist\njump.atoms =";
    bool first = true;
    for (const auto& a : t.jump.atom_list().half_atoms) {
      out += first ? " " : " ; ";
      first = false;
      out += join_vec(a.s.coords(), t.dim) + " : " + format_double(a.x) + " : " + format_double(a.weight);
    }
    out += "\n";
  }
  return out;
}

std::string triple_fingerprint(const CharTriple& triple) { return fnv1a_hex(serialize_triple(triple)); }

ExperimentConfig parse_config(const std::string& text) {
  Sections s(text);
  ExperimentConfig c;
  c.triple = parse_triple(s);
  c.grid = parse_grid(s, c.triple.dim);

  c.sim.A = parse_number(s.get("sim", "A"), "A");
  require(c.sim.A > 0.0, ErrorKind::Config, "A must be positive");
  const long long J = parse_integer(s.get("sim", "J_trunc"), "J_trunc");
  require(J >= 1 && J <= 60, ErrorKind::Config, "J_trunc must lie in [1, 60] (got ", J, ")");
  c.sim.J_trunc = static_cast<int>(J);
  c.sim.seed = parse_seed(s.get("sim", "seed"));
  c.sim.replicas = static_cast<int>(parse_integer(s.get_or("sim", "replicas", "1000"), "replicas"));
  require(c.sim.replicas >= 1, ErrorKind::Config, "replicas must be positive");
  const long long cap = parse_integer(s.get_or("sim", "cholesky_cap", "4096"), "cholesky_cap");
  require(cap >= 1, ErrorKind::Config, "cholesky_cap must be positive");
  c.sim.cholesky_cap = static_cast<std::size_t>(cap);
  require(c.grid.max_norm() <= c.sim.A, ErrorKind::Config, "grid does not fit in the ball of radius A = ", c.sim.A,
          " (farthest corner at ", c.grid.max_norm(), ")");

  auto& an = c.analysis;
  an.k_min = static_cast<int>(parse_integer(s.get_or("analysis", "k_min", "2"), "k_min"));
  an.k_max = static_cast<int>(
      parse_integer(s.get_or("analysis", "k_max", std::to_string(default_k_max(c.grid))), "k_max"));
  an.h_max = parse_number(s.get_or("analysis", "h_max", "2"), "h_max");
  an.delta_h = parse_number(s.get_or("analysis", "delta_h", "0.1"), "delta_h");
  require(an.delta_h > 0.0 && an.h_max > 0.0, ErrorKind::Config, "h_max and delta_h must be positive");
  an.bins = static_cast<int>(parse_integer(
      s.get_or("analysis", "bins", std::to_string(static_cast<int>(std::floor(an.h_max / an.delta_h + 1e-9)) + 1)),
      "bins"));
  an.j_floor = static_cast<int>(
      parse_integer(s.get_or("analysis", "j_floor", std::to_string(std::max(1, c.sim.J_trunc - 8))), "j_floor"));
  an.stride = static_cast<int>(parse_integer(s.get_or("analysis", "stride", "1"), "stride"));
  require(an.k_min >= 0 && an.bins >= 1 && an.j_floor >= 0 && an.stride >= 1, ErrorKind::Config,
          "invalid [analysis] settings");

  c.output_dir = s.get_or("outputs", "directory", "out");
  s.check_all_used();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot read config file '", path, "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::string out = serialize_triple(c.triple);
  out += "\n[grid]\n";
  for (int a = 0; a < c.grid.dim(); ++a) {
    const auto& ax = c.grid.axes()[a];
    out += "axis." + std::to_string(a + 1) + " = " + format_double(ax.min) + " " + format_double(ax.max) + " " +
           std::to_string(ax.count) + "\n";
  }
  out += "\n[sim]\n";
  out += "A = " + format_double(c.sim.A) + "\n";
  out += "J_trunc = " + std::to_string(c.sim.J_trunc) + "\n";
  out += "seed = " + std::to_string(c.sim.seed) + "\n";
  out += "replicas = " + std::to_string(c.sim.replicas) + "\n";
  out += "cholesky_cap = " + std::to_string(c.sim.cholesky_cap) + "\n";
  const auto& an = c.analysis;
  out += "\n[analysis]\n";
  out += "k_min = " + std::to_string(an.k_min) + "\n";
  out += "k_max = " + std::to_string(an.k_max) + "\n";
  out += "h_max = " + format_double(an.h_max) + "\n";
  out += "delta_h = " + format_double(an.delta_h) + "\n";
  out += "bins = " + std::to_string(an.bins) + "\n";
  out += "j_floor = " + std::to_string(an.j_floor) + "\n";
  out += "stride = " + std::to_string(an.stride) + "\n";
  out += "\n[outputs]\ndirectory = " + c.output_dir + "\n";
  return out;
}

}  // namespace levyfield
