#include "io.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "config.hpp"

namespace levyfield {

using nlohmann::json;

const char* tag_name(ComponentTag tag) {
  switch (tag) {
    case ComponentTag::Gaussian: return "gaussian";
    case ComponentTag::Jump: return "jump";
    case ComponentTag::Drift: return "drift";
    case ComponentTag::Combined: return "combined";
  }
  return "combined";
}

ComponentTag parse_tag(const std::string& name) {
  if (name == "gaussian") return ComponentTag::Gaussian;
  if (name == "jump") return ComponentTag::Jump;
  if (name == "drift") return ComponentTag::Drift;
  if (name == "combined") return ComponentTag::Combined;
  fail(ErrorKind::Argument, "unknown component tag '", name, "'");
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write '", path, "'");
  out << text;
  require(static_cast<bool>(out), ErrorKind::Io, "failed writing '", path, "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot read '", path, "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec && std::filesystem::is_directory(dir), ErrorKind::Io, "cannot create directory '", dir, "'");
}

std::string sidecar_path(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".json");
  return p.string();
}

namespace {

json grid_json(const GridSpec& g) {
  json axes = json::array();
  for (const auto& ax : g.axes()) axes.push_back({{"min", ax.min}, {"max", ax.max}, {"count", ax.count}});
  return {{"dim", g.dim()}, {"axes", axes}};
}

GridSpec grid_from_json(const json& j) {
  std::vector<AxisSpec> axes;
  for (const auto& a : j.at("axes")) axes.push_back({a.at("min").get<double>(), a.at("max").get<double>(), a.at("count").get<int>()});
  return GridSpec(std::move(axes));
}

json parse_json(const std::string& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    fail(ErrorKind::Io, "malformed JSON in '", path, "': ", e.what());
  }
}

std::vector<std::vector<double>> read_csv_numbers(const std::string& path, std::size_t columns) {
  std::istringstream in(read_text_file(path));
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::Io, "'", path, "' is empty");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      char* end = nullptr;
      row.push_back(std::strtod(cell.c_str(), &end));
      require(end && *end == '\0' && !cell.empty(), ErrorKind::Io, "'", path, "': bad number '", cell, "'");
    }
    require(row.size() == columns, ErrorKind::Io, "'", path, "': expected ", columns, " columns");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void write_sample(const std::string& csv_path, const FieldSample& sample) {
  const GridSpec& g = sample.grid;
  std::string out;
  for (int a = 0; a < g.dim(); ++a) out += "t_" + std::to_string(a + 1) + ",";
  out += "value\n";
  for (std::size_t f = 0; f < g.size(); ++f) {
    const Vec p = g.point(f);
    for (int a = 0; a < g.dim(); ++a) out += format_double(p[a]) + ",";
    out += format_double(sample.values[f]) + "\n";
  }
  write_text_file(csv_path, out);
  const json meta = {{"component_tag", tag_name(sample.tag)},
                     {"seed", sample.seed},
                     {"triple_fingerprint", sample.triple_fingerprint},
                     {"grid", grid_json(g)}};
  write_text_file(sidecar_path(csv_path), meta.dump(2) + "\n");
}

FieldSample read_sample(const std::string& csv_path) {
  const json meta = parse_json(sidecar_path(csv_path));
  FieldSample s;
  try {
    s.grid = grid_from_json(meta.at("grid"));
    s.tag = parse_tag(meta.at("component_tag").get<std::string>());
    s.seed = meta.at("seed").get<std::uint64_t>();
    s.triple_fingerprint = meta.at("triple_fingerprint").get<std::string>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Io, "sample sidecar '", sidecar_path(csv_path), "' is incomplete: ", e.what());
  }
  const int d = s.grid.dim();
  const auto rows = read_csv_numbers(csv_path, d + 1);
  require(rows.size() == s.grid.size(), ErrorKind::Io, "'", csv_path, "' has ", rows.size(), " rows, expected ",
          s.grid.size());
  s.values.resize(rows.size());
  for (std::size_t f = 0; f < rows.size(); ++f) {
    const Vec p = s.grid.point(f);
    for (int a = 0; a < d; ++a)
      require(rows[f][a] == p[a], ErrorKind::Io, "'", csv_path, "': row ", f + 1, " does not match the grid");
    s.values[f] = rows[f][d];
  }
  return s;
}

void write_atoms(const std::string& csv_path, const AtomSet& atoms, const std::string& triple_fingerprint) {
  std::string out = "band,rho,";
  for (int a = 0; a < atoms.dim; ++a) out += "s_" + std::to_string(a + 1) + ",";
  out += "x\n";
  for (const auto& band : atoms.bands)
    for (const auto& at : band) {
      out += std::to_string(at.band) + "," + format_double(at.rho) + ",";
      for (int a = 0; a < atoms.dim; ++a) out += format_double(at.s[a]) + ",";
      out += format_double(at.x) + "\n";
    }
  write_text_file(csv_path, out);
  const json meta = {{"A", atoms.A},
                     {"J_trunc", atoms.J_trunc},
                     {"seed", atoms.seed},
                     {"dim", atoms.dim},
                     {"fingerprint", atoms.fingerprint},
                     {"triple_fingerprint", triple_fingerprint},
                     {"count", atoms.size()}};
  write_text_file(sidecar_path(csv_path), meta.dump(2) + "\n");
}

AtomSet read_atoms(const std::string& csv_path, std::string* triple_fingerprint) {
  const json meta = parse_json(sidecar_path(csv_path));
  AtomSet set;
  try {
    set.A = meta.at("A").get<double>();
    set.J_trunc = meta.at("J_trunc").get<int>();
    set.seed = meta.at("seed").get<std::uint64_t>();
    set.dim = meta.at("dim").get<int>();
    set.fingerprint = meta.at("fingerprint").get<std::string>();
    if (triple_fingerprint) *triple_fingerprint = meta.at("triple_fingerprint").get<std::string>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Io, "atom sidecar '", sidecar_path(csv_path), "' is incomplete: ", e.what());
  }
  check_dim(set.dim);
  require(set.J_trunc >= 0, ErrorKind::Io, "atom sidecar has a negative J_trunc");
  set.bands.resize(set.J_trunc + 1);
  for (const auto& row : read_csv_numbers(csv_path, set.dim + 3)) {
    HyperplaneAtom a;
    a.band = static_cast<int>(row[0]);
    a.rho = row[1];
    Vec s{};
    for (int i = 0; i < set.dim; ++i) s[i] = row[2 + i];
    a.s = Direction::normalized(s, set.dim);
    a.x = row[2 + set.dim];
    require(a.band >= 0 && a.band <= set.J_trunc && band_index(a.x) == a.band, ErrorKind::Io, "'", csv_path,
            "': atom with x = ", a.x, " is filed under band ", a.band);
    set.bands[a.band].push_back(a);
  }
  return set;
}

}  // namespace levyfield
