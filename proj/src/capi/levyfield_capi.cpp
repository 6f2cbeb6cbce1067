#include "levyfield/levyfield.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "../core/config.hpp"
#include "../core/experiment.hpp"

struct lf_config {
  levyfield::ExperimentConfig cfg;
};

struct lf_field {
  levyfield::FieldSample sample;
};

namespace {

thread_local std::string g_last_error;

lf_status status_of(levyfield::ErrorKind kind) {
  switch (kind) {
    case levyfield::ErrorKind::Config: return LF_ERR_CONFIG;
    case levyfield::ErrorKind::Numeric: return LF_ERR_NUMERIC;
    case levyfield::ErrorKind::Fingerprint: return LF_ERR_FINGERPRINT;
    case levyfield::ErrorKind::Argument: return LF_ERR_ARGUMENT;
    case levyfield::ErrorKind::Io: return LF_ERR_IO;
  }
  return LF_ERR_INTERNAL;
}

template <typename Fn>
lf_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return LF_OK;
  } catch (const levyfield::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return LF_ERR_INTERNAL;
}

void require_arg(const void* p, const char* name) {
  levyfield::require(p != nullptr, levyfield::ErrorKind::Argument, name, " must not be NULL");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

levyfield::Which which_of(lf_component c) {
  switch (c) {
    case LF_COMPONENT_GAUSSIAN: return levyfield::Which::Gaussian;
    case LF_COMPONENT_JUMP: return levyfield::Which::Jump;
    case LF_COMPONENT_COMBINED: return levyfield::Which::Combined;
  }
  levyfield::fail(levyfield::ErrorKind::Argument, "unknown component ", static_cast<int>(c));
}

levyfield::Vec vec_of(const double* v, int dim) {
  levyfield::Vec out{};
  for (int i = 0; i < dim; ++i) out[i] = v[i];
  return out;
}

}  // namespace

extern "C" {

const char* lf_version(void) { return "1.0.0"; }

const char* lf_last_error_message(void) { return g_last_error.c_str(); }

void lf_string_free(char* s) { std::free(s); }

lf_status lf_config_load(const char* path, lf_config** out) {
  return guarded([&] {
    require_arg(path, "path");
    require_arg(out, "out");
    *out = new lf_config{levyfield::load_config(path)};
  });
}

lf_status lf_config_parse(const char* text, lf_config** out) {
  return guarded([&] {
    require_arg(text, "text");
    require_arg(out, "out");
    *out = new lf_config{levyfield::parse_config(text)};
  });
}

void lf_config_free(lf_config* cfg) { delete cfg; }

lf_status lf_config_to_string(const lf_config* cfg, char** out) {
  return guarded([&] {
    require_arg(cfg, "cfg");
    require_arg(out, "out");
    *out = copy_string(levyfield::serialize_config(cfg->cfg));
  });
}

lf_status lf_config_set_seed(lf_config* cfg, uint64_t seed) {
  return guarded([&] {
    require_arg(cfg, "cfg");
    cfg->cfg.sim.seed = seed;
  });
}

lf_status lf_config_fingerprint(const lf_config* cfg, char** out) {
  return guarded([&] {
    require_arg(cfg, "cfg");
    require_arg(out, "out");
    *out = copy_string(levyfield::triple_fingerprint(cfg->cfg.triple));
  });
}

lf_status lf_config_dim(const lf_config* cfg, int* out) {
  return guarded([&] {
    require_arg(cfg, "cfg");
    require_arg(out, "out");
    *out = cfg->cfg.triple.dim;
  });
}

lf_status lf_config_output_dir(const lf_config* cfg, char** out) {
  return guarded([&] {
    require_arg(cfg, "cfg");
    require_arg(out, "out");
    *out = copy_string(cfg->cfg.output_dir);
  });
}

lf_status lf_index_beta(const lf_config* cfg, double* out) {
  return guarded([&] {
    require_arg(cfg, "cfg");
    require_arg(out, "out");
    *out = levyfield::index_beta(cfg->cfg.triple.jump);
  });
}

lf_status lf_band_mass(const lf_config* cfg, int j, double* out) {
  return guarded([&] {
    require_arg(cfg, "cfg");
    require_arg(out, "out");
    *out = levyfield::band_mass(cfg->cfg.triple.jump, j);
  });
}

lf_status lf_admissibility_chi(const lf_config* cfg, int j_max, double* partial_sum, int* converged) {
  return guarded([&] {
    require_arg(cfg, "cfg");
    require_arg(partial_sum, "partial_sum");
    require_arg(converged, "converged");
    const auto r = levyfield::admissibility_chi(cfg->cfg.triple.jump, j_max);
    *partial_sum = r.partial_sum;
    *converged = r.converged ? 1 : 0;
  });
}

lf_status lf_gauge_exponent(const lf_config* cfg, double s, double b, double* out) {
  return guarded([&] {
    require_arg(cfg, "cfg");
    require_arg(out, "out");
    *out = levyfield::gauge_exponent(cfg->cfg.triple.jump, {s, b});
  });
}

lf_status lf_theoretical_spectrum(const lf_config* cfg, double h, double* out) {
  return guarded([&] {
    require_arg(cfg, "cfg");
    require_arg(out, "out");
    *out = levyfield::theoretical_spectrum(cfg->cfg.triple, h);
  });
}

lf_status lf_run_simulate(const lf_config* cfg, lf_component which, const char* out_dir) {
  return guarded([&] {
    require_arg(cfg, "cfg");
    require_arg(out_dir, "out_dir");
    levyfield::run_simulate(cfg->cfg, which_of(which), out_dir);
  });
}

lf_status lf_run_analyze(const lf_config* cfg, const char* sample_csv, const char* atoms_csv, const char* out_dir) {
  return guarded([&] {
    require_arg(cfg, "cfg");
    require_arg(sample_csv, "sample_csv");
    require_arg(out_dir, "out_dir");
    levyfield::run_analyze(cfg->cfg, sample_csv, atoms_csv ? atoms_csv : "", out_dir);
  });
}

lf_status lf_run_trace(const lf_config* cfg, const double* basis, int n_vectors, const char* out_dir) {
  return guarded([&] {
    require_arg(cfg, "cfg");
    require_arg(basis, "basis");
    require_arg(out_dir, "out_dir");
    const int d = cfg->cfg.triple.dim;
    levyfield::require(n_vectors >= 1 && n_vectors <= d, levyfield::ErrorKind::Argument,
                       "trace basis must have between 1 and ", d, " vectors");
    std::vector<levyfield::Vec> b;
    for (int i = 0; i < n_vectors; ++i) b.push_back(vec_of(basis + static_cast<std::ptrdiff_t>(i) * d, d));
    levyfield::run_trace(cfg->cfg, b, out_dir);
  });
}

lf_status lf_run_validate_cf(const lf_config* cfg, const double* t, const double* thetas, size_t n_thetas,
                             const char* out_dir) {
  return guarded([&] {
    require_arg(cfg, "cfg");
    require_arg(t, "t");
    require_arg(out_dir, "out_dir");
    if (n_thetas > 0) require_arg(thetas, "thetas");
    levyfield::run_validate_cf(cfg->cfg, vec_of(t, cfg->cfg.triple.dim),
                               std::vector<double>(thetas, thetas + n_thetas), out_dir);
  });
}

lf_status lf_run_report(const lf_config* cfg, const char* out_dir) {
  return guarded([&] {
    require_arg(cfg, "cfg");
    require_arg(out_dir, "out_dir");
    levyfield::run_report(cfg->cfg, out_dir);
  });
}

lf_status lf_field_simulate(const lf_config* cfg, lf_component which, lf_field** out) {
  return guarded([&] {
    require_arg(cfg, "cfg");
    require_arg(out, "out");
    *out = new lf_field{levyfield::simulate(cfg->cfg, which_of(which)).sample};
  });
}

void lf_field_free(lf_field* field) { delete field; }

lf_status lf_field_size(const lf_field* field, size_t* out) {
  return guarded([&] {
    require_arg(field, "field");
    require_arg(out, "out");
    *out = field->sample.values.size();
  });
}

lf_status lf_field_values(const lf_field* field, const double** out) {
  return guarded([&] {
    require_arg(field, "field");
    require_arg(out, "out");
    *out = field->sample.values.data();
  });
}

}  // extern "C"
