#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <new>

#include "biasamp/biasamp.h"
#include "biasamp/experiments.hpp"

struct ba_spectrum {
  biasamp::JointSpectrum sp;
};

struct ba_config {
  biasamp::SweepConfig cfg;
};

struct ba_sweep {
  biasamp::SweepResult result;
  biasamp::Table table;
};

namespace {

thread_local std::string g_last_error;

struct LogCb {
  void (*cb)(const char*, void*) = nullptr;
  void* user = nullptr;
};

ba_status map_code(biasamp::ErrorCode c) {
  switch (c) {
    case biasamp::ErrorCode::InvalidArgument:
      return BA_ERR_INVALID_ARGUMENT;
    case biasamp::ErrorCode::NoConvergence:
      return BA_ERR_NO_CONVERGENCE;
    case biasamp::ErrorCode::Singular:
      return BA_ERR_SINGULAR;
    case biasamp::ErrorCode::Io:
      return BA_ERR_IO;
    case biasamp::ErrorCode::Parse:
      return BA_ERR_PARSE;
    case biasamp::ErrorCode::Undefined:
      return BA_ERR_UNDEFINED;
  }
  return BA_ERR_INTERNAL;
}

template <class F>
ba_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return BA_OK;
  } catch (const biasamp::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return BA_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BA_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return BA_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) biasamp::fail(biasamp::ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

biasamp::SolverSettings settings(const ba_solver_settings* st) {
  biasamp::SolverSettings s;
  if (st) {
    s.tol = st->tol;
    s.max_iter = st->max_iter;
    s.damping = st->damping;
    s.lambda_floor = st->lambda_floor;
  }
  s.validate();
  return s;
}

biasamp::ScalingRegime regime(const ba_regime* rg) {
  need(rg, "regime");
  return biasamp::ScalingRegime::from_rates(rg->p1, rg->phi, rg->gamma);
}

void put(const biasamp::RiskDecomposition& r, ba_risk* out) {
  out->bias = r.bias;
  out->variance = r.variance;
  out->total = r.total;
  out->residual = r.residual;
  out->iters = r.iters;
  out->boundary = r.boundary ? 1 : 0;
}

template <class Make>
ba_status make_spectrum(ba_spectrum** out, Make&& mk) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    *out = new ba_spectrum{mk()};
  });
}

biasamp::PlotSpec plot_spec(const ba_plot_spec* s) {
  need(s, "plot spec");
  need(s->x, "plot spec x");
  biasamp::PlotSpec p;
  p.x = s->x;
  p.y.clear();
  for (size_t i = 0; i < s->ny; ++i) {
    need(s->y[i], "plot spec y entry");
    p.y.emplace_back(s->y[i]);
  }
  p.group_by = s->group_by ? s->group_by : "";
  p.log_x = s->log_x != 0;
  p.log_y = s->log_y != 0;
  p.title = s->title ? s->title : "";
  return p;
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

const char* ba_version(void) { return "1.0.0"; }

const char* ba_status_name(ba_status s) {
  switch (s) {
    case BA_OK:
      return "ok";
    case BA_ERR_INVALID_ARGUMENT:
      return "invalid-argument";
    case BA_ERR_NO_CONVERGENCE:
      return "no-convergence";
    case BA_ERR_SINGULAR:
      return "singular";
    case BA_ERR_IO:
      return "io";
    case BA_ERR_PARSE:
      return "parse";
    case BA_ERR_UNDEFINED:
      return "undefined";
    case BA_ERR_INTERNAL:
      return "internal";
  }
  return "unknown";
}

const char* ba_last_error(void) { return g_last_error.c_str(); }

void ba_set_log_callback(void (*cb)(const char*, void*), void* user) {
  if (!cb) {
    biasamp::set_log_sink([](const std::string& m) { std::fprintf(stderr, "warning: %s\n", m.c_str()); });
    return;
  }
  biasamp::set_log_sink([cb, user](const std::string& m) { cb(m.c_str(), user); });
}

ba_status ba_spectrum_isotropic(long d, double a1, double a2, double theta, double delta, ba_spectrum** out) {
  return make_spectrum(out, [&] { return biasamp::make_isotropic(d, a1, a2, theta, delta); });
}

ba_status ba_spectrum_diatomic(long d, double pi_frac, double a1, double a2, double b2, double theta, double delta,
                               ba_spectrum** out) {
  return make_spectrum(out, [&] { return biasamp::make_diatomic(d, pi_frac, a1, a2, b2, theta, delta); });
}

ba_status ba_spectrum_power_law(long d, double beta1, double beta2, double alpha, double theta, ba_spectrum** out) {
  return make_spectrum(out, [&] { return biasamp::make_power_law(d, beta1, beta2, alpha, theta); });
}

ba_status ba_spectrum_from_arrays(size_t d, const double* s1, const double* s2, const double* th, const double* de,
                                  ba_spectrum** out) {
  return make_spectrum(out, [&] {
    need(s1, "sigma1");
    need(s2, "sigma2");
    need(th, "theta");
    need(de, "delta");
    return biasamp::JointSpectrum(std::vector<double>(s1, s1 + d), std::vector<double>(s2, s2 + d),
                                  std::vector<double>(th, th + d), std::vector<double>(de, de + d));
  });
}

void ba_spectrum_free(ba_spectrum* s) { delete s; }
size_t ba_spectrum_dim(const ba_spectrum* s) { return s ? s->sp.dim() : 0; }
long ba_spectrum_core_size(const ba_spectrum* s) { return s ? s->sp.core_size() : -1; }

ba_status ba_spectrum_dof(const ba_spectrum* s, int group, int a, int b, double t, double* out) {
  return guard([&] {
    need(s, "spectrum");
    need(out, "out");
    *out = biasamp::dof(s->sp, group, a, b, t);
  });
}

void ba_solver_settings_default(ba_solver_settings* st) {
  if (!st) return;
  const biasamp::SolverSettings d;
  st->tol = d.tol;
  st->max_iter = d.max_iter;
  st->damping = d.damping;
  st->lambda_floor = d.lambda_floor;
}

ba_status ba_rp_joint_risk(const ba_spectrum* s, const ba_regime* rg, double lambda, double sigma1_sq,
                           double sigma2_sq, int group, const ba_solver_settings* st, ba_risk* out) {
  return guard([&] {
    need(s, "spectrum");
    need(out, "out");
    put(biasamp::rp_joint_risk(s->sp, regime(rg), lambda, sigma1_sq, sigma2_sq, group, settings(st)), out);
  });
}

ba_status ba_rp_separate_risk(const ba_spectrum* s, int group, double phi_s, double gamma, double lambda_s,
                              double sigma_s_sq, const ba_solver_settings* st, ba_risk* out) {
  return guard([&] {
    need(s, "spectrum");
    need(out, "out");
    put(biasamp::rp_separate_risk(s->sp, group, phi_s, gamma, lambda_s, sigma_s_sq, settings(st)), out);
  });
}

ba_status ba_rp_separate_risk_unregularized(const ba_spectrum* s, int group, double psi_s, double gamma,
                                            double sigma_s_sq, const ba_solver_settings* st, ba_risk* out) {
  return guard([&] {
    need(s, "spectrum");
    need(out, "out");
    put(biasamp::rp_separate_risk_unregularized(s->sp, group, psi_s, gamma, sigma_s_sq, settings(st)), out);
  });
}

ba_status ba_classical_joint_risk(const ba_spectrum* s, const ba_regime* rg, double lambda, double sigma1_sq,
                                  double sigma2_sq, int group, const ba_solver_settings* st, ba_risk* out) {
  return guard([&] {
    need(s, "spectrum");
    need(out, "out");
    put(biasamp::classical_joint_risk(s->sp, regime(rg), lambda, sigma1_sq, sigma2_sq, group, settings(st)), out);
  });
}

ba_status ba_classical_separate_risk(const ba_spectrum* s, int group, double phi_s, double lambda_s,
                                     double sigma_s_sq, const ba_solver_settings* st, ba_risk* out) {
  return guard([&] {
    need(s, "spectrum");
    need(out, "out");
    put(biasamp::classical_separate_risk(s->sp, group, phi_s, lambda_s, sigma_s_sq, settings(st)), out);
  });
}

ba_status ba_compute_metrics(double r1j, double r2j, double r1s, double r2s, ba_metrics* out) {
  return guard([&] {
    need(out, "out");
    const auto m = biasamp::metrics(r1j, r2j, r1s, r2s);
    *out = {m.odd, m.edd, m.add, m.add_defined ? 1 : 0, m.signed_odd, m.signed_edd};
  });
}

ba_status ba_power_law_limits(double c, double phi, double sigma1_sq, double* odd, double* edd, double* add) {
  return guard([&] {
    need(odd, "odd");
    need(edd, "edd");
    need(add, "add");
    const auto l = biasamp::power_law_limits(c, phi, sigma1_sq);
    *odd = l.odd;
    *edd = l.edd;
    *add = l.add;
  });
}

ba_status ba_solve_mp(double gamma, double lambda, double* m) {
  return guard([&] {
    need(m, "m");
    *m = biasamp::solve_mp(gamma, lambda).m;
  });
}

ba_status ba_mp_empirical_trace(long d, double gamma, double lambda, uint64_t seed, double* out) {
  return guard([&] {
    need(out, "out");
    *out = biasamp::mp_empirical_trace(d, gamma, lambda, seed);
  });
}

size_t ba_scenario_count(void) { return biasamp::scenario_names().size(); }

const char* ba_scenario_name(size_t i) {
  const auto& n = biasamp::scenario_names();
  return i < n.size() ? n[i].c_str() : nullptr;
}

ba_status ba_config_preset(const char* scenario, ba_config** out) {
  return guard([&] {
    need(scenario, "scenario");
    need(out, "out");
    *out = nullptr;
    *out = new ba_config{biasamp::preset(scenario)};
  });
}

ba_status ba_config_load(const char* path, ba_config** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    *out = new ba_config{biasamp::load_config(path)};
  });
}

ba_status ba_config_parse(const char* json, ba_config** out) {
  return guard([&] {
    need(json, "json");
    need(out, "out");
    *out = nullptr;
    *out = new ba_config{biasamp::parse_config(json)};
  });
}

ba_status ba_config_merge(ba_config* cfg, const char* fragment) {
  return guard([&] {
    need(cfg, "config");
    need(fragment, "fragment");
    biasamp::merge_config(cfg->cfg, fragment);
  });
}

ba_status ba_config_to_json(const ba_config* cfg, char** out) {
  return guard([&] {
    need(cfg, "config");
    need(out, "out");
    *out = dup(biasamp::emit_config(cfg->cfg));
  });
}

const char* ba_config_output_csv(const ba_config* cfg) { return cfg ? cfg->cfg.output_csv.c_str() : nullptr; }
const char* ba_config_output_svg(const ba_config* cfg) { return cfg ? cfg->cfg.output_svg.c_str() : nullptr; }
void ba_config_free(ba_config* cfg) { delete cfg; }
void ba_string_free(char* s) { std::free(s); }

ba_status ba_sweep_run(const ba_config* cfg, ba_sweep** out) {
  return guard([&] {
    need(cfg, "config");
    need(out, "out");
    *out = nullptr;
    auto* sw = new ba_sweep{biasamp::run_sweep(cfg->cfg), {}};
    sw->table = biasamp::to_table(sw->result);
    *out = sw;
  });
}

void ba_sweep_free(ba_sweep* sw) { delete sw; }
size_t ba_sweep_rows(const ba_sweep* sw) { return sw ? sw->result.rows.size() : 0; }
long ba_sweep_flagged(const ba_sweep* sw) { return sw ? sw->result.flagged_nonconvergent() : 0; }

ba_status ba_sweep_value(const ba_sweep* sw, size_t row, const char* column, double* out) {
  return guard([&] {
    need(sw, "sweep");
    need(column, "column");
    need(out, "out");
    if (row >= sw->table.rows.size()) biasamp::fail(biasamp::ErrorCode::InvalidArgument, "row out of range");
    *out = sw->table.numeric_column(column)[row];
  });
}

ba_status ba_sweep_flags(const ba_sweep* sw, size_t row, const char** out) {
  return guard([&] {
    need(sw, "sweep");
    need(out, "out");
    if (row >= sw->table.rows.size()) biasamp::fail(biasamp::ErrorCode::InvalidArgument, "row out of range");
    *out = sw->table.rows[row].back().c_str();
  });
}

ba_status ba_sweep_write_csv(const ba_sweep* sw, const char* path) {
  return guard([&] {
    need(sw, "sweep");
    need(path, "path");
    biasamp::write_csv(sw->table, path);
  });
}

ba_status ba_sweep_write_svg(const ba_sweep* sw, const char* path, const ba_plot_spec* spec) {
  return guard([&] {
    need(sw, "sweep");
    need(path, "path");
    biasamp::emit_svg(sw->table, path, plot_spec(spec));
  });
}

ba_status ba_sweep_write_config_svg(const ba_sweep* sw, const ba_config* cfg, const char* path) {
  return guard([&] {
    need(sw, "sweep");
    need(cfg, "config");
    need(path, "path");
    biasamp::PlotSpec p;
    p.x = cfg->cfg.plot_x;
    p.y = cfg->cfg.plot_y;
    p.group_by = cfg->cfg.plot_group_by;
    p.log_x = cfg->cfg.plot_log_x;
    p.title = cfg->cfg.scenario;
    biasamp::emit_svg(sw->table, path, p);
  });
}

ba_status ba_plot_csv(const char* csv_path, const char* svg_path, const ba_plot_spec* spec) {
  return guard([&] {
    need(csv_path, "csv path");
    need(svg_path, "svg path");
    biasamp::emit_svg(biasamp::read_csv(csv_path), svg_path, plot_spec(spec));
  });
}

}  // extern "C"
