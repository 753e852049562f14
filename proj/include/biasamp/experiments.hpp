#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "biasamp/simulator.hpp"

namespace biasamp {

enum class SpectrumKind { Isotropic, Diatomic, PowerLaw };
const char* to_string(SpectrumKind k);

// Flat key-value sweep description; see docs/config.md for the schema.
struct SweepConfig {
  std::string scenario = "custom";
  ModelFamily family = ModelFamily::RandomProjection;

  SpectrumKind spectrum = SpectrumKind::Isotropic;
  double a1 = 1, a2 = 1, b2 = 0.2, pi = 0.5;
  double beta1 = 2, beta2 = 1, alpha = 1;
  double theta_scale = 1, delta_scale = 0;

  double p1 = 0.5;
  double sigma1_sq = 1, sigma2_sq = 1;

  // grid axes; c (noise ratio sigma2^2/sigma1^2) overrides sigma2_sq when nonempty
  std::vector<double> phi, psi, lambda, c;

  long n = 400;
  long replicates = 25;
  std::uint64_t seed = 1;
  bool nested = false;
  bool theory_only = false;
  int threads = 0;

  std::string output_csv = "sweep.csv";
  std::string output_svg;  // empty: no plot
  std::string plot_x = "psi";
  std::vector<std::string> plot_y = {"ODD", "EDD"};
  std::string plot_group_by = "phi";
  bool plot_log_x = true;

  SolverSettings solver;

  bool operator==(const SweepConfig& o) const;
  void validate() const;
  std::size_t grid_size() const;
  JointSpectrum build_spectrum(long d) const;
};

const std::vector<std::string>& scenario_names();
SweepConfig preset(std::string_view scenario);
// Unknown keys, wrong types and invalid values are errors.
SweepConfig parse_config(std::string_view json_text);
SweepConfig load_config(const std::string& path);
std::string emit_config(const SweepConfig& cfg);
// Apply a JSON object of overrides on top of cfg (same schema).
void merge_config(SweepConfig& cfg, std::string_view json_fragment);

struct SweepRow {
  // requested coordinates, then realized sizes
  double phi = 0, psi = 0, gamma = 0, lambda = 0, c = 0;
  long d = 0, m = 0;
  double phi_eff = 0, psi_eff = 0, gamma_eff = 0;

  double r1j, r2j, r1s, r2s;  // theory, NaN on failure
  BiasAmpMetrics theory;
  bool theory_ok = false;

  bool has_mc = false;
  MonteCarloReport mc;

  double residual = 0;
  int iters = 0;
  std::vector<std::string> flags;

  bool nonconvergent() const;
};

struct SweepResult {
  std::string scenario;
  ModelFamily family = ModelFamily::RandomProjection;
  std::vector<SweepRow> rows;

  long flagged_nonconvergent() const;
};

SweepResult run_sweep(const SweepConfig& cfg);
// Theory for a single grid point, exactly as run_sweep computes it.
SweepRow evaluate_theory(const SweepConfig& cfg, double phi, double psi, double lambda, double c);

// Plain string table; the CSV is this table verbatim.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  long column_index(const std::string& name) const;  // -1 if absent
  std::vector<double> numeric_column(const std::string& name) const;
};

std::vector<std::string> csv_columns(const std::string& scenario);
std::string format_number(double x);  // 17 significant digits
Table to_table(const SweepResult& r);
void emit_csv(const SweepResult& r, const std::string& path);
void write_csv(const Table& t, const std::string& path);
Table read_csv(const std::string& path);

struct PlotSpec {
  std::string x = "psi";
  std::vector<std::string> y = {"ODD", "EDD"};
  std::string group_by;  // optional: one line per distinct value
  bool log_x = false;
  bool log_y = false;
  std::string title;
};

std::string render_svg(const Table& t, const PlotSpec& spec);
void emit_svg(const Table& t, const std::string& path, const PlotSpec& spec);
void emit_svg(const SweepResult& r, const std::string& path, const PlotSpec& spec);

}  // namespace biasamp
