/* C interface to the bias-amplification theory engine, simulator and sweep harness.
 * Every fallible call returns ba_status; on failure ba_last_error() holds a message
 * for the calling thread. Handles are opaque and released with the matching _free. */
#ifndef BIASAMP_H
#define BIASAMP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define BIASAMP_API __declspec(dllexport)
#else
#define BIASAMP_API __attribute__((visibility("default")))
#endif

typedef enum ba_status {
  BA_OK = 0,
  BA_ERR_INVALID_ARGUMENT = 1,
  BA_ERR_NO_CONVERGENCE = 2,
  BA_ERR_SINGULAR = 3,
  BA_ERR_IO = 4,
  BA_ERR_PARSE = 5,
  BA_ERR_UNDEFINED = 6,
  BA_ERR_INTERNAL = 99
} ba_status;

BIASAMP_API const char* ba_version(void);
BIASAMP_API const char* ba_status_name(ba_status s);
BIASAMP_API const char* ba_last_error(void);
/* Warnings (e.g. lambda floor substitution). NULL restores the stderr default. */
BIASAMP_API void ba_set_log_callback(void (*cb)(const char* msg, void* user), void* user);

/* ---- spectra ---- */
typedef struct ba_spectrum ba_spectrum;

BIASAMP_API ba_status ba_spectrum_isotropic(long d, double a1, double a2, double theta, double delta,
                                            ba_spectrum** out);
BIASAMP_API ba_status ba_spectrum_diatomic(long d, double pi_frac, double a1, double a2, double b2, double theta,
                                           double delta, ba_spectrum** out);
BIASAMP_API ba_status ba_spectrum_power_law(long d, double beta1, double beta2, double alpha, double theta,
                                            ba_spectrum** out);
BIASAMP_API ba_status ba_spectrum_from_arrays(size_t d, const double* sigma1, const double* sigma2,
                                              const double* theta, const double* delta, ba_spectrum** out);
BIASAMP_API void ba_spectrum_free(ba_spectrum* s);
BIASAMP_API size_t ba_spectrum_dim(const ba_spectrum* s);
BIASAMP_API long ba_spectrum_core_size(const ba_spectrum* s);
/* I_{a,b}(t) for group 1 or 2 */
BIASAMP_API ba_status ba_spectrum_dof(const ba_spectrum* s, int group, int a, int b, double t, double* out);

/* ---- theory ---- */
typedef struct ba_solver_settings {
  double tol;
  int max_iter;
  double damping;
  double lambda_floor;
} ba_solver_settings;

BIASAMP_API void ba_solver_settings_default(ba_solver_settings* st);

typedef struct ba_regime {
  double p1;
  double phi;   /* d/n */
  double gamma; /* m/d, ignored by classical ridge */
} ba_regime;

typedef struct ba_risk {
  double bias;
  double variance;
  double total;
  double residual;
  int iters;
  int boundary;
} ba_risk;

typedef struct ba_metrics {
  double odd, edd, add;
  int add_defined;
  double signed_odd, signed_edd;
} ba_metrics;

/* settings may be NULL for defaults */
BIASAMP_API ba_status ba_rp_joint_risk(const ba_spectrum* s, const ba_regime* rg, double lambda, double sigma1_sq,
                                       double sigma2_sq, int group, const ba_solver_settings* st, ba_risk* out);
BIASAMP_API ba_status ba_rp_separate_risk(const ba_spectrum* s, int group, double phi_s, double gamma,
                                          double lambda_s, double sigma_s_sq, const ba_solver_settings* st,
                                          ba_risk* out);
BIASAMP_API ba_status ba_rp_separate_risk_unregularized(const ba_spectrum* s, int group, double psi_s, double gamma,
                                                        double sigma_s_sq, const ba_solver_settings* st,
                                                        ba_risk* out);
BIASAMP_API ba_status ba_classical_joint_risk(const ba_spectrum* s, const ba_regime* rg, double lambda,
                                              double sigma1_sq, double sigma2_sq, int group,
                                              const ba_solver_settings* st, ba_risk* out);
BIASAMP_API ba_status ba_classical_separate_risk(const ba_spectrum* s, int group, double phi_s, double lambda_s,
                                                 double sigma_s_sq, const ba_solver_settings* st, ba_risk* out);
BIASAMP_API ba_status ba_compute_metrics(double r1_joint, double r2_joint, double r1_sep, double r2_sep,
                                         ba_metrics* out);
BIASAMP_API ba_status ba_power_law_limits(double c, double phi, double sigma1_sq, double* odd, double* edd,
                                          double* add);
BIASAMP_API ba_status ba_solve_mp(double gamma, double lambda, double* m);
BIASAMP_API ba_status ba_mp_empirical_trace(long d, double gamma, double lambda, uint64_t seed, double* out);

/* ---- sweeps ---- */
typedef struct ba_config ba_config;
typedef struct ba_sweep ba_sweep;

BIASAMP_API size_t ba_scenario_count(void);
BIASAMP_API const char* ba_scenario_name(size_t i);

BIASAMP_API ba_status ba_config_preset(const char* scenario, ba_config** out);
BIASAMP_API ba_status ba_config_load(const char* path, ba_config** out);
BIASAMP_API ba_status ba_config_parse(const char* json, ba_config** out);
/* JSON object of overrides, same schema as the config file */
BIASAMP_API ba_status ba_config_merge(ba_config* cfg, const char* json_fragment);
BIASAMP_API ba_status ba_config_to_json(const ba_config* cfg, char** out);
BIASAMP_API const char* ba_config_output_csv(const ba_config* cfg);
BIASAMP_API const char* ba_config_output_svg(const ba_config* cfg);
BIASAMP_API void ba_config_free(ba_config* cfg);
BIASAMP_API void ba_string_free(char* s);

BIASAMP_API ba_status ba_sweep_run(const ba_config* cfg, ba_sweep** out);
BIASAMP_API void ba_sweep_free(ba_sweep* sw);
BIASAMP_API size_t ba_sweep_rows(const ba_sweep* sw);
BIASAMP_API long ba_sweep_flagged(const ba_sweep* sw);
BIASAMP_API ba_status ba_sweep_value(const ba_sweep* sw, size_t row, const char* column, double* out);
/* ';'-separated flags; pointer lives as long as the sweep */
BIASAMP_API ba_status ba_sweep_flags(const ba_sweep* sw, size_t row, const char** out);
BIASAMP_API ba_status ba_sweep_write_csv(const ba_sweep* sw, const char* path);

typedef struct ba_plot_spec {
  const char* x;
  const char* const* y;
  size_t ny;
  const char* group_by; /* NULL or "" for a single line per series */
  int log_x;
  int log_y;
  const char* title;
} ba_plot_spec;

BIASAMP_API ba_status ba_sweep_write_svg(const ba_sweep* sw, const char* path, const ba_plot_spec* spec);
/* plot using the plot_* fields of the config */
BIASAMP_API ba_status ba_sweep_write_config_svg(const ba_sweep* sw, const ba_config* cfg, const char* path);
BIASAMP_API ba_status ba_plot_csv(const char* csv_path, const char* svg_path, const ba_plot_spec* spec);

#ifdef __cplusplus
}
#endif

#endif
