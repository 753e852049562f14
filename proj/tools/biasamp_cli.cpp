// Command-line harness over the C API: sweeps, validation suites, MP self-test, plotting.
#include <CLI11.hpp>
#include <json.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "biasamp/biasamp.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitError = 2;
constexpr int kExitFlagged = 3;
constexpr int kExitMismatch = 1;

struct ConfigDel {
  void operator()(ba_config* c) const { ba_config_free(c); }
};
struct SweepDel {
  void operator()(ba_sweep* s) const { ba_sweep_free(s); }
};
using ConfigPtr = std::unique_ptr<ba_config, ConfigDel>;
using SweepPtr = std::unique_ptr<ba_sweep, SweepDel>;

struct CliError {
  std::string msg;
};

void check(ba_status s, const char* what) {
  if (s != BA_OK) throw CliError{std::string(what) + ": " + ba_status_name(s) + ": " + ba_last_error()};
}

struct Common {
  std::optional<unsigned long long> seed;
  std::optional<long> replicates;
  std::optional<int> threads;
  std::string out_dir;
  bool theory_only = false;
  bool allow_flags = false;
};

fs::path output_dir(const Common& c) {
  if (!c.out_dir.empty()) return c.out_dir;
  if (const char* env = std::getenv("BIASAMP_OUT_DIR"); env && *env) return env;
  return ".";
}

fs::path resolve(const fs::path& dir, const std::string& p) {
  const fs::path q(p);
  return q.is_absolute() ? q : dir / q;
}

void apply_overrides(ba_config* cfg, const Common& c) {
  std::string frag = "{";
  auto add = [&](const std::string& kv) { frag += (frag.size() > 1 ? "," : "") + kv; };
  if (c.seed) add("\"seed\":" + std::to_string(*c.seed));
  if (c.replicates) add("\"replicates\":" + std::to_string(*c.replicates));
  if (c.threads) add("\"threads\":" + std::to_string(*c.threads));
  if (c.theory_only) add("\"theory_only\":true");
  frag += "}";
  check(ba_config_merge(cfg, frag.c_str()), "config override");
}

SweepPtr run_and_write(ba_config* cfg, const fs::path& dir, std::string* csv_out) {
  ba_sweep* raw = nullptr;
  check(ba_sweep_run(cfg, &raw), "sweep");
  SweepPtr sw(raw);
  fs::create_directories(dir);
  const fs::path csv = resolve(dir, ba_config_output_csv(cfg));
  if (csv.has_parent_path()) fs::create_directories(csv.parent_path());
  check(ba_sweep_write_csv(sw.get(), csv.string().c_str()), "write csv");
  std::printf("wrote %s (%zu rows)\n", csv.string().c_str(), ba_sweep_rows(sw.get()));
  const std::string svg_name = ba_config_output_svg(cfg);
  if (!svg_name.empty()) {
    const fs::path svg = resolve(dir, svg_name);
    if (ba_sweep_write_config_svg(sw.get(), cfg, svg.string().c_str()) == BA_OK)
      std::printf("wrote %s\n", svg.string().c_str());
    else
      std::fprintf(stderr, "plot skipped: %s\n", ba_last_error());
  }
  if (csv_out) *csv_out = csv.string();
  return sw;
}

int report_flags(const ba_sweep* sw, bool allow) {
  const long flagged = ba_sweep_flagged(sw);
  if (flagged == 0) return 0;
  std::fprintf(stderr, "%ld grid point(s) flagged non-convergent%s\n", flagged,
               allow ? " (allowed)" : "; rerun with --allow-flags to accept");
  return allow ? 0 : kExitFlagged;
}

int cmd_sweep(const std::string& path, const Common& c) {
  ba_config* raw = nullptr;
  check(ba_config_load(path.c_str(), &raw), "config");
  ConfigPtr cfg(raw);
  apply_overrides(cfg.get(), c);
  auto sw = run_and_write(cfg.get(), output_dir(c), nullptr);
  return report_flags(sw.get(), c.allow_flags);
}

nlohmann::json config_json(const ba_config* cfg) {
  char* js = nullptr;
  check(ba_config_to_json(cfg, &js), "config");
  auto j = nlohmann::json::parse(js);
  ba_string_free(js);
  return j;
}

// A grid point is not comparable when a model sits on its interpolation threshold:
// per-group sizes are Binomial, so the separate models straddle it within the
// sampling spread of n_s; the joint model only exactly on it.
std::string threshold_reason(double phi, double psi, double p1, long n, bool rp) {
  const double r_joint = rp ? std::min(phi, psi) : phi;
  if (std::abs(r_joint - 1.0) <= 1.0 / static_cast<double>(n)) return "joint model at its interpolation threshold";
  for (int s = 1; s <= 2; ++s) {
    const double p = s == 1 ? p1 : 1.0 - p1;
    const double spread = 3.0 * std::sqrt((1.0 - p) / (static_cast<double>(n) * p));
    const double r = r_joint / p;
    if (std::abs(r - 1.0) <= spread)
      return "group " + std::to_string(s) + " separate model within sampling spread of its interpolation threshold";
  }
  return {};
}

int validate_one(const std::string& suite, const Common& c) {
  ba_config* raw = nullptr;
  check(ba_config_preset(suite.c_str(), &raw), "preset");
  ConfigPtr cfg(raw);
  std::string frag = "{\"output_csv\":\"validate-" + suite + ".csv\",\"output_svg\":\"\",\"theory_only\":false}";
  check(ba_config_merge(cfg.get(), frag.c_str()), "config");
  apply_overrides(cfg.get(), c);
  if (c.theory_only) throw CliError{"validate needs Monte Carlo; drop --theory-only"};
  const auto js = config_json(cfg.get());
  if (js.at("replicates").get<long>() < 2)
    throw CliError{"suite '" + suite + "' has fewer than 2 replicates; pass --replicates"};
  const double p1 = js.at("p1").get<double>();
  const long n = js.at("n").get<long>();
  const bool rp = js.at("family").get<std::string>() != "classical";

  auto sw = run_and_write(cfg.get(), output_dir(c), nullptr);
  const char* qs[] = {"R1j", "R2j", "R1s", "R2s"};
  int bad = 0, skipped = 0;
  const size_t rows = ba_sweep_rows(sw.get());
  if (rows == 0) throw CliError{"suite produced no rows"};
  for (size_t r = 0; r < rows; ++r) {
    double phi = 0, psi = 0, lam = 0, cnt = 0, cr = 0;
    check(ba_sweep_value(sw.get(), r, "phi", &phi), "value");
    check(ba_sweep_value(sw.get(), r, "psi", &psi), "value");
    check(ba_sweep_value(sw.get(), r, "lambda", &lam), "value");
    check(ba_sweep_value(sw.get(), r, "c", &cr), "value");
    check(ba_sweep_value(sw.get(), r, "emp_count", &cnt), "value");
    double phi_eff = 0, psi_eff = 0;
    check(ba_sweep_value(sw.get(), r, "phi_eff", &phi_eff), "value");
    if (rp) check(ba_sweep_value(sw.get(), r, "psi_eff", &psi_eff), "value");
    const std::string why = threshold_reason(phi_eff, rp ? psi_eff : phi_eff, p1, n, rp);
    if (!why.empty()) {
      ++skipped;
      std::printf("SKIP phi=%g psi=%g lambda=%g c=%g (%s)\n", phi, psi, lam, cr, why.c_str());
      continue;
    }
    std::string line;
    bool ok = true;
    for (const char* q : qs) {
      double th = 0, mean = 0, sd = 0;
      check(ba_sweep_value(sw.get(), r, (std::string("theory_") + q).c_str(), &th), "value");
      check(ba_sweep_value(sw.get(), r, (std::string("emp_") + q + "_mean").c_str(), &mean), "value");
      check(ba_sweep_value(sw.get(), r, (std::string("emp_") + q + "_std").c_str(), &sd), "value");
      const double se = sd / std::sqrt(cnt);
      const double z = (mean - th) / se;
      const bool pass = std::isfinite(z) ? std::abs(z) <= 3.0 : (std::isfinite(th) && mean == th);
      ok = ok && pass;
      char buf[96];
      std::snprintf(buf, sizeof buf, " %s z=%+.2f", q, z);
      line += buf;
    }
    bad += !ok;
    std::printf("%s phi=%g psi=%g lambda=%g c=%g%s\n", ok ? "PASS" : "FAIL", phi, psi, lam, cr, line.c_str());
  }
  std::printf("%s: %zu/%zu compared grid points within 3 standard errors, %d skipped\n", suite.c_str(),
              rows - skipped - bad, rows - skipped, skipped);
  const int flags = report_flags(sw.get(), c.allow_flags);
  if (bad) return kExitMismatch;
  return flags;
}

int cmd_validate(const std::string& suite, const Common& c) {
  if (suite != "all") return validate_one(suite, c);
  int rc = 0;
  for (const char* s : {"isotropic-sweep", "regularization-path", "diatomic-minority", "power-law-noise-ratio"}) {
    const int r = validate_one(s, c);
    rc = std::max(rc, r);
  }
  return rc;
}

int cmd_mp_check(double gamma, double lambda, long d, unsigned long long seed) {
  double m = 0, emp = 0;
  check(ba_solve_mp(gamma, lambda, &m), "solve_mp");
  // closed form: lambda gamma m^2 + (lambda + 1 - gamma) m - 1 = 0
  const double b = lambda + 1.0 - gamma;
  const double closed = (-b + std::sqrt(b * b + 4.0 * lambda * gamma)) / (2.0 * lambda * gamma);
  check(ba_mp_empirical_trace(d, gamma, lambda, seed, &emp), "empirical trace");
  const double e1 = std::abs(m - closed), e2 = std::abs(emp - m);
  std::printf("fixed point m      = %.15f\n", m);
  std::printf("quadratic root     = %.15f  (|diff| %.2e)\n", closed, e1);
  std::printf("empirical d=%-6ld = %.15f  (|diff| %.2e)\n", d, emp, e2);
  const bool ok = e1 <= 1e-10 && e2 <= 1e-2;
  std::printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : kExitMismatch;
}

int cmd_plot(const std::string& csv, std::string out, const std::string& x, std::vector<std::string> ys,
             const std::string& group_by, bool log_x, bool log_y, const std::string& title) {
  if (ys.empty()) ys = {"ODD", "EDD"};
  if (out.empty()) out = fs::path(csv).replace_extension(".svg").string();
  std::vector<const char*> yp;
  for (const auto& y : ys) yp.push_back(y.c_str());
  const ba_plot_spec spec{x.c_str(), yp.data(), yp.size(), group_by.c_str(), log_x ? 1 : 0, log_y ? 1 : 0,
                          title.c_str()};
  check(ba_plot_csv(csv.c_str(), out.c_str(), &spec), "plot");
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bias-amplification theory vs. simulation harness"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool sweepish) {
    sub->add_option("--seed", common.seed, "Base seed for Monte Carlo streams");
    sub->add_option("--replicates", common.replicates, "Monte Carlo replicates per grid point");
    sub->add_option("--threads", common.threads, "Worker threads (0 = all cores)");
    sub->add_option("--out-dir", common.out_dir, "Output directory (default: $BIASAMP_OUT_DIR or .)");
    sub->add_flag("--allow-flags", common.allow_flags, "Exit 0 even if grid points are flagged non-convergent");
    if (sweepish) sub->add_flag("--theory-only", common.theory_only, "Skip Monte Carlo");
  };

  std::string config_path;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep from a config file");
  sweep->add_option("config", config_path, "Sweep config (JSON)")->required()->check(CLI::ExistingFile);
  add_common(sweep, true);

  std::string suite;
  auto* validate = app.add_subcommand("validate", "Compare theory to Monte Carlo on a preset scenario");
  validate->add_option("suite", suite, "isotropic-sweep | regularization-path | diatomic-minority | "
                                       "power-law-noise-ratio | all")
      ->required();
  add_common(validate, false);

  double gamma = 1.0, lambda = 1.0;
  long mp_d = 2000;
  unsigned long long mp_seed = 1;
  auto* mp = app.add_subcommand("mp-check", "Marchenko-Pastur fixed point vs closed form and a sampled Wishart");
  mp->add_option("--gamma", gamma, "d/n")->check(CLI::PositiveNumber);
  mp->add_option("--lambda", lambda, "Ridge shift")->check(CLI::PositiveNumber);
  mp->add_option("--d", mp_d, "Dimension of the sampled Wishart")->check(CLI::PositiveNumber);
  mp->add_option("--seed", mp_seed, "Seed");

  std::string csv, out, x = "psi", group_by, title;
  std::vector<std::string> ys;
  bool log_x = false, log_y = false;
  auto* plot = app.add_subcommand("plot", "Render an SVG from a sweep CSV");
  plot->add_option("csv", csv, "Sweep CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--x", x, "x-axis column");
  plot->add_option("--y", ys, "Quantity (ODD, EDD, ADD, R1j, ...) or raw column; repeatable");
  plot->add_option("--group-by", group_by, "One line per distinct value of this column");
  plot->add_flag("--log-x", log_x, "Logarithmic x axis");
  plot->add_flag("--log-y", log_y, "Logarithmic y axis");
  plot->add_option("--out", out, "Output SVG (default: CSV name with .svg)");
  plot->add_option("--title", title, "Plot title");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep) return cmd_sweep(config_path, common);
    if (*validate) return cmd_validate(suite, common);
    if (*mp) return cmd_mp_check(gamma, lambda, mp_d, mp_seed);
    if (*plot) return cmd_plot(csv, out, x, ys, group_by, log_x, log_y, title);
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.msg.c_str());
    return kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
