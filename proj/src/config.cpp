#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "biasamp/experiments.hpp"

namespace biasamp {

using nlohmann::json;

const char* to_string(SpectrumKind k) {
  switch (k) {
    case SpectrumKind::Isotropic:
      return "isotropic";
    case SpectrumKind::Diatomic:
      return "diatomic";
    case SpectrumKind::PowerLaw:
      return "power-law";
  }
  return "?";
}

namespace {

std::vector<double> logspace(double lo_exp, double hi_exp, int count) {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    v[i] = std::pow(10.0, lo_exp + (hi_exp - lo_exp) * i / static_cast<double>(count - 1));
  return v;
}

SpectrumKind parse_spectrum(const std::string& s) {
  if (s == "isotropic") return SpectrumKind::Isotropic;
  if (s == "diatomic") return SpectrumKind::Diatomic;
  if (s == "power-law") return SpectrumKind::PowerLaw;
  fail(ErrorCode::Parse, "config: unknown spectrum '" + s + "'");
}

ModelFamily parse_family(const std::string& s) {
  if (s == "random-projection") return ModelFamily::RandomProjection;
  if (s == "classical") return ModelFamily::Classical;
  fail(ErrorCode::Parse, "config: unknown family '" + s + "'");
}

double get_num(const json& v, const std::string& key) {
  if (!v.is_number()) fail(ErrorCode::Parse, "config: '" + key + "' must be a number");
  return v.get<double>();
}

long get_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) fail(ErrorCode::Parse, "config: '" + key + "' must be an integer");
  return v.get<long>();
}

bool get_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) fail(ErrorCode::Parse, "config: '" + key + "' must be true or false");
  return v.get<bool>();
}

std::string get_str(const json& v, const std::string& key) {
  if (!v.is_string()) fail(ErrorCode::Parse, "config: '" + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> get_list(const json& v, const std::string& key) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) fail(ErrorCode::Parse, "config: '" + key + "' must be a number or an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(get_num(x, key));
  return out;
}

std::vector<std::string> get_str_list(const json& v, const std::string& key) {
  if (v.is_string()) return {v.get<std::string>()};
  if (!v.is_array()) fail(ErrorCode::Parse, "config: '" + key + "' must be a string or an array of strings");
  std::vector<std::string> out;
  for (const auto& x : v) out.push_back(get_str(x, key));
  return out;
}

json parse_object(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Parse, std::string("config: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::Parse, "config: top level must be an object");
  return j;
}

void apply(SweepConfig& c, const json& j) {
  for (const auto& [key, v] : j.items()) {
    if (key == "scenario") {
      // handled by the caller
    } else if (key == "family") c.family = parse_family(get_str(v, key));
    else if (key == "spectrum") c.spectrum = parse_spectrum(get_str(v, key));
    else if (key == "a1") c.a1 = get_num(v, key);
    else if (key == "a2") c.a2 = get_num(v, key);
    else if (key == "b2") c.b2 = get_num(v, key);
    else if (key == "pi") c.pi = get_num(v, key);
    else if (key == "beta1") c.beta1 = get_num(v, key);
    else if (key == "beta2") c.beta2 = get_num(v, key);
    else if (key == "alpha") c.alpha = get_num(v, key);
    else if (key == "theta_scale") c.theta_scale = get_num(v, key);
    else if (key == "delta_scale") c.delta_scale = get_num(v, key);
    else if (key == "p1") c.p1 = get_num(v, key);
    else if (key == "sigma1_sq") c.sigma1_sq = get_num(v, key);
    else if (key == "sigma2_sq") c.sigma2_sq = get_num(v, key);
    else if (key == "phi") c.phi = get_list(v, key);
    else if (key == "psi") c.psi = get_list(v, key);
    else if (key == "lambda") c.lambda = get_list(v, key);
    else if (key == "c") c.c = get_list(v, key);
    else if (key == "n") c.n = get_int(v, key);
    else if (key == "replicates") c.replicates = get_int(v, key);
    else if (key == "seed") {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        fail(ErrorCode::Parse, "config: 'seed' must be a nonnegative integer");
      c.seed = v.get<std::uint64_t>();
    } else if (key == "nested") c.nested = get_bool(v, key);
    else if (key == "theory_only") c.theory_only = get_bool(v, key);
    else if (key == "threads") c.threads = static_cast<int>(get_int(v, key));
    else if (key == "output_csv") c.output_csv = get_str(v, key);
    else if (key == "output_svg") c.output_svg = get_str(v, key);
    else if (key == "plot_x") c.plot_x = get_str(v, key);
    else if (key == "plot_y") c.plot_y = get_str_list(v, key);
    else if (key == "plot_group_by") c.plot_group_by = get_str(v, key);
    else if (key == "plot_log_x") c.plot_log_x = get_bool(v, key);
    else if (key == "solver_tol") c.solver.tol = get_num(v, key);
    else if (key == "solver_max_iter") c.solver.max_iter = static_cast<int>(get_int(v, key));
    else if (key == "solver_damping") c.solver.damping = get_num(v, key);
    else if (key == "lambda_floor") c.solver.lambda_floor = get_num(v, key);
    else fail(ErrorCode::Parse, "config: unknown key '" + key + "'");
  }
}

}  // namespace

bool SweepConfig::operator==(const SweepConfig& o) const {
  auto tie = [](const SweepConfig& c) {
    return std::tie(c.scenario, c.family, c.spectrum, c.a1, c.a2, c.b2, c.pi, c.beta1, c.beta2, c.alpha,
                    c.theta_scale, c.delta_scale, c.p1, c.sigma1_sq, c.sigma2_sq, c.phi, c.psi, c.lambda, c.c, c.n,
                    c.replicates, c.seed, c.nested, c.theory_only, c.threads, c.output_csv, c.output_svg, c.plot_x,
                    c.plot_y, c.plot_group_by, c.plot_log_x, c.solver.tol, c.solver.max_iter, c.solver.damping,
                    c.solver.lambda_floor);
  };
  return tie(*this) == tie(o);
}

std::size_t SweepConfig::grid_size() const {
  const std::size_t np = family == ModelFamily::RandomProjection ? psi.size() : 1;
  return phi.size() * np * lambda.size() * std::max<std::size_t>(c.size(), 1);
}

JointSpectrum SweepConfig::build_spectrum(long d) const {
  switch (spectrum) {
    case SpectrumKind::Isotropic:
      return make_isotropic(d, a1, a2, theta_scale, delta_scale);
    case SpectrumKind::Diatomic:
      return make_diatomic(d, pi, a1, a2, b2, theta_scale, delta_scale);
    case SpectrumKind::PowerLaw: {
      auto base = make_power_law(d, beta1, beta2, alpha, theta_scale);
      // delta_scale multiplies the power-law Delta decay
      std::vector<double> de = base.delta();
      for (double& x : de) x *= delta_scale;
      return {base.sigma1(), base.sigma2(), base.theta(), std::move(de)};
    }
  }
  fail(ErrorCode::InvalidArgument, "config: bad spectrum kind");
}

void SweepConfig::validate() const {
  const auto& names = scenario_names();
  require(std::find(names.begin(), names.end(), scenario) != names.end(), "config: unknown scenario '" + scenario + "'");
  require(n >= 2, "config: n must be >= 2");
  require(replicates == 0 || replicates >= 2, "config: replicates must be 0 or >= 2");
  require(!phi.empty(), "config: phi grid is empty");
  require(!lambda.empty(), "config: lambda grid is empty");
  if (family == ModelFamily::RandomProjection)
    require(!psi.empty(), "config: psi grid is empty (required for random-projection)");
  else
    require(psi.empty(), "config: psi grid must be empty for the classical family");
  for (double x : phi) require(x > 0 && std::isfinite(x), "config: phi values must be positive");
  for (double x : psi) require(x > 0 && std::isfinite(x), "config: psi values must be positive");
  for (double x : lambda) require(x >= 0 && std::isfinite(x), "config: lambda values must be >= 0");
  for (double x : c) require(x >= 0 && std::isfinite(x), "config: c values must be >= 0");
  require(p1 > 0 && p1 < 1, "config: p1 must lie in (0,1)");
  require(sigma1_sq >= 0 && sigma2_sq >= 0, "config: noise variances must be >= 0");
  require(threads >= 0, "config: threads must be >= 0");
  if (nested) require(replicates % 5 == 0, "config: nested mode needs replicates divisible by 5");
  require(!output_csv.empty(), "config: output_csv must be set");
  if (scenario == "power-law-noise-ratio") {
    require(spectrum == SpectrumKind::PowerLaw, "config: power-law-noise-ratio needs the power-law spectrum");
    require(!c.empty(), "config: power-law-noise-ratio needs a c grid");
  }
  if (scenario == "diatomic-minority") require(spectrum == SpectrumKind::Diatomic, "config: diatomic-minority needs the diatomic spectrum");
  solver.validate();
  (void)build_spectrum(std::max(2L, std::lround(phi.front() * static_cast<double>(n))));
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"phase-diagram",     "isotropic-sweep",       "regularization-path",
                                                 "diatomic-minority", "power-law-noise-ratio", "custom"};
  return names;
}

SweepConfig preset(std::string_view scenario) {
  SweepConfig c;
  c.scenario = std::string(scenario);
  if (scenario == "phase-diagram") {
    c.a1 = 2;
    c.a2 = 1;
    c.theta_scale = 2;
    c.delta_scale = 1;
    c.lambda = {1e-6};
    c.phi = logspace(-2, 1, 40);
    c.psi = logspace(-2, 1, 40);
    c.n = 10000;
    c.replicates = 0;
    c.theory_only = true;
    c.output_csv = "phase-diagram.csv";
    c.plot_y = {"ADD"};
  } else if (scenario == "isotropic-sweep") {
    c.a1 = 0.5;
    c.a2 = 1;
    c.theta_scale = 2;
    c.delta_scale = 1;
    c.sigma2_sq = 1e-5;
    c.lambda = {1e-6};
    c.phi = {0.5, 1.0, 2.0};
    c.psi = {0.05, 0.1, 0.2, 0.3, 0.4};
    c.output_csv = "isotropic-sweep.csv";
    c.output_svg = "isotropic-sweep.svg";
  } else if (scenario == "regularization-path") {
    c.a1 = 0.5;
    c.a2 = 1;
    c.theta_scale = 2;
    c.delta_scale = 1;
    c.phi = {0.75};
    c.psi = {0.25, 0.9, 2.0};
    c.lambda = logspace(-4, 1, 11);
    c.output_csv = "regularization-path.csv";
    c.output_svg = "regularization-path.svg";
    c.plot_x = "t";
    c.plot_group_by = "psi";
  } else if (scenario == "diatomic-minority") {
    c.spectrum = SpectrumKind::Diatomic;
    c.p1 = 0.9;
    c.a1 = 2;
    c.a2 = 2;
    c.b2 = 0.2;
    c.pi = 0.5;
    c.theta_scale = 1;
    c.delta_scale = 0;
    c.lambda = {1e-6};
    c.phi = {0.5};
    c.psi = {0.05, 0.1, 0.2, 0.3, 0.4};
    c.output_csv = "diatomic-minority.csv";
    c.output_svg = "diatomic-minority.svg";
    c.plot_y = {"ODD", "EDD", "ADD"};
  } else if (scenario == "power-law-noise-ratio") {
    c.spectrum = SpectrumKind::PowerLaw;
    c.beta1 = 2;
    c.beta2 = 1;
    c.alpha = 1;
    c.theta_scale = 1;
    c.delta_scale = 1;
    c.phi = {0.2};
    c.psi = {1.0};
    c.lambda = {1e-6};
    c.c = {0.1, 0.25, 0.5, 0.75, 0.9, 1.1, 1.5, 2, 4, 8};
    c.output_csv = "power-law-noise-ratio.csv";
    c.output_svg = "power-law-noise-ratio.svg";
    c.plot_x = "c";
    c.plot_y = {"ADD"};
    c.plot_group_by = "";
  } else if (scenario == "custom") {
    c.phi = {0.5};
    c.psi = {1.0};
    c.lambda = {1e-6};
  } else {
    fail(ErrorCode::InvalidArgument, "unknown scenario '" + std::string(scenario) + "'");
  }
  return c;
}

SweepConfig parse_config(std::string_view text) {
  const json j = parse_object(text);
  std::string scenario = "custom";
  if (j.contains("scenario")) scenario = get_str(j.at("scenario"), "scenario");
  const auto& names = scenario_names();
  if (std::find(names.begin(), names.end(), scenario) == names.end())
    fail(ErrorCode::Parse, "config: unknown scenario '" + scenario + "'");
  SweepConfig c = preset(scenario);
  apply(c, j);
  c.validate();
  return c;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void merge_config(SweepConfig& cfg, std::string_view fragment) {
  const json j = parse_object(fragment);
  SweepConfig next = cfg;
  if (j.contains("scenario")) {
    next = preset(get_str(j.at("scenario"), "scenario"));
  }
  apply(next, j);
  next.validate();
  cfg = std::move(next);
}

std::string emit_config(const SweepConfig& c) {
  json j;  // nlohmann sorts keys, which keeps the output stable
  j["scenario"] = c.scenario;
  j["family"] = to_string(c.family);
  j["spectrum"] = to_string(c.spectrum);
  j["a1"] = c.a1;
  j["a2"] = c.a2;
  j["b2"] = c.b2;
  j["pi"] = c.pi;
  j["beta1"] = c.beta1;
  j["beta2"] = c.beta2;
  j["alpha"] = c.alpha;
  j["theta_scale"] = c.theta_scale;
  j["delta_scale"] = c.delta_scale;
  j["p1"] = c.p1;
  j["sigma1_sq"] = c.sigma1_sq;
  j["sigma2_sq"] = c.sigma2_sq;
  j["phi"] = c.phi;
  j["psi"] = c.psi;
  j["lambda"] = c.lambda;
  j["c"] = c.c;
  j["n"] = c.n;
  j["replicates"] = c.replicates;
  j["seed"] = c.seed;
  j["nested"] = c.nested;
  j["theory_only"] = c.theory_only;
  j["threads"] = c.threads;
  j["output_csv"] = c.output_csv;
  j["output_svg"] = c.output_svg;
  j["plot_x"] = c.plot_x;
  j["plot_y"] = c.plot_y;
  j["plot_group_by"] = c.plot_group_by;
  j["plot_log_x"] = c.plot_log_x;
  j["solver_tol"] = c.solver.tol;
  j["solver_max_iter"] = c.solver.max_iter;
  j["solver_damping"] = c.solver.damping;
  j["lambda_floor"] = c.solver.lambda_floor;
  return j.dump(2) + "\n";
}

}  // namespace biasamp
