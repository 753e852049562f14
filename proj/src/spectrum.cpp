#include "biasamp/spectrum.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace biasamp {

namespace detail {
void singular_trace() { fail(ErrorCode::Singular, "tr_func: non-finite term (singular resolvent)"); }
}  // namespace detail

JointSpectrum::JointSpectrum(std::vector<double> sigma1, std::vector<double> sigma2,
                             std::vector<double> theta, std::vector<double> delta, long core_size)
    : sigma1_(std::move(sigma1)),
      sigma2_(std::move(sigma2)),
      theta_(std::move(theta)),
      delta_(std::move(delta)),
      core_size_(core_size) {
  const std::size_t d = sigma1_.size();
  require(d >= 1, "spectrum: dimension must be positive");
  require(sigma2_.size() == d && theta_.size() == d && delta_.size() == d,
          "spectrum: arrays must share one length");
  auto check = [](const std::vector<double>& v, const char* name) {
    for (double x : v)
      require(std::isfinite(x) && x >= 0.0, std::string("spectrum: ") + name + " entries must be finite and >= 0");
  };
  check(sigma1_, "sigma1");
  check(sigma2_, "sigma2");
  check(theta_, "theta");
  check(delta_, "delta");
  require(max_eigenvalue(1) > 0 && max_eigenvalue(2) > 0,
          "spectrum: sigma1 and sigma2 need at least one positive entry");

  // sorted map keeps atom order (and so summation order) deterministic
  std::map<std::tuple<double, double, double, double>, std::size_t> counts;
  for (std::size_t k = 0; k < d; ++k) ++counts[{sigma1_[k], sigma2_[k], theta_[k], delta_[k]}];
  atoms_.reserve(counts.size());
  for (const auto& [key, c] : counts) {
    auto [a, b, t, dl] = key;
    atoms_.push_back({{a, b, t, dl}, static_cast<double>(c) / static_cast<double>(d)});
  }
}

double JointSpectrum::max_eigenvalue(int s) const {
  const auto& v = sigma(s);
  return *std::max_element(v.begin(), v.end());
}

double JointSpectrum::positive_fraction(int s) const {
  const auto& v = sigma(s);
  return static_cast<double>(std::count_if(v.begin(), v.end(), [](double x) { return x > 0; })) /
         static_cast<double>(v.size());
}

JointSpectrum JointSpectrum::swapped() const { return {sigma2_, sigma1_, theta_, delta_, core_size_}; }

JointSpectrum make_isotropic(long d, double a1, double a2, double theta_scale, double delta_scale) {
  require(d >= 1, "make_isotropic: d must be positive");
  require(a1 >= 0 && a2 >= 0 && theta_scale >= 0 && delta_scale >= 0, "make_isotropic: scales must be >= 0");
  const auto n = static_cast<std::size_t>(d);
  return {std::vector<double>(n, a1), std::vector<double>(n, a2), std::vector<double>(n, theta_scale),
          std::vector<double>(n, delta_scale)};
}

JointSpectrum make_diatomic(long d, double pi_frac, double a1, double a2, double b2, double theta_scale,
                            double delta_scale) {
  require(d >= 1, "make_diatomic: d must be positive");
  require(pi_frac > 0 && pi_frac < 1, "make_diatomic: pi must lie in (0,1)");
  require(a1 >= 0 && a2 >= 0 && b2 >= 0 && theta_scale >= 0 && delta_scale >= 0,
          "make_diatomic: scales must be >= 0");
  const long core = std::lround(pi_frac * static_cast<double>(d));
  require(core >= 1 && core < d, "make_diatomic: rounded core block is empty or fills the whole space");
  const auto n = static_cast<std::size_t>(d);
  std::vector<double> s1(n, 0.0), s2(n, b2);
  for (long k = 0; k < core; ++k) {
    s1[k] = a1;
    s2[k] = a2;
  }
  return {std::move(s1), std::move(s2), std::vector<double>(n, theta_scale), std::vector<double>(n, delta_scale),
          core};
}

JointSpectrum make_power_law(long d, double beta1, double beta2, double alpha, double theta_scale) {
  require(d >= 1, "make_power_law: d must be positive");
  require(beta1 > beta2 && beta2 > 0, "make_power_law: need beta1 > beta2 > 0");
  require(alpha > 0, "make_power_law: alpha must be positive");
  require(theta_scale >= 0, "make_power_law: theta scale must be >= 0");
  const auto n = static_cast<std::size_t>(d);
  std::vector<double> s1(n), s2(n), de(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double i = static_cast<double>(k + 1);  // exponent base is 1-indexed
    s1[k] = std::pow(i, -beta1);
    s2[k] = std::pow(i, -beta2);
    de[k] = std::pow(i, -alpha);
  }
  return {std::move(s1), std::move(s2), std::vector<double>(n, theta_scale), std::move(de)};
}

namespace {
double dof_term(double x, int a, int b, double t) {
  if (x == 0.0) return 0.0;  // t = 0 with b > a is rejected upfront
  return std::pow(x, a) / std::pow(x + t, b);
}
}  // namespace

double dof(std::span<const double> sigma, int a, int b, double t) {
  require(a >= 1 && b >= 1, "dof: a, b must be >= 1");
  require(t >= 0 && std::isfinite(t), "dof: t must be finite and >= 0");
  if (t == 0.0 && b > a) {
    for (double x : sigma)
      if (x == 0.0) fail(ErrorCode::Singular, "dof: t = 0 with a zero eigenvalue and b > a");
  }
  return tr_func(sigma, [&](double x) { return dof_term(x, a, b, t); });
}

double dof(const JointSpectrum& sp, int s, int a, int b, double t) {
  require(s == 1 || s == 2, "dof: group must be 1 or 2");
  require(a >= 1 && b >= 1, "dof: a, b must be >= 1");
  require(t >= 0 && std::isfinite(t), "dof: t must be finite and >= 0");
  if (t == 0.0 && b > a && sp.positive_fraction(s) < 1.0)
    fail(ErrorCode::Singular, "dof: t = 0 with a zero eigenvalue and b > a");
  return tr_func(sp, [&](const SpectralPoint& p) { return dof_term(p.sigma(s), a, b, t); });
}

ScalingRegime ScalingRegime::from_rates(double p1, double phi, double gamma) {
  ScalingRegime r;
  r.p1 = p1;
  r.phi = phi;
  r.gamma = gamma;
  r.validate();
  return r;
}

ScalingRegime ScalingRegime::from_sizes(long n, long d, long m, double p1) {
  require(n >= 1 && d >= 1 && m >= 1, "regime: n, d, m must be positive");
  ScalingRegime r;
  r.p1 = p1;
  r.n = n;
  r.d = d;
  r.m = m;
  r.phi = static_cast<double>(d) / static_cast<double>(n);
  r.gamma = static_cast<double>(m) / static_cast<double>(d);
  r.validate();
  return r;
}

void ScalingRegime::validate() const {
  require(p1 > 0 && p1 < 1, "regime: p1 must lie in (0,1)");
  require(phi > 0 && std::isfinite(phi), "regime: phi must be positive");
  require(gamma > 0 && std::isfinite(gamma), "regime: gamma must be positive");
}

void NoiseAndRegularization::validate() const {
  require(sigma1_sq >= 0 && sigma2_sq >= 0, "noise variances must be >= 0");
  require(lambda_joint >= 0 && lambda1 >= 0 && lambda2 >= 0, "penalties must be >= 0");
}

}  // namespace biasamp
