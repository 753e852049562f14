#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "biasamp/error.hpp"

namespace biasamp {

// One shared-eigenbasis direction: eigenvalues of Sigma1, Sigma2, Theta, Delta.
struct SpectralPoint {
  double sigma1 = 0, sigma2 = 0, theta = 0, delta = 0;

  double sigma(int s) const { return s == 1 ? sigma1 : sigma2; }
  // Theta_1 = Theta, Theta_2 = Theta + Delta
  double theta_s(int s) const { return s == 1 ? theta : theta + delta; }
};

class JointSpectrum {
 public:
  // Identical tuples are merged into weighted atoms, so traces over
  // isotropic or block spectra cost O(#distinct) rather than O(d).
  struct Atom {
    SpectralPoint x;
    double weight;  // multiplicity / d
  };

  JointSpectrum(std::vector<double> sigma1, std::vector<double> sigma2, std::vector<double> theta,
                std::vector<double> delta, long core_size = -1);

  std::size_t dim() const { return sigma1_.size(); }
  const std::vector<double>& sigma1() const { return sigma1_; }
  const std::vector<double>& sigma2() const { return sigma2_; }
  const std::vector<double>& sigma(int s) const { return s == 1 ? sigma1_ : sigma2_; }
  const std::vector<double>& theta() const { return theta_; }
  const std::vector<double>& delta() const { return delta_; }
  SpectralPoint at(std::size_t k) const { return {sigma1_[k], sigma2_[k], theta_[k], delta_[k]}; }

  // Diatomic core block length; -1 for other shapes.
  long core_size() const { return core_size_; }
  double max_eigenvalue(int s) const;
  // Fraction of strictly positive eigenvalues of Sigma_s, i.e. I_{1,1}(0).
  double positive_fraction(int s) const;
  const std::vector<Atom>& atoms() const { return atoms_; }

  // Groups 1 and 2 exchanged (Theta kept, Delta must be handled by the caller).
  JointSpectrum swapped() const;

 private:
  std::vector<double> sigma1_, sigma2_, theta_, delta_;
  long core_size_;
  std::vector<Atom> atoms_;
};

JointSpectrum make_isotropic(long d, double a1, double a2, double theta_scale, double delta_scale);
JointSpectrum make_diatomic(long d, double pi_frac, double a1, double a2, double b2, double theta_scale,
                            double delta_scale);
JointSpectrum make_power_law(long d, double beta1, double beta2, double alpha, double theta_scale);

namespace detail {
[[noreturn]] void singular_trace();
}

// Normalized trace (1/d) sum_k f(point_k).
template <class F>
double tr_func(const JointSpectrum& sp, F&& f) {
  double acc = 0.0;
  for (const auto& a : sp.atoms()) {
    const double v = f(a.x);
    if (!std::isfinite(v)) detail::singular_trace();
    acc += a.weight * v;
  }
  return acc;
}

template <class F>
double tr_func(std::span<const double> x, F&& f) {
  require(!x.empty(), "tr_func: empty array");
  double acc = 0.0;
  for (double v : x) {
    const double y = f(v);
    if (!std::isfinite(y)) detail::singular_trace();
    acc += y;
  }
  return acc / static_cast<double>(x.size());
}

// I_{a,b}(t) = tr Sigma^a (Sigma + t)^-b ; df_m = I_{m,m}
double dof(std::span<const double> sigma, int a, int b, double t);
double dof(const JointSpectrum& sp, int s, int a, int b, double t);

struct ScalingRegime {
  double p1 = 0.5;
  double phi = 1.0;    // d/n
  double gamma = 1.0;  // m/d
  long n = 0, d = 0, m = 0;  // finite sizes if known

  double psi() const { return phi * gamma; }
  double p(int s) const { return s == 1 ? p1 : 1.0 - p1; }
  double phi_s(int s) const { return phi / p(s); }
  double psi_s(int s) const { return psi() / p(s); }

  static ScalingRegime from_rates(double p1, double phi, double gamma);
  static ScalingRegime from_sizes(long n, long d, long m, double p1);
  void validate() const;
};

struct NoiseAndRegularization {
  double sigma1_sq = 1.0, sigma2_sq = 1.0;
  double lambda_joint = 1e-6, lambda1 = 1e-6, lambda2 = 1e-6;

  double sigma_sq(int s) const { return s == 1 ? sigma1_sq : sigma2_sq; }
  double lambda_s(int s) const { return s == 1 ? lambda1 : lambda2; }
  void validate() const;
};

}  // namespace biasamp
