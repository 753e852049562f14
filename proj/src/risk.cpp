#include "biasamp/risk.hpp"

#include <limits>

namespace biasamp {

const char* to_string(TrainingMode m) { return m == TrainingMode::Joint ? "joint" : "separate"; }
const char* to_string(ModelFamily f) {
  return f == ModelFamily::Classical ? "classical" : "random-projection";
}

namespace {

RiskDecomposition finish(double bias, double var, int s, TrainingMode mode, ModelFamily fam) {
  if (!std::isfinite(bias) || !std::isfinite(var)) fail(ErrorCode::Singular, "risk: non-finite bias or variance");
  // tiny negatives from cancellation are clamped, anything larger is left visible
  const double slack = 1e-10 * std::max(1.0, std::abs(bias) + std::abs(var));
  if (bias < 0 && bias >= -slack) bias = 0;
  if (var < 0 && var >= -slack) var = 0;
  RiskDecomposition r;
  r.bias = bias;
  r.variance = var;
  r.total = bias + var;
  r.group = s;
  r.mode = mode;
  r.family = fam;
  return r;
}

void check_group(int s) { require(s == 1 || s == 2, "group must be 1 or 2"); }

// h-functionals with B taken from the atoms the constants were solved on
struct JointH {
  const JointSpectrum& sp;
  const RPJointConstants& c;
  double p[2], g, lam;

  JointH(const JointSpectrum& sp_, const RPJointConstants& c_, const ScalingRegime& rg, double lambda)
      : sp(sp_), c(c_), p{rg.p(1), rg.p(2)}, g(rg.gamma), lam(lambda) {
    require(c.b_atoms.size() == sp.atoms().size(), "h_joint: constants were solved on another spectrum");
  }

  template <class Term>
  double sum(Term&& term) const {
    double acc = 0;
    const auto& at = sp.atoms();
    for (std::size_t i = 0; i < at.size(); ++i) {
      const auto& x = at[i].x;
      const double L = p[0] * c.e1 * x.sigma1 + p[1] * c.e2 * x.sigma2;
      const double K = g * c.tau * L + lam;
      const double v = term(x, c.b_atoms[i], K);
      if (!std::isfinite(v)) detail::singular_trace();
      acc += at[i].weight * v;
    }
    return acc;
  }

  template <class A>
  double h(int k, int j, A&& a) const {
    const int jp = 3 - j;
    const double pj = p[j - 1], pjp = p[jp - 1];
    const double ej = c.e(j), ejp = c.e(jp), uj = c.u(j), ujp = c.u(jp);
    const double tau = c.tau, t2 = tau * tau, rho = c.rho;
    switch (k) {
      case 1:
        return pj * g * ej * tau * sum([&](const SpectralPoint& x, double, double K) {
                 return a(x) * x.sigma(j) / K;
               });
      case 2:
        return pj * g * sum([&](const SpectralPoint& x, double B, double K) {
                 const double inner = g * ej * t2 * B + pjp * g * t2 * x.sigma(jp) * (ej * ujp - ejp * uj) +
                                      ej * rho - lam * uj * tau;
                 return a(x) * x.sigma(j) * inner / (K * K);
               });
      case 3:
        return pj * sum([&](const SpectralPoint& x, double B, double K) {
                 const double q = pjp * g * ejp * tau * x.sigma(jp) + lam;
                 const double inner =
                     g * ej * ej * pj * x.sigma(j) * (pjp * g * t2 * ujp * x.sigma(jp) + g * t2 * B + rho) +
                     uj * q * q;
                 return a(x) * x.sigma(j) * inner / (K * K);
               });
      case 4:
        return pj * g * pjp * sum([&](const SpectralPoint& x, double B, double K) {
                 const double inner = g * t2 *
                                          (ej * ejp * B - pj * ej * ej * ujp * x.sigma(j) -
                                           pjp * x.sigma(jp) * ejp * ejp * uj) -
                                      lam * tau * (ej * ujp + ejp * uj) + ej * ejp * rho;
                 return x.sigma(j) * x.sigma(jp) * a(x) * inner / (K * K);
               });
      default:
        fail(ErrorCode::InvalidArgument, "h_joint: k must be 1..4");
    }
  }
};

}  // namespace

double h_joint(int k, int j, const SpectralMap& A, const SpectralMap& B, const RPJointConstants& c,
               const JointSpectrum& sp, const ScalingRegime& rg, double lambda) {
  check_group(j);
  require(lambda > 0, "h_joint: lambda must be positive");
  const auto& at = sp.atoms();
  require(c.b_atoms.size() == at.size(), "h_joint: constants were solved on another spectrum");
  for (std::size_t i = 0; i < at.size(); ++i) {
    const double b = B(at[i].x), ref = c.b_atoms[i];
    if (std::abs(b - ref) > 1e-12 * std::max(1.0, std::abs(ref)))
      fail(ErrorCode::InvalidArgument, "h_joint: B differs from the one used in the linear stage");
  }
  JointH H(sp, c, rg, lambda);
  return H.h(k, j, [&](const SpectralPoint& x) { return A(x); });
}

RiskDecomposition rp_joint_risk(const JointSpectrum& sp, const ScalingRegime& rg, double lambda, double sigma1_sq,
                                double sigma2_sq, int s, const SolverSettings& st) {
  check_group(s);
  require(sigma1_sq >= 0 && sigma2_sq >= 0, "rp_joint_risk: noise variances must be >= 0");
  const double lam = effective_lambda(lambda, st, "rp_joint_risk");
  const auto c = solve_rp_joint(sp, rg, lam, sigma_map(s), st);
  const JointH H(sp, c, rg, lam);
  const double phi = rg.phi;
  const int sp2 = 3 - s;

  auto one = [](const SpectralPoint&) { return 1.0; };
  auto th = [s](const SpectralPoint& x) { return x.theta_s(s); };
  auto thS = [s](const SpectralPoint& x) { return x.theta_s(s) * x.sigma(s); };
  auto de = [](const SpectralPoint& x) { return x.delta; };
  auto deS2 = [](const SpectralPoint& x) { return x.delta * x.sigma2; };

  const double var = sigma1_sq * phi * H.h(2, 1, one) + sigma2_sq * phi * H.h(2, 2, one);
  double bias = tr_func(sp, thS) + H.h(3, 1, th) + H.h(3, 2, th) + 2.0 * H.h(4, 1, th) - 2.0 * H.h(1, 1, thS) -
                2.0 * H.h(1, 2, thS) + H.h(3, sp2, de);
  if (s == 2) bias -= 2.0 * (H.h(3, 1, de) + H.h(4, 2, de) - H.h(1, 1, deS2));

  auto r = finish(bias, var, s, TrainingMode::Joint, ModelFamily::RandomProjection);
  r.residual = c.residual;
  r.iters = c.iters;
  return r;
}

RiskDecomposition rp_separate_risk(const JointSpectrum& sp, int s, double phi_s, double gamma, double lambda_s,
                                   double sigma_s_sq, const SolverSettings& st) {
  check_group(s);
  require(sigma_s_sq >= 0, "rp_separate_risk: noise variance must be >= 0");
  const double lam = effective_lambda(lambda_s, st, "rp_separate_risk");
  const auto c = solve_rp_separate(sp, s, phi_s, gamma, lam, st);
  const double g = gamma, e = c.e, tau = c.tau, u = c.u, rho = c.rho;
  double h1 = 0, h2 = 0, h3 = 0, base = 0;
  for (const auto& a : sp.atoms()) {
    const double S = a.x.sigma(s), T = a.x.theta_s(s);
    const double K = g * tau * e * S + lam, K2 = K * K;
    h1 += a.weight * T * S * S / K;
    h2 += a.weight * S * (g * e * tau * tau * S + e * rho - lam * u * tau) / K2;
    h3 += a.weight * T * S * (g * e * e * S * (g * tau * tau * S + rho) + lam * lam * u) / K2;
    base += a.weight * T * S;
  }
  h1 *= g * e * tau;
  h2 *= g;
  auto r = finish(base + h3 - 2.0 * h1, sigma_s_sq * phi_s * h2, s, TrainingMode::Separate,
                  ModelFamily::RandomProjection);
  r.residual = c.residual;
  r.iters = c.iters;
  return r;
}

RiskDecomposition rp_separate_risk(const JointSpectrum& sp, const ScalingRegime& rg, double lambda_s,
                                   double sigma_s_sq, int s, const SolverSettings& st) {
  rg.validate();
  check_group(s);
  return rp_separate_risk(sp, s, rg.phi_s(s), rg.gamma, lambda_s, sigma_s_sq, st);
}

RiskDecomposition classical_joint_risk(const JointSpectrum& sp, const ScalingRegime& rg, double lambda,
                                       double sigma1_sq, double sigma2_sq, int s, const SolverSettings& st) {
  check_group(s);
  require(sigma1_sq >= 0 && sigma2_sq >= 0, "classical_joint_risk: noise variances must be >= 0");
  const double lam = effective_lambda(lambda, st, "classical_joint_risk");
  const auto c = solve_classical_joint(sp, rg, lam, st);
  const double p[2] = {rg.p(1), rg.p(2)}, e[2] = {c.e1, c.e2}, sig[2] = {sigma1_sq, sigma2_sq};
  const double u[2] = {c.u(1, s), c.u(2, s)};
  const double phi = rg.phi;
  const int si = s - 1, so = 2 - s;  // zero-based own / other group

  double var = 0, b1 = 0, b22 = 0, b3 = 0;
  for (const auto& a : sp.atoms()) {
    const double S[2] = {a.x.sigma1, a.x.sigma2};
    const double K = p[0] * e[0] * S[0] + p[1] * e[1] * S[1] + lam, K2 = K * K;
    for (int k = 0; k < 2; ++k) {
      const int kp = 1 - k;
      var += a.weight * p[k] * sig[k] * phi * S[k] *
             (e[k] * S[si] - lam * u[k] + p[kp] * S[kp] * (e[k] * u[kp] - e[kp] * u[k])) / K2;
    }
    const double q = p[si] * e[si] * S[si] + lam;
    b1 += a.weight * p[so] * a.x.delta * S[so] *
          (p[so] * (1.0 + p[si] * u[si]) * e[so] * e[so] * S[so] * S[si] + u[so] * q * q) / K2;
    b3 += a.weight * lam * lam * a.x.theta_s(s) * (p[0] * u[0] * S[0] + p[1] * u[1] * S[1] + S[si]) / K2;
    if (s == 2)
      b22 += a.weight * p[0] * lam * a.x.delta * S[0] *
             ((1.0 + p[1] * u[1]) * e[0] * S[1] - u[0] * (p[1] * e[1] * S[1] + lam)) / K2;
  }
  auto r = finish(b1 + b3 + 2.0 * b22, var, s, TrainingMode::Joint, ModelFamily::Classical);
  r.residual = c.residual;
  r.iters = c.iters;
  return r;
}

RiskDecomposition classical_separate_risk(const JointSpectrum& sp, int s, double phi_s, double lambda_s,
                                          double sigma_s_sq, const SolverSettings& st) {
  check_group(s);
  require(sigma_s_sq >= 0, "classical_separate_risk: noise variance must be >= 0");
  const auto c = solve_kappa(sp, s, phi_s, lambda_s, st);
  const double k = c.kappa;
  double df2, bnum;
  if (k == 0.0) {
    // lambda = 0, phi_s * I11(0) <= 1
    df2 = sp.positive_fraction(s);
    bnum = 0.0;
  } else {
    df2 = dof(sp, s, 2, 2, k);
    bnum = k * k * tr_func(sp, [&](const SpectralPoint& x) {
             const double S = x.sigma(s);
             return x.theta_s(s) * S / ((S + k) * (S + k));
           });
  }
  const double denom = 1.0 - phi_s * df2;
  if (!(denom > 0)) fail(ErrorCode::Singular, "classical_separate_risk: 1 - phi_s df2 <= 0 (interpolation threshold)");
  auto r = finish(bnum / denom, sigma_s_sq * phi_s * df2 / denom, s, TrainingMode::Separate, ModelFamily::Classical);
  r.residual = c.residual;
  r.iters = c.iters;
  return r;
}

RiskDecomposition rp_separate_risk_unregularized(const JointSpectrum& sp, int s, double psi_s, double gamma,
                                                 double sigma_s_sq, const SolverSettings& st) {
  check_group(s);
  require(sigma_s_sq >= 0, "rp_separate_risk_unregularized: noise variance must be >= 0");
  const auto c = solve_theta0(sp, s, psi_s, gamma, st);
  const double phi_s = psi_s / gamma, t = c.theta0, sig = sigma_s_sq;
  auto thS_res = [&](int pow) {
    return tr_func(sp, [&](const SpectralPoint& x) {
      const double S = x.sigma(s);
      return x.theta_s(s) * S / std::pow(S + t, pow);
    });
  };
  double bias = 0, var = 0;
  switch (c.regime) {
    case InterpolationRegime::UnderparamGammaBelowOne:
      require(psi_s < 1, "rp_separate_risk_unregularized: psi_s must be < 1");
      bias = t * thS_res(1) / (1.0 - psi_s);
      var = sig * psi_s / (1.0 - psi_s);
      break;
    case InterpolationRegime::Interpolating:
      if (!(phi_s < 1)) fail(ErrorCode::Singular, "rp_separate_risk_unregularized: phi_s = 1");
      bias = 0;
      var = sig * phi_s / (1.0 - phi_s);
      break;
    case InterpolationRegime::Overparam: {
      if (!(psi_s > 1)) fail(ErrorCode::Singular, "rp_separate_risk_unregularized: psi_s = 1 (threshold)");
      const double i22 = dof(sp, s, 2, 2, t);
      const double denom = 1.0 - phi_s * i22;
      if (!(denom > 0)) fail(ErrorCode::Singular, "rp_separate_risk_unregularized: 1 - phi_s I22 <= 0");
      bias = t * t * thS_res(2) / denom + t * thS_res(1) / (psi_s - 1.0);
      var = sig * phi_s * i22 / denom + sig / (psi_s - 1.0);
      break;
    }
  }
  auto r = finish(bias, var, s, TrainingMode::Separate, ModelFamily::RandomProjection);
  r.boundary = c.boundary;
  return r;
}

RiskDecomposition rp_separate_risk_unregularized(const JointSpectrum& sp, const ScalingRegime& rg,
                                                 double sigma_s_sq, int s, const SolverSettings& st) {
  rg.validate();
  check_group(s);
  return rp_separate_risk_unregularized(sp, s, rg.psi_s(s), rg.gamma, sigma_s_sq, st);
}

PowerLawLimits power_law_limits(double c, double phi, double sigma1_sq) {
  require(c >= 0 && std::isfinite(c), "power_law_limits: c must be >= 0");
  require(phi > 0 && phi < 0.5, "power_law_limits: need 0 < phi < 1/2");
  require(sigma1_sq >= 0, "power_law_limits: sigma1^2 must be >= 0");
  if (c == 1.0) fail(ErrorCode::Undefined, "power_law_limits: c = 1 makes EDD vanish (ADD unbounded)");
  PowerLawLimits r;
  const double k = 2.0 * phi * sigma1_sq / (1.0 - 2.0 * phi);
  r.odd = k * c;
  r.edd = k * std::abs(c - 1.0);
  r.add = c / std::abs(c - 1.0);
  return r;
}

BiasAmpMetrics metrics(double r1_joint, double r2_joint, double r1_sep, double r2_sep) {
  require(std::isfinite(r1_joint) && std::isfinite(r2_joint) && std::isfinite(r1_sep) && std::isfinite(r2_sep),
          "metrics: risks must be finite");
  BiasAmpMetrics m;
  m.signed_odd = r2_joint - r1_joint;
  m.signed_edd = r2_sep - r1_sep;
  m.odd = std::abs(m.signed_odd);
  m.edd = std::abs(m.signed_edd);
  m.add_defined = m.edd >= 1e-12;
  m.add = m.add_defined ? m.odd / m.edd : std::numeric_limits<double>::quiet_NaN();
  return m;
}

}  // namespace biasamp
