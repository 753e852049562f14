#include "biasamp/fixed_point.hpp"

#include <Eigen/Dense>
#include <array>
#include <limits>
#include <sstream>

namespace biasamp {

namespace {

double rel(double a, double b) {
  const double s = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / s;
}

template <std::size_t N>
double max_rel(const std::array<double, N>& fx, const std::array<double, N>& x) {
  double r = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    if (!std::isfinite(fx[i])) return std::numeric_limits<double>::infinity();
    r = std::max(r, rel(fx[i], x[i]));
  }
  return r;
}

// Newton on R(x) = F(x) - x with a finite-difference Jacobian and step halving that
// keeps every coordinate positive. Returns true and overwrites x on success.
template <std::size_t N, class F>
bool newton_polish(std::array<double, N>& x, F& map, double tol, int* evals) {
  using Vec = Eigen::Matrix<double, static_cast<int>(N), 1>;
  using Mat = Eigen::Matrix<double, static_cast<int>(N), static_cast<int>(N)>;
  auto resid = [&](const std::array<double, N>& y, Vec& out) {
    const auto fy = map(y);
    ++*evals;
    for (std::size_t i = 0; i < N; ++i) out(i) = (fy[i] - y[i]) / y[i];
    return max_rel(fy, y);
  };
  std::array<double, N> cur = x;
  Vec r;
  double rn = resid(cur, r);
  for (int step = 0; step < 40 && std::isfinite(rn); ++step) {
    if (rn < tol) {
      x = cur;
      return true;
    }
    Mat J;
    for (std::size_t j = 0; j < N; ++j) {
      std::array<double, N> y = cur;
      const double h = 1e-7 * y[j];
      y[j] += h;
      Vec rj;
      if (!std::isfinite(resid(y, rj))) return false;
      J.col(static_cast<int>(j)) = (rj - r) / h;
    }
    const Vec dx = J.fullPivLu().solve(-r);
    if (!dx.allFinite()) return false;
    double t = 1.0;
    bool moved = false;
    for (int k = 0; k < 30; ++k, t *= 0.5) {
      std::array<double, N> y = cur;
      bool pos = true;
      for (std::size_t i = 0; i < N; ++i) {
        y[i] += t * dx(static_cast<int>(i));
        pos = pos && y[i] > 0;
      }
      if (!pos) continue;
      Vec ry;
      const double ny = resid(y, ry);
      if (ny < rn) {
        cur = y;
        r = ry;
        rn = ny;
        moved = true;
        break;
      }
    }
    if (!moved) return false;
  }
  if (rn < tol) {
    x = cur;
    return true;
  }
  return false;
}

// Damped Picard x <- (1-eta) x + eta F(x). Where the map contracts slowly (deep in
// an overparameterized regime at tiny lambda) a Newton polish on the same residual is
// attempted periodically; it is accepted only if it reaches tol with positive iterates.
template <std::size_t N, class F>
std::array<double, N> picard(std::array<double, N> x, F&& map, const SolverSettings& st, const char* who,
                             double* residual, int* iters) {
  double best = std::numeric_limits<double>::infinity();
  const double eta = st.damping;
  for (int it = 1; it <= st.max_iter; ++it) {
    const std::array<double, N> fx = map(x);
    for (std::size_t i = 0; i < N; ++i)
      if (!std::isfinite(fx[i])) throw SolverError(std::string(who) + ": iterate became non-finite", best, it);
    const double r = max_rel(fx, x);
    best = std::min(best, r);
    if (r < st.tol) {
      *residual = r;
      *iters = it;
      return x;
    }
    for (std::size_t i = 0; i < N; ++i) x[i] = (1.0 - eta) * x[i] + eta * fx[i];
    if (it >= 200 && it % 100 == 0) {
      int evals = 0;
      std::array<double, N> y = x;
      if (newton_polish(y, map, st.tol, &evals)) {
        *residual = max_rel(map(y), y);
        *iters = it + evals;
        return y;
      }
    }
  }
  throw SolverError(std::string(who) + ": no convergence", best, st.max_iter);
}

template <int N>
Eigen::Matrix<double, N, 1> solve_small(const Eigen::Matrix<double, N, N>& A, const Eigen::Matrix<double, N, 1>& b,
                                        const char* who) {
  // entries can span many decades when tau ~ lambda, so equilibrate before judging conditioning
  using Mat = Eigen::Matrix<double, N, N>;
  using Vec = Eigen::Matrix<double, N, 1>;
  Vec r = A.cwiseAbs().rowwise().maxCoeff();
  for (int i = 0; i < N; ++i) r(i) = r(i) > 0 ? 1.0 / r(i) : 1.0;
  Mat As = r.asDiagonal() * A;
  Vec c = As.cwiseAbs().colwise().maxCoeff().transpose();
  for (int i = 0; i < N; ++i) c(i) = c(i) > 0 ? 1.0 / c(i) : 1.0;
  As = As * c.asDiagonal();
  Eigen::PartialPivLU<Mat> lu(As);
  const double rc = lu.rcond();
  if (!(rc > 1e-14)) {
    std::ostringstream os;
    os << who << ": singular linear stage (rcond " << rc << "), near a phase boundary";
    fail(ErrorCode::Singular, os.str());
  }
  Vec x = c.asDiagonal() * lu.solve(r.asDiagonal() * b);
  if (!x.allFinite()) fail(ErrorCode::Singular, std::string(who) + ": non-finite linear-stage solution");
  return x;
}

}  // namespace

void SolverSettings::validate() const {
  require(tol > 0, "solver: tol must be positive");
  require(max_iter >= 1, "solver: max_iter must be >= 1");
  require(damping > 0 && damping <= 1, "solver: damping must lie in (0,1]");
  require(lambda_floor > 0, "solver: lambda_floor must be positive");
}

double effective_lambda(double lambda, const SolverSettings& st, const char* who) {
  require(std::isfinite(lambda) && lambda >= 0, std::string(who) + ": lambda must be finite and >= 0");
  if (lambda > 0) return lambda;
  std::ostringstream os;
  os << who << ": lambda = 0 replaced by floor " << st.lambda_floor;
  warn(os.str());
  return st.lambda_floor;
}

SpectralMap sigma_map(int s) {
  require(s == 1 || s == 2, "group must be 1 or 2");
  return [s](const SpectralPoint& p) { return p.sigma(s); };
}

// ---- random projections, joint ----

RPJointNonlinear solve_rp_joint_nonlinear(const JointSpectrum& sp, const ScalingRegime& rg, double lambda,
                                          const SolverSettings& st) {
  st.validate();
  rg.validate();
  const double lam = effective_lambda(lambda, st, "solve_rp_joint_nonlinear");
  const double p1 = rg.p(1), p2 = rg.p(2), g = rg.gamma, psi = rg.psi();
  auto F = [&](const std::array<double, 3>& x) {
    const double e1 = x[0], e2 = x[1], tau = x[2];
    double tLK = 0, tS1K = 0, tS2K = 0;
    for (const auto& a : sp.atoms()) {
      const double L = p1 * e1 * a.x.sigma1 + p2 * e2 * a.x.sigma2;
      const double K = g * tau * L + lam;
      tLK += a.weight * L / K;
      tS1K += a.weight * a.x.sigma1 / K;
      tS2K += a.weight * a.x.sigma2 / K;
    }
    return std::array<double, 3>{1.0 / (1.0 + psi * tau * tS1K), 1.0 / (1.0 + psi * tau * tS2K), 1.0 / (1.0 + tLK)};
  };
  RPJointNonlinear out;
  auto x = picard<3>({1.0, 1.0, 1.0}, F, st, "solve_rp_joint_nonlinear", &out.residual, &out.iters);
  out.e1 = x[0];
  out.e2 = x[1];
  out.tau = x[2];
  return out;
}

RPJointConstants solve_rp_joint_linear(const JointSpectrum& sp, const ScalingRegime& rg, double lambda,
                                       const RPJointNonlinear& nl, const SpectralMap& B) {
  rg.validate();
  require(lambda > 0, "solve_rp_joint_linear: lambda must be positive");
  const double p[2] = {rg.p(1), rg.p(2)}, e[2] = {nl.e1, nl.e2};
  const double g = rg.gamma, psi = rg.psi(), tau = nl.tau, lam = lambda;
  // traces over K^-2: S_s S_k, S_s, S_s B, L^2, B
  double tSS[2][2] = {{0, 0}, {0, 0}}, tS[2] = {0, 0}, tSB[2] = {0, 0}, tLL = 0, tB = 0;
  RPJointConstants c;
  c.b_atoms.reserve(sp.atoms().size());
  for (const auto& a : sp.atoms()) {
    const double b = B(a.x);
    require(std::isfinite(b) && b >= 0, "solve_rp_joint_linear: B must be entrywise >= 0");
    c.b_atoms.push_back(b);
    const double S[2] = {a.x.sigma1, a.x.sigma2};
    const double L = p[0] * e[0] * S[0] + p[1] * e[1] * S[1];
    const double K = g * tau * L + lam;
    const double w = a.weight / (K * K);
    for (int s = 0; s < 2; ++s) {
      for (int k = 0; k < 2; ++k) tSS[s][k] += w * S[s] * S[k];
      tS[s] += w * S[s];
      tSB[s] += w * S[s] * b;
    }
    tLL += w * L * L;
    tB += w * b;
  }
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs;
  const double t2 = tau * tau;
  for (int s = 0; s < 2; ++s) {
    const double cs = psi * e[s] * e[s];
    for (int k = 0; k < 2; ++k) A(s, k) = (s == k ? 1.0 : 0.0) - cs * g * t2 * p[k] * tSS[s][k];
    A(s, 2) = -cs * tS[s];
    rhs(s) = cs * g * t2 * tSB[s];
  }
  for (int k = 0; k < 2; ++k) A(2, k) = -t2 * lam * lam * p[k] * tS[k];
  A(2, 2) = 1.0 - t2 * g * tLL;
  rhs(2) = t2 * lam * lam * tB;
  const Eigen::Vector3d x = solve_small<3>(A, rhs, "solve_rp_joint_linear");
  c.e1 = nl.e1;
  c.e2 = nl.e2;
  c.tau = nl.tau;
  c.u1 = x(0);
  c.u2 = x(1);
  c.rho = x(2);
  c.residual = nl.residual;
  c.iters = nl.iters;
  return c;
}

RPJointConstants solve_rp_joint(const JointSpectrum& sp, const ScalingRegime& rg, double lambda,
                                const SpectralMap& B, const SolverSettings& st) {
  const double lam = effective_lambda(lambda, st, "solve_rp_joint");
  const auto nl = solve_rp_joint_nonlinear(sp, rg, lam, st);
  return solve_rp_joint_linear(sp, rg, lam, nl, B);
}

double rp_joint_residual(const JointSpectrum& sp, const ScalingRegime& rg, double lambda,
                         const RPJointConstants& c, const SpectralMap& B) {
  const double p1 = rg.p(1), p2 = rg.p(2), g = rg.gamma, psi = rg.psi(), tau = c.tau, lam = lambda;
  double tLK = 0, tS1K = 0, tS2K = 0, rhoR = 0, u1R = 0, u2R = 0;
  for (const auto& a : sp.atoms()) {
    const double s1 = a.x.sigma1, s2 = a.x.sigma2;
    const double L = p1 * c.e1 * s1 + p2 * c.e2 * s2;
    const double K = g * tau * L + lam;
    const double D = p1 * c.u1 * s1 + p2 * c.u2 * s2 + B(a.x);
    tLK += a.weight * L / K;
    tS1K += a.weight * s1 / K;
    tS2K += a.weight * s2 / K;
    const double w = a.weight / (K * K);
    rhoR += w * (g * c.rho * L * L + lam * lam * D);
    u1R += w * s1 * (g * tau * tau * D + c.rho);
    u2R += w * s2 * (g * tau * tau * D + c.rho);
  }
  return std::max({rel(1.0 / tau, 1.0 + tLK), rel(1.0 / c.e1, 1.0 + psi * tau * tS1K),
                   rel(1.0 / c.e2, 1.0 + psi * tau * tS2K), rel(c.rho, tau * tau * rhoR),
                   rel(c.u1, psi * c.e1 * c.e1 * u1R), rel(c.u2, psi * c.e2 * c.e2 * u2R)});
}

// ---- random projections, separate ----

RPSeparateConstants solve_rp_separate(const JointSpectrum& sp, int s, double phi_s, double gamma, double lambda_s,
                                      const SolverSettings& st) {
  st.validate();
  require(s == 1 || s == 2, "solve_rp_separate: group must be 1 or 2");
  require(phi_s > 0 && gamma > 0, "solve_rp_separate: phi_s and gamma must be positive");
  const double lam = effective_lambda(lambda_s, st, "solve_rp_separate");
  const double psi = phi_s * gamma, g = gamma;
  auto F = [&](const std::array<double, 2>& x) {
    const double e = x[0], tau = x[1];
    double tSK = 0;
    for (const auto& a : sp.atoms()) {
      const double S = a.x.sigma(s);
      tSK += a.weight * S / (g * tau * e * S + lam);
    }
    return std::array<double, 2>{1.0 / (1.0 + psi * tau * tSK), 1.0 / (1.0 + e * tSK)};
  };
  RPSeparateConstants c;
  c.group = s;
  auto x = picard<2>({1.0, 1.0}, F, st, "solve_rp_separate", &c.residual, &c.iters);
  c.e = x[0];
  c.tau = x[1];

  double tSS = 0, tS = 0;
  for (const auto& a : sp.atoms()) {
    const double S = a.x.sigma(s);
    const double K = g * c.tau * c.e * S + lam;
    tSS += a.weight * S * S / (K * K);
    tS += a.weight * S / (K * K);
  }
  const double e2 = c.e * c.e, t2 = c.tau * c.tau;
  // u = psi e^2 tr S(g t^2 (u+1) S + rho) K^-2 ; rho = t^2 tr(g rho e^2 S^2 + lam^2 (u+1) S) K^-2
  Eigen::Matrix2d A;
  A << 1.0 - psi * e2 * g * t2 * tSS, -psi * e2 * tS, -t2 * lam * lam * tS, 1.0 - t2 * g * e2 * tSS;
  const Eigen::Vector2d b(psi * e2 * g * t2 * tSS, t2 * lam * lam * tS);
  const Eigen::Vector2d ur = solve_small<2>(A, b, "solve_rp_separate");
  c.u = ur(0);
  c.rho = ur(1);
  return c;
}

RPSeparateConstants solve_rp_separate(const JointSpectrum& sp, const ScalingRegime& rg, int s, double lambda_s,
                                      const SolverSettings& st) {
  rg.validate();
  return solve_rp_separate(sp, s, rg.phi_s(s), rg.gamma, lambda_s, st);
}

double rp_separate_residual(const JointSpectrum& sp, double phi_s, double gamma, double lambda_s,
                            const RPSeparateConstants& c) {
  const int s = c.group;
  const double psi = phi_s * gamma, g = gamma, lam = lambda_s;
  double tSK = 0, uR = 0, rR = 0;
  for (const auto& a : sp.atoms()) {
    const double S = a.x.sigma(s);
    const double K = g * c.tau * c.e * S + lam;
    tSK += a.weight * S / K;
    const double w = a.weight / (K * K);
    uR += w * S * (g * c.tau * c.tau * (c.u + 1.0) * S + c.rho);
    rR += w * (g * c.rho * c.e * c.e * S * S + lam * lam * (c.u + 1.0) * S);
  }
  return std::max({rel(1.0 / c.e, 1.0 + psi * c.tau * tSK), rel(1.0 / c.tau, 1.0 + c.e * tSK),
                   rel(c.u, psi * c.e * c.e * uR), rel(c.rho, c.tau * c.tau * rR)});
}

// ---- classical ridge ----

ClassicalJointConstants solve_classical_joint(const JointSpectrum& sp, const ScalingRegime& rg, double lambda,
                                              const SolverSettings& st) {
  st.validate();
  rg.validate();
  const double lam = effective_lambda(lambda, st, "solve_classical_joint");
  const double p[2] = {rg.p(1), rg.p(2)}, phi = rg.phi;
  auto F = [&](const std::array<double, 2>& x) {
    double t1 = 0, t2 = 0;
    for (const auto& a : sp.atoms()) {
      const double K = p[0] * x[0] * a.x.sigma1 + p[1] * x[1] * a.x.sigma2 + lam;
      t1 += a.weight * a.x.sigma1 / K;
      t2 += a.weight * a.x.sigma2 / K;
    }
    return std::array<double, 2>{1.0 / (1.0 + phi * t1), 1.0 / (1.0 + phi * t2)};
  };
  ClassicalJointConstants c;
  auto x = picard<2>({1.0, 1.0}, F, st, "solve_classical_joint", &c.residual, &c.iters);
  c.e1 = x[0];
  c.e2 = x[1];
  const double e[2] = {c.e1, c.e2};

  double tSS[2][2] = {{0, 0}, {0, 0}};
  for (const auto& a : sp.atoms()) {
    const double S[2] = {a.x.sigma1, a.x.sigma2};
    const double K = p[0] * e[0] * S[0] + p[1] * e[1] * S[1] + lam;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) tSS[i][j] += a.weight * S[i] * S[j] / (K * K);
  }
  // u_k = phi e_k^2 tr S_k (p1 u1 S1 + p2 u2 S2 + S_s) K^-2, one 2x2 system per target s
  Eigen::Matrix2d A;
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j) A(k, j) = (k == j ? 1.0 : 0.0) - phi * e[k] * e[k] * p[j] * tSS[k][j];
  for (int s = 0; s < 2; ++s) {
    Eigen::Vector2d b;
    for (int k = 0; k < 2; ++k) b(k) = phi * e[k] * e[k] * tSS[k][s];
    const Eigen::Vector2d u = solve_small<2>(A, b, "solve_classical_joint");
    c.u_[s][0] = u(0);
    c.u_[s][1] = u(1);
  }
  return c;
}

double classical_joint_residual(const JointSpectrum& sp, const ScalingRegime& rg, double lambda,
                                const ClassicalJointConstants& c) {
  const double p[2] = {rg.p(1), rg.p(2)}, phi = rg.phi;
  double r = 0;
  double tS[2] = {0, 0}, uR[2][2] = {{0, 0}, {0, 0}};
  for (const auto& a : sp.atoms()) {
    const double S[2] = {a.x.sigma1, a.x.sigma2};
    const double K = p[0] * c.e1 * S[0] + p[1] * c.e2 * S[1] + lambda;
    for (int k = 0; k < 2; ++k) tS[k] += a.weight * S[k] / K;
    for (int s = 0; s < 2; ++s) {
      const double D = p[0] * c.u_[s][0] * S[0] + p[1] * c.u_[s][1] * S[1] + S[s];
      for (int k = 0; k < 2; ++k) uR[s][k] += a.weight * S[k] * D / (K * K);
    }
  }
  for (int k = 0; k < 2; ++k) {
    r = std::max(r, rel(1.0 / c.e(k + 1), 1.0 + phi * tS[k]));
    for (int s = 0; s < 2; ++s) r = std::max(r, rel(c.u_[s][k], phi * c.e(k + 1) * c.e(k + 1) * uR[s][k]));
  }
  return r;
}

ClassicalSeparateConstants solve_kappa(const JointSpectrum& sp, int s, double phi_s, double lambda_s,
                                       const SolverSettings& st) {
  st.validate();
  require(s == 1 || s == 2, "solve_kappa: group must be 1 or 2");
  require(phi_s > 0 && std::isfinite(phi_s), "solve_kappa: phi_s must be positive");
  require(lambda_s >= 0 && std::isfinite(lambda_s), "solve_kappa: lambda_s must be >= 0");
  ClassicalSeparateConstants c;
  c.group = s;
  // zero-penalty, underparameterized: kappa = 0 analytically
  if (lambda_s == 0 && phi_s * sp.positive_fraction(s) <= 1.0) return c;

  auto g = [&](double k) { return k - lambda_s - k * phi_s * dof(sp, s, 1, 1, k); };
  double lo = lambda_s;
  double hi = lambda_s + phi_s * sp.max_eigenvalue(s) * static_cast<double>(sp.dim());
  if (lambda_s == 0) {
    // step off the trivial root at 0
    lo = hi;
    int guard = 0;
    while (g(lo) >= 0) {
      lo *= 0.5;
      if (++guard > 2000) fail(ErrorCode::NoConvergence, "solve_kappa: no positive root bracketed");
    }
  }
  if (!(g(lo) <= 0 && g(hi) >= 0)) fail(ErrorCode::NoConvergence, "solve_kappa: no positive root bracketed");
  int it = 0;
  for (; it < 400 && hi - lo > 1e-17 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0 ? hi : lo) = mid;
  }
  c.kappa = 0.5 * (lo + hi);
  c.iters = it;
  c.residual = std::abs(g(c.kappa)) / std::max(c.kappa, 1e-300);
  if (!(c.residual < std::max(st.tol, 1e-9)))
    throw SolverError("solve_kappa: bisection stalled", c.residual, it);
  return c;
}

// ---- unregularized separate random projections ----

const char* to_string(InterpolationRegime r) {
  switch (r) {
    case InterpolationRegime::UnderparamGammaBelowOne:
      return "underparam-gamma<1";
    case InterpolationRegime::Interpolating:
      return "interpolating";
    case InterpolationRegime::Overparam:
      return "overparam";
  }
  return "?";
}

InterpolationRegime classify_unregularized(double psi_s, double gamma, bool* boundary) {
  require(psi_s > 0 && gamma > 0, "classify_unregularized: rates must be positive");
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); };
  // the dividing lines between the three cases, and nothing else
  if (boundary)
    *boundary = near(psi_s, 1.0) || (psi_s < 1.0 && near(gamma, 1.0)) || (gamma >= 1.0 && near(psi_s, gamma));
  if (psi_s >= 1.0 && psi_s >= gamma) return InterpolationRegime::Overparam;
  if (gamma < 1.0 && psi_s < 1.0) return InterpolationRegime::UnderparamGammaBelowOne;
  return InterpolationRegime::Interpolating;
}

UnregularizedRPConstants solve_theta0(const JointSpectrum& sp, int s, double psi_s, double gamma,
                                      const SolverSettings& st) {
  st.validate();
  require(s == 1 || s == 2, "solve_theta0: group must be 1 or 2");
  UnregularizedRPConstants c;
  c.regime = classify_unregularized(psi_s, gamma, &c.boundary);
  const double phi_s = psi_s / gamma;
  switch (c.regime) {
    case InterpolationRegime::UnderparamGammaBelowOne:
      c.eta0 = gamma;
      break;
    case InterpolationRegime::Interpolating:
      c.eta0 = 1.0;
      break;
    case InterpolationRegime::Overparam:
      c.eta0 = 1.0 / phi_s;
      break;
  }
  const double target = c.eta0;
  const double i0 = sp.positive_fraction(s);
  if (target > i0 * (1.0 + 1e-14)) {
    std::ostringstream os;
    os << "solve_theta0: target I11 = " << target << " exceeds I11(0) = " << i0 << " (no root)";
    fail(ErrorCode::Undefined, os.str());
  }
  if (target >= i0) {
    c.theta0 = 0.0;
  } else {
    auto I = [&](double t) { return dof(sp, s, 1, 1, t); };
    double lo = 0.0, hi = 1.0;
    while (I(hi) > target) {
      hi *= 2.0;
      if (hi > 1e300) fail(ErrorCode::NoConvergence, "solve_theta0: bracket overflow");
    }
    for (int it = 0; it < 400 && hi - lo > 1e-16 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (I(mid) > target ? lo : hi) = mid;
    }
    c.theta0 = 0.5 * (lo + hi);
    const double r = rel(I(c.theta0), target);
    if (!(r < std::max(st.tol, 1e-10))) throw SolverError("solve_theta0: bisection stalled", r, 400);
  }
  c.e0 = 1.0 - phi_s * c.eta0;
  c.tau0 = 1.0 - c.eta0 / gamma;
  return c;
}

UnregularizedRPConstants solve_theta0(const JointSpectrum& sp, const ScalingRegime& rg, int s,
                                      const SolverSettings& st) {
  rg.validate();
  return solve_theta0(sp, s, rg.psi_s(s), rg.gamma, st);
}

// ---- Marchenko-Pastur ----

MPSolution solve_mp(double gamma, double lambda, const SolverSettings& st) {
  st.validate();
  require(gamma > 0 && std::isfinite(gamma), "solve_mp: gamma must be positive");
  require(lambda > 0 && std::isfinite(lambda), "solve_mp: lambda must be positive");
  auto F = [&](const std::array<double, 1>& x) {
    return std::array<double, 1>{1.0 / (lambda + 1.0 / (1.0 + gamma * x[0]))};
  };
  MPSolution out;
  auto x = picard<1>({1.0 / lambda}, F, st, "solve_mp", &out.residual, &out.iters);
  out.m = x[0];
  return out;
}

}  // namespace biasamp
