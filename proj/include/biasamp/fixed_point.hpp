#pragma once

#include <functional>
#include <vector>

#include "biasamp/spectrum.hpp"

namespace biasamp {

struct SolverSettings {
  double tol = 1e-12;
  int max_iter = 20000;
  double damping = 0.5;
  double lambda_floor = 1e-8;  // used when lambda == 0 is requested

  void validate() const;
};

// Requested lambda, or the floor (with a warning) when it is zero.
double effective_lambda(double lambda, const SolverSettings& st, const char* who);

// Per-direction matrix value, e.g. B = Sigma_s.
using SpectralMap = std::function<double(const SpectralPoint&)>;
SpectralMap sigma_map(int s);

struct RPJointNonlinear {
  double e1 = 1, e2 = 1, tau = 1;
  double residual = 0;
  int iters = 0;
};

struct RPJointConstants {
  double e1 = 1, e2 = 1, tau = 1;
  double u1 = 0, u2 = 0, rho = 0;
  double residual = 0;  // nonlinear stage
  int iters = 0;
  std::vector<double> b_atoms;  // B evaluated on spectrum atoms, for consistency checks

  double e(int s) const { return s == 1 ? e1 : e2; }
  double u(int s) const { return s == 1 ? u1 : u2; }
};

RPJointNonlinear solve_rp_joint_nonlinear(const JointSpectrum& sp, const ScalingRegime& rg, double lambda,
                                          const SolverSettings& st = {});
RPJointConstants solve_rp_joint_linear(const JointSpectrum& sp, const ScalingRegime& rg, double lambda,
                                       const RPJointNonlinear& nl, const SpectralMap& B);
RPJointConstants solve_rp_joint(const JointSpectrum& sp, const ScalingRegime& rg, double lambda,
                                const SpectralMap& B, const SolverSettings& st = {});
// max relative residual of all six defining equations
double rp_joint_residual(const JointSpectrum& sp, const ScalingRegime& rg, double lambda,
                         const RPJointConstants& c, const SpectralMap& B);

struct RPSeparateConstants {
  int group = 1;
  double e = 1, tau = 1, u = 0, rho = 0;
  double residual = 0;
  int iters = 0;
};

RPSeparateConstants solve_rp_separate(const JointSpectrum& sp, int s, double phi_s, double gamma, double lambda_s,
                                      const SolverSettings& st = {});
RPSeparateConstants solve_rp_separate(const JointSpectrum& sp, const ScalingRegime& rg, int s, double lambda_s,
                                      const SolverSettings& st = {});
double rp_separate_residual(const JointSpectrum& sp, double phi_s, double gamma, double lambda_s,
                            const RPSeparateConstants& c);

struct ClassicalJointConstants {
  double e1 = 1, e2 = 1;
  double u_[2][2] = {{0, 0}, {0, 0}};  // u_[s-1][k-1] = u_k^(s)
  double residual = 0;
  int iters = 0;

  double e(int k) const { return k == 1 ? e1 : e2; }
  double u(int k, int s) const { return u_[s - 1][k - 1]; }
};

ClassicalJointConstants solve_classical_joint(const JointSpectrum& sp, const ScalingRegime& rg, double lambda,
                                              const SolverSettings& st = {});
double classical_joint_residual(const JointSpectrum& sp, const ScalingRegime& rg, double lambda,
                                const ClassicalJointConstants& c);

struct ClassicalSeparateConstants {
  int group = 1;
  double kappa = 0;
  double residual = 0;
  int iters = 0;
};

// kappa - lambda = kappa * phi * df1(kappa)
ClassicalSeparateConstants solve_kappa(const JointSpectrum& sp, int s, double phi_s, double lambda_s,
                                       const SolverSettings& st = {});

enum class InterpolationRegime { UnderparamGammaBelowOne, Interpolating, Overparam };
const char* to_string(InterpolationRegime r);
InterpolationRegime classify_unregularized(double psi_s, double gamma, bool* boundary = nullptr);

struct UnregularizedRPConstants {
  InterpolationRegime regime = InterpolationRegime::Interpolating;
  bool boundary = false;
  double theta0 = 0, eta0 = 1, e0 = 0, tau0 = 0;
};

UnregularizedRPConstants solve_theta0(const JointSpectrum& sp, int s, double psi_s, double gamma,
                                      const SolverSettings& st = {});
UnregularizedRPConstants solve_theta0(const JointSpectrum& sp, const ScalingRegime& rg, int s,
                                      const SolverSettings& st = {});

struct MPSolution {
  double m = 0;
  double residual = 0;
  int iters = 0;
};

// 1/m = lambda + 1/(1 + gamma m)
MPSolution solve_mp(double gamma, double lambda, const SolverSettings& st = {});

}  // namespace biasamp
