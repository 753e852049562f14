#pragma once

#include "biasamp/fixed_point.hpp"

namespace biasamp {

enum class TrainingMode { Joint, Separate };
enum class ModelFamily { Classical, RandomProjection };
const char* to_string(TrainingMode m);
const char* to_string(ModelFamily f);

struct RiskDecomposition {
  double bias = 0, variance = 0, total = 0;
  int group = 1;
  TrainingMode mode = TrainingMode::Joint;
  ModelFamily family = ModelFamily::RandomProjection;
  // solver diagnostics
  double residual = 0;
  int iters = 0;
  bool boundary = false;  // unregularized path sat on a regime boundary
};

struct BiasAmpMetrics {
  double odd = 0, edd = 0, add = 0;
  bool add_defined = false;  // false when |EDD| < 1e-12; add is NaN then
  double signed_odd = 0, signed_edd = 0;
};

// k in 1..4, group j in {1,2}; B must be the matrix the constants were solved with.
double h_joint(int k, int j, const SpectralMap& A, const SpectralMap& B, const RPJointConstants& c,
               const JointSpectrum& sp, const ScalingRegime& rg, double lambda);

RiskDecomposition rp_joint_risk(const JointSpectrum& sp, const ScalingRegime& rg, double lambda, double sigma1_sq,
                                double sigma2_sq, int s, const SolverSettings& st = {});
RiskDecomposition rp_separate_risk(const JointSpectrum& sp, int s, double phi_s, double gamma, double lambda_s,
                                   double sigma_s_sq, const SolverSettings& st = {});
RiskDecomposition rp_separate_risk(const JointSpectrum& sp, const ScalingRegime& rg, double lambda_s,
                                   double sigma_s_sq, int s, const SolverSettings& st = {});
RiskDecomposition classical_joint_risk(const JointSpectrum& sp, const ScalingRegime& rg, double lambda,
                                       double sigma1_sq, double sigma2_sq, int s, const SolverSettings& st = {});
RiskDecomposition classical_separate_risk(const JointSpectrum& sp, int s, double phi_s, double lambda_s,
                                          double sigma_s_sq, const SolverSettings& st = {});
// lambda -> 0 limit of rp_separate_risk, by regime
RiskDecomposition rp_separate_risk_unregularized(const JointSpectrum& sp, int s, double psi_s, double gamma,
                                                 double sigma_s_sq, const SolverSettings& st = {});
RiskDecomposition rp_separate_risk_unregularized(const JointSpectrum& sp, const ScalingRegime& rg,
                                                 double sigma_s_sq, int s, const SolverSettings& st = {});

struct PowerLawLimits {
  double odd = 0, edd = 0, add = 0;
};
// p = 1/2 power-law limits; c = sigma2^2 / sigma1^2
PowerLawLimits power_law_limits(double c, double phi, double sigma1_sq);

BiasAmpMetrics metrics(double r1_joint, double r2_joint, double r1_sep, double r2_sep);

}  // namespace biasamp
