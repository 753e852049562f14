#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <vector>

#include "biasamp/risk.hpp"

namespace biasamp {

enum class StreamPurpose : std::uint64_t { Weights = 1, Features = 2, Noise = 3, Projection = 4, Group = 5 };

// Counter-based generator: output k is a hash of (key, k), so every
// (base_seed, index, purpose) stream is independent of draw order elsewhere.
class CounterRng {
 public:
  using result_type = std::uint64_t;
  CounterRng(std::uint64_t base_seed, std::uint64_t index, StreamPurpose purpose);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();
  double uniform();  // [0, 1)
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
  std::normal_distribution<double> normal_;
};

struct SeedKey {
  std::uint64_t base = 0;
  std::uint64_t data_index = 0;     // features, noise, groups, projection
  std::uint64_t weights_index = 0;  // w1*, delta
};

struct Dataset {
  long n = 0, d = 0;
  Eigen::MatrixXd X;       // n x d, shared eigenbasis
  Eigen::VectorXd Y;       // n
  std::vector<int> group;  // 1 or 2
  Eigen::VectorXd w1, w2;  // true weights
  long n1 = 0, n2 = 0;
  int reseeds = 0;  // 1 if the first group draw was degenerate

  const Eigen::VectorXd& w_star(int s) const { return s == 1 ? w1 : w2; }
};

Dataset sample_dataset(const JointSpectrum& sp, long n, double p1, double sigma1_sq, double sigma2_sq,
                       const SeedKey& key);
inline Dataset sample_dataset(const JointSpectrum& sp, long n, double p1, double sigma1_sq, double sigma2_sq,
                              std::uint64_t seed) {
  return sample_dataset(sp, n, p1, sigma1_sq, sigma2_sq, SeedKey{seed, 0, 0});
}

enum class Subset { Both = 0, Group1 = 1, Group2 = 2 };

struct FittedModel {
  Eigen::VectorXd w_hat;
  ModelFamily family = ModelFamily::Classical;
  Subset trained_on = Subset::Both;
  double lambda = 0;
  double n_tilde = 0;  // normalizing count: n (joint) or n_s (separate)
  std::uint64_t projection_seed = 0;
  std::shared_ptr<const Eigen::MatrixXd> projection;  // d x m (RP only)
  Eigen::VectorXd eta;                                // m (RP only)
};

// S with N(0, 1/d) entries
Eigen::MatrixXd sample_projection(long d, long m, const SeedKey& key);

FittedModel fit_classical(const Dataset& ds, Subset subset, double lambda);
FittedModel fit_rp(const Dataset& ds, Subset subset, double lambda, std::shared_ptr<const Eigen::MatrixXd> S);
FittedModel fit_rp(const Dataset& ds, Subset subset, double lambda, long m, std::uint64_t proj_seed);

// ||(A^T A + n~ lambda I) x - A^T Y|| / ||A^T Y|| in the model's own coordinates
double normal_equation_residual(const FittedModel& model, const Dataset& ds);

// sum_k sigma_s[k] (w_hat_k - w*_{s,k})^2
double exact_risk(const FittedModel& model, const Dataset& ds, const JointSpectrum& sp, int s);

struct SampledRisk {
  double mean = 0, std_error = 0;
};
// test-sample estimate, kept for parity with a sampling protocol
SampledRisk sampled_risk(const FittedModel& model, const Dataset& ds, const JointSpectrum& sp, int s, long samples,
                         std::uint64_t seed);

struct MonteCarloConfig {
  JointSpectrum spectrum;
  long n = 400;
  double p1 = 0.5;
  double sigma1_sq = 1, sigma2_sq = 1;
  double lambda = 1e-6;
  ModelFamily family = ModelFamily::RandomProjection;
  long m = 0;               // projection width (RP only)
  bool nested = false;      // outer loop redraws weights, inner loop the rest
  int nested_outer = 5;
  int threads = 0;          // 0: hardware concurrency
  bool use_sampled_risk = false;
  long risk_samples = 10000;
};

struct QuantityStats {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double std = std::numeric_limits<double>::quiet_NaN();
  long count = 0;
};

struct ReplicateRisks {
  double r1j = 0, r2j = 0, r1s = 0, r2s = 0;
};

struct SeedRecord {
  long replicate = 0;
  SeedKey key;
  int reseeds = 0;
};

struct MonteCarloReport {
  std::uint64_t base_seed = 0;
  long replicates = 0;
  QuantityStats r1j, r2j, r1s, r2s, odd, edd, add, signed_odd, signed_edd;
  double add_of_means = std::numeric_limits<double>::quiet_NaN();
  long add_skipped = 0;
  std::vector<ReplicateRisks> runs;
  std::vector<SeedRecord> seeds;
};

SeedKey replicate_key(const MonteCarloConfig& cfg, long replicates, long r, std::uint64_t base_seed);
ReplicateRisks run_replicate(const MonteCarloConfig& cfg, const SeedKey& key, int* reseeds = nullptr);
MonteCarloReport monte_carlo(const MonteCarloConfig& cfg, long replicates, std::uint64_t base_seed);

// (1/d) tr (X^T X / n + lambda I)^-1 with n = round(d / gamma)
double mp_empirical_trace(long d, double gamma, double lambda, std::uint64_t seed);

}  // namespace biasamp
