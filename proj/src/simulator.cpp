#include "biasamp/simulator.hpp"

#include <cmath>
#include <sstream>

#include "parallel.hpp"

namespace biasamp {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kReseedOffset = 0xA5A5A5A5DEADBEEFULL;

std::uint64_t splitmix(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t base_seed, std::uint64_t index, StreamPurpose purpose)
    : key_(splitmix(splitmix(splitmix(base_seed) ^ index) ^ static_cast<std::uint64_t>(purpose))) {}

CounterRng::result_type CounterRng::operator()() { return splitmix(key_ + (ctr_++) * kGolden); }

double CounterRng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double CounterRng::normal() { return normal_(*this); }

Dataset sample_dataset(const JointSpectrum& sp, long n, double p1, double sigma1_sq, double sigma2_sq,
                       const SeedKey& key) {
  require(n >= 2, "sample_dataset: n must be >= 2");
  require(p1 > 0 && p1 < 1, "sample_dataset: p1 must lie in (0,1)");
  require(sigma1_sq >= 0 && sigma2_sq >= 0, "sample_dataset: noise variances must be >= 0");
  const long d = static_cast<long>(sp.dim());
  Dataset ds;
  ds.n = n;
  ds.d = d;

  CounterRng wr(key.base, key.weights_index, StreamPurpose::Weights);
  ds.w1.resize(d);
  ds.w2.resize(d);
  for (long k = 0; k < d; ++k) ds.w1(k) = wr.normal() * std::sqrt(sp.theta()[k] / static_cast<double>(d));
  for (long k = 0; k < d; ++k) ds.w2(k) = ds.w1(k) + wr.normal() * std::sqrt(sp.delta()[k] / static_cast<double>(d));

  // one retry on an empty group, then give up
  std::uint64_t base = key.base;
  for (int attempt = 0;; ++attempt) {
    CounterRng gr(base, key.data_index, StreamPurpose::Group);
    ds.group.assign(static_cast<std::size_t>(n), 1);
    ds.n1 = 0;
    for (long i = 0; i < n; ++i) {
      ds.group[i] = gr.uniform() < p1 ? 1 : 2;
      ds.n1 += ds.group[i] == 1;
    }
    ds.n2 = n - ds.n1;
    if (ds.n1 > 0 && ds.n2 > 0) break;
    if (attempt == 1) fail(ErrorCode::InvalidArgument, "sample_dataset: a group is empty after one reseed");
    base += kReseedOffset;
    ds.reseeds = 1;
  }

  std::vector<double> sd1(d), sd2(d);
  for (long k = 0; k < d; ++k) {
    sd1[k] = std::sqrt(sp.sigma1()[k]);
    sd2[k] = std::sqrt(sp.sigma2()[k]);
  }
  CounterRng fr(base, key.data_index, StreamPurpose::Features);
  ds.X.resize(n, d);
  for (long i = 0; i < n; ++i) {
    const auto& sd = ds.group[i] == 1 ? sd1 : sd2;
    for (long k = 0; k < d; ++k) ds.X(i, k) = fr.normal() * sd[k];
  }
  CounterRng nr(base, key.data_index, StreamPurpose::Noise);
  ds.Y.resize(n);
  const double ns1 = std::sqrt(sigma1_sq), ns2 = std::sqrt(sigma2_sq);
  for (long i = 0; i < n; ++i) {
    const bool g1 = ds.group[i] == 1;
    ds.Y(i) = ds.X.row(i).dot(g1 ? ds.w1 : ds.w2) + nr.normal() * (g1 ? ns1 : ns2);
  }
  return ds;
}

Eigen::MatrixXd sample_projection(long d, long m, const SeedKey& key) {
  require(d >= 1 && m >= 1, "sample_projection: d and m must be positive");
  CounterRng r(key.base, key.data_index, StreamPurpose::Projection);
  Eigen::MatrixXd S(d, m);
  const double sc = 1.0 / std::sqrt(static_cast<double>(d));
  for (long j = 0; j < m; ++j)
    for (long k = 0; k < d; ++k) S(k, j) = r.normal() * sc;
  return S;
}

namespace {

struct Rows {
  Eigen::MatrixXd X;
  Eigen::VectorXd Y;
};

Rows select(const Dataset& ds, Subset subset) {
  if (subset == Subset::Both) return {ds.X, ds.Y};
  const int g = static_cast<int>(subset);
  const long cnt = g == 1 ? ds.n1 : ds.n2;
  require(cnt > 0, "fit: selected group is empty");
  Rows r{Eigen::MatrixXd(cnt, ds.d), Eigen::VectorXd(cnt)};
  long j = 0;
  for (long i = 0; i < ds.n; ++i) {
    if (ds.group[i] != g) continue;
    r.X.row(j) = ds.X.row(i);
    r.Y(j) = ds.Y(i);
    ++j;
  }
  return r;
}

// argmin ||A x - y||^2 / n~ + lambda ||x||^2 via Cholesky in the smaller dimension
Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double ridge) {
  const long r = A.rows(), c = A.cols();
  if (c <= r) {
    Eigen::MatrixXd G = Eigen::MatrixXd::Identity(c, c) * ridge;
    G.selfadjointView<Eigen::Lower>().rankUpdate(A.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) fail(ErrorCode::Singular, "fit: Cholesky factorization failed");
    return llt.solve(A.transpose() * y);
  }
  Eigen::MatrixXd G = Eigen::MatrixXd::Identity(r, r) * ridge;
  G.selfadjointView<Eigen::Lower>().rankUpdate(A);
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) fail(ErrorCode::Singular, "fit: Cholesky factorization failed");
  return A.transpose() * llt.solve(y);
}

}  // namespace

FittedModel fit_classical(const Dataset& ds, Subset subset, double lambda) {
  require(lambda > 0 && std::isfinite(lambda), "fit_classical: lambda must be positive");
  const Rows rw = select(ds, subset);
  FittedModel fm;
  fm.family = ModelFamily::Classical;
  fm.trained_on = subset;
  fm.lambda = lambda;
  fm.n_tilde = static_cast<double>(rw.X.rows());
  fm.w_hat = ridge_solve(rw.X, rw.Y, fm.n_tilde * lambda);
  if (!fm.w_hat.allFinite()) fail(ErrorCode::Singular, "fit_classical: non-finite solution");
  return fm;
}

FittedModel fit_rp(const Dataset& ds, Subset subset, double lambda, std::shared_ptr<const Eigen::MatrixXd> S) {
  require(lambda > 0 && std::isfinite(lambda), "fit_rp: lambda must be positive");
  require(S && S->rows() == ds.d && S->cols() >= 1, "fit_rp: projection must be d x m with m >= 1");
  const Rows rw = select(ds, subset);
  FittedModel fm;
  fm.family = ModelFamily::RandomProjection;
  fm.trained_on = subset;
  fm.lambda = lambda;
  fm.n_tilde = static_cast<double>(rw.X.rows());
  const Eigen::MatrixXd Z = rw.X * (*S);
  fm.eta = ridge_solve(Z, rw.Y, fm.n_tilde * lambda);
  fm.w_hat = (*S) * fm.eta;
  fm.projection = std::move(S);
  if (!fm.w_hat.allFinite()) fail(ErrorCode::Singular, "fit_rp: non-finite solution");
  return fm;
}

FittedModel fit_rp(const Dataset& ds, Subset subset, double lambda, long m, std::uint64_t proj_seed) {
  require(m >= 1, "fit_rp: m must be >= 1");
  auto S = std::make_shared<const Eigen::MatrixXd>(sample_projection(ds.d, m, SeedKey{proj_seed, 0, 0}));
  auto fm = fit_rp(ds, subset, lambda, std::move(S));
  fm.projection_seed = proj_seed;
  return fm;
}

double normal_equation_residual(const FittedModel& model, const Dataset& ds) {
  const Rows rw = select(ds, model.trained_on);
  const double ridge = model.n_tilde * model.lambda;
  Eigen::MatrixXd A;
  Eigen::VectorXd x;
  if (model.family == ModelFamily::Classical) {
    A = rw.X;
    x = model.w_hat;
  } else {
    A = rw.X * (*model.projection);
    x = model.eta;
  }
  const Eigen::VectorXd rhs = A.transpose() * rw.Y;
  const Eigen::VectorXd lhs = A.transpose() * (A * x) + ridge * x;
  const double nb = rhs.norm();
  return nb > 0 ? (lhs - rhs).norm() / nb : (lhs - rhs).norm();
}

double exact_risk(const FittedModel& model, const Dataset& ds, const JointSpectrum& sp, int s) {
  require(s == 1 || s == 2, "exact_risk: group must be 1 or 2");
  require(model.w_hat.size() == static_cast<long>(sp.dim()), "exact_risk: model and spectrum dimensions differ");
  const auto& sig = sp.sigma(s);
  const Eigen::VectorXd& w = ds.w_star(s);
  double acc = 0;
  for (long k = 0; k < w.size(); ++k) {
    const double dlt = model.w_hat(k) - w(k);
    acc += sig[k] * dlt * dlt;
  }
  return acc;
}

SampledRisk sampled_risk(const FittedModel& model, const Dataset& ds, const JointSpectrum& sp, int s, long samples,
                         std::uint64_t seed) {
  require(s == 1 || s == 2, "sampled_risk: group must be 1 or 2");
  require(samples >= 2, "sampled_risk: need at least 2 samples");
  const long d = static_cast<long>(sp.dim());
  const Eigen::VectorXd diff = model.w_hat - ds.w_star(s);
  std::vector<double> sd(d);
  for (long k = 0; k < d; ++k) sd[k] = std::sqrt(sp.sigma(s)[k]);
  CounterRng r(seed, static_cast<std::uint64_t>(s), StreamPurpose::Features);
  double sum = 0, sum2 = 0;
  for (long i = 0; i < samples; ++i) {
    double v = 0;
    for (long k = 0; k < d; ++k) v += r.normal() * sd[k] * diff(k);
    v *= v;
    sum += v;
    sum2 += v * v;
  }
  const double ns = static_cast<double>(samples);
  const double mean = sum / ns;
  const double var = std::max(0.0, (sum2 - ns * mean * mean) / (ns - 1.0));
  return {mean, std::sqrt(var / ns)};
}

SeedKey replicate_key(const MonteCarloConfig& cfg, long replicates, long r, std::uint64_t base_seed) {
  const auto ur = static_cast<std::uint64_t>(r);
  if (!cfg.nested) return {base_seed, ur, ur};
  const long inner = replicates / cfg.nested_outer;
  return {base_seed, ur, static_cast<std::uint64_t>(r / inner)};
}

ReplicateRisks run_replicate(const MonteCarloConfig& cfg, const SeedKey& key, int* reseeds) {
  const auto& sp = cfg.spectrum;
  const Dataset ds = sample_dataset(sp, cfg.n, cfg.p1, cfg.sigma1_sq, cfg.sigma2_sq, key);
  if (reseeds) *reseeds = ds.reseeds;
  FittedModel joint, sep1, sep2;
  if (cfg.family == ModelFamily::RandomProjection) {
    require(cfg.m >= 1, "monte_carlo: projection width m must be >= 1");
    auto S = std::make_shared<const Eigen::MatrixXd>(sample_projection(ds.d, cfg.m, key));
    joint = fit_rp(ds, Subset::Both, cfg.lambda, S);
    sep1 = fit_rp(ds, Subset::Group1, cfg.lambda, S);
    sep2 = fit_rp(ds, Subset::Group2, cfg.lambda, S);
  } else {
    joint = fit_classical(ds, Subset::Both, cfg.lambda);
    sep1 = fit_classical(ds, Subset::Group1, cfg.lambda);
    sep2 = fit_classical(ds, Subset::Group2, cfg.lambda);
  }
  auto risk = [&](const FittedModel& fm, int s) {
    if (!cfg.use_sampled_risk) return exact_risk(fm, ds, sp, s);
    return sampled_risk(fm, ds, sp, s, cfg.risk_samples, key.base ^ (key.data_index * kGolden)).mean;
  };
  return {risk(joint, 1), risk(joint, 2), risk(sep1, 1), risk(sep2, 2)};
}

namespace {

QuantityStats stats(const std::vector<double>& v) {
  QuantityStats q;
  q.count = static_cast<long>(v.size());
  if (v.empty()) return q;
  double s = 0;
  for (double x : v) s += x;
  q.mean = s / static_cast<double>(v.size());
  if (v.size() >= 2) {
    double ss = 0;
    for (double x : v) ss += (x - q.mean) * (x - q.mean);
    q.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return q;
}

}  // namespace

MonteCarloReport monte_carlo(const MonteCarloConfig& cfg, long replicates, std::uint64_t base_seed) {
  require(replicates >= 2, "monte_carlo: replicates must be >= 2");
  require(cfg.n >= 2, "monte_carlo: n must be >= 2");
  require(cfg.lambda > 0, "monte_carlo: lambda must be positive");
  if (cfg.nested)
    require(cfg.nested_outer >= 1 && replicates % cfg.nested_outer == 0,
            "monte_carlo: nested mode needs replicates divisible by the outer count");

  MonteCarloReport rep;
  rep.base_seed = base_seed;
  rep.replicates = replicates;
  rep.runs.resize(static_cast<std::size_t>(replicates));
  rep.seeds.resize(static_cast<std::size_t>(replicates));
  detail::parallel_for(static_cast<std::size_t>(replicates), cfg.threads, [&](std::size_t i) {
    const long r = static_cast<long>(i);
    const SeedKey key = replicate_key(cfg, replicates, r, base_seed);
    int reseeds = 0;
    try {
      rep.runs[i] = run_replicate(cfg, key, &reseeds);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "replicate " << r << ": " << e.what();
      throw Error(e.code(), os.str());
    }
    rep.seeds[i] = {r, key, reseeds};
  });

  // reduction in replicate order
  std::vector<double> a, b, c, d, odd, edd, add, so, se;
  for (const auto& x : rep.runs) {
    a.push_back(x.r1j);
    b.push_back(x.r2j);
    c.push_back(x.r1s);
    d.push_back(x.r2s);
    so.push_back(x.r2j - x.r1j);
    se.push_back(x.r2s - x.r1s);
    odd.push_back(std::abs(so.back()));
    edd.push_back(std::abs(se.back()));
    if (edd.back() >= 1e-12)
      add.push_back(odd.back() / edd.back());
    else
      ++rep.add_skipped;
  }
  rep.r1j = stats(a);
  rep.r2j = stats(b);
  rep.r1s = stats(c);
  rep.r2s = stats(d);
  rep.odd = stats(odd);
  rep.edd = stats(edd);
  rep.add = stats(add);
  rep.signed_odd = stats(so);
  rep.signed_edd = stats(se);
  if (std::abs(rep.signed_edd.mean) >= 1e-12) rep.add_of_means = std::abs(rep.signed_odd.mean / rep.signed_edd.mean);
  return rep;
}

double mp_empirical_trace(long d, double gamma, double lambda, std::uint64_t seed) {
  require(d >= 1 && gamma > 0 && lambda > 0, "mp_empirical_trace: need d >= 1, gamma > 0, lambda > 0");
  const long n = std::max(1L, std::lround(static_cast<double>(d) / gamma));
  CounterRng r(seed, 0, StreamPurpose::Features);
  Eigen::MatrixXd X(n, d);
  for (long j = 0; j < d; ++j)
    for (long i = 0; i < n; ++i) X(i, j) = r.normal();
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(d, d) * lambda;
  A.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose(), 1.0 / static_cast<double>(n));
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) fail(ErrorCode::Singular, "mp_empirical_trace: factorization failed");
  // tr A^-1 = ||L^-1||_F^2
  Eigen::MatrixXd Linv = Eigen::MatrixXd::Identity(d, d);
  llt.matrixL().solveInPlace(Linv);
  return Linv.squaredNorm() / static_cast<double>(d);
}

}  // namespace biasamp
