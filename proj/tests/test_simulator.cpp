#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "biasamp/error.hpp"
#include "biasamp/simulator.hpp"

using namespace biasamp;
using doctest::Approx;

TEST_CASE("counter RNG streams are reproducible and distinct") {
  CounterRng a(1, 2, StreamPurpose::Noise), b(1, 2, StreamPurpose::Noise), c(1, 3, StreamPurpose::Noise),
      d(1, 2, StreamPurpose::Features);
  const auto x = a(), y = b();
  CHECK(x == y);
  CHECK(x != c());
  CHECK(x != d());
  double sum = 0, sq = 0;
  CounterRng g(9, 0, StreamPurpose::Weights);
  for (int i = 0; i < 20000; ++i) {
    const double z = g.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / 20000) < 0.03);
  CHECK(sq / 20000 == Approx(1.0).epsilon(0.03));
}

TEST_CASE("dataset sampling") {
  const auto sp = make_isotropic(20, 1.0, 2.0, 1.0, 0.0);
  const auto a = sample_dataset(sp, 100, 0.5, 1.0, 1.0, 5);
  const auto b = sample_dataset(sp, 100, 0.5, 1.0, 1.0, 5);
  CHECK(a.X == b.X);
  CHECK(a.Y == b.Y);
  CHECK(a.group == b.group);
  CHECK(a.n1 + a.n2 == 100);
  CHECK(a.w1 == a.w2);  // Delta = 0

  const auto q = sample_dataset(sp, 100, 0.5, 0.0, 0.0, 6);
  for (long i = 0; i < q.n; ++i) {
    const double fit = q.X.row(i).dot(q.w_star(q.group[i]));
    CHECK(q.Y(i) == Approx(fit).epsilon(1e-12));
  }
  CHECK_THROWS_AS(sample_dataset(sp, 1, 0.5, 1.0, 1.0, 1), Error);
}

TEST_CASE("group-2 rows carry the group-2 covariance") {
  const auto sp = make_isotropic(50, 1.0, 4.0, 1.0, 0.0);
  const auto ds = sample_dataset(sp, 2000, 0.5, 1.0, 1.0, 11);
  double v1 = 0, v2 = 0;
  for (long i = 0; i < ds.n; ++i) (ds.group[i] == 1 ? v1 : v2) += ds.X.row(i).squaredNorm();
  CHECK(v1 / (ds.n1 * 50.0) == Approx(1.0).epsilon(0.03));
  CHECK(v2 / (ds.n2 * 50.0) == Approx(4.0).epsilon(0.03));
}

TEST_CASE("ridge fits solve their normal equations") {
  const auto sp = make_isotropic(10, 1.0, 1.0, 1.0, 0.5);
  const auto ds = sample_dataset(sp, 50, 0.5, 1.0, 1.0, 3);
  for (auto sub : {Subset::Both, Subset::Group1, Subset::Group2}) {
    const auto fm = fit_classical(ds, sub, 0.1);
    CHECK(normal_equation_residual(fm, ds) < 1e-10);
  }
  // overparameterized projection: dual path
  const auto big = make_isotropic(80, 1.0, 1.0, 1.0, 0.5);
  const auto db = sample_dataset(big, 30, 0.5, 1.0, 1.0, 4);
  const auto rp = fit_rp(db, Subset::Both, 0.01, 60, 17);
  CHECK(normal_equation_residual(rp, db) < 1e-10);
  CHECK_THROWS_AS(fit_classical(ds, Subset::Both, 0.0), Error);
}

TEST_CASE("ridge limits") {
  const auto sp = make_isotropic(10, 1.0, 1.0, 1.0, 0.0);
  auto ds = sample_dataset(sp, 10, 0.5, 1.0, 1.0, 8);
  ds.X = Eigen::MatrixXd::Identity(10, 10);
  const auto fit = fit_classical(ds, Subset::Both, 1e-12);
  CHECK((fit.w_hat - ds.Y).norm() < 1e-9);
  const auto big = fit_classical(ds, Subset::Both, 1e12);
  CHECK(big.w_hat.norm() < 1e-9);
}

TEST_CASE("exact and sampled risks agree") {
  const auto sp = make_isotropic(20, 1.0, 2.0, 1.0, 0.3);
  const auto ds = sample_dataset(sp, 60, 0.5, 1.0, 1.0, 12);
  const auto fm = fit_classical(ds, Subset::Both, 0.05);
  const double ex = exact_risk(fm, ds, sp, 2);
  const auto sr = sampled_risk(fm, ds, sp, 2, 20000, 4);
  CHECK(std::abs(sr.mean - ex) < 4 * sr.std_error);
}

TEST_CASE("monte carlo is independent of thread count") {
  MonteCarloConfig cfg{make_isotropic(40, 1.0, 0.5, 1.0, 0.5)};
  cfg.n = 80;
  cfg.m = 20;
  cfg.lambda = 1e-3;
  cfg.threads = 1;
  const auto a = monte_carlo(cfg, 6, 21);
  cfg.threads = 3;
  const auto b = monte_carlo(cfg, 6, 21);
  REQUIRE(a.runs.size() == 6);
  for (size_t i = 0; i < a.runs.size(); ++i) {
    CHECK(a.runs[i].r1j == b.runs[i].r1j);
    CHECK(a.runs[i].r2s == b.runs[i].r2s);
  }
  CHECK(a.r1j.count == 6);
  CHECK(a.seeds.size() == 6);
  CHECK_THROWS_AS(monte_carlo(cfg, 1, 21), Error);
}

TEST_CASE("nested protocol shares weights within an outer block") {
  MonteCarloConfig cfg{make_isotropic(10, 1.0, 1.0, 1.0, 1.0)};
  cfg.nested = true;
  const auto k0 = replicate_key(cfg, 25, 0, 1), k4 = replicate_key(cfg, 25, 4, 1), k5 = replicate_key(cfg, 25, 5, 1);
  CHECK(k0.weights_index == k4.weights_index);
  CHECK(k0.weights_index != k5.weights_index);
  CHECK(k0.data_index != k4.data_index);
}

TEST_CASE("sampled Wishart trace matches the fixed point") {
  CHECK(mp_empirical_trace(400, 1.0, 1.0, 1) == Approx((std::sqrt(5.0) - 1) / 2).epsilon(0.02));
}
