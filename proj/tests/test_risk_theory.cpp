#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "biasamp/error.hpp"
#include "biasamp/risk.hpp"
#include "biasamp/spectrum.hpp"

using namespace biasamp;
using doctest::Approx;

TEST_CASE("classical separate variance closed form") {
  const auto sp = make_isotropic(100, 1, 1, 1, 0);
  for (double phi : {0.25, 0.5, 0.8}) {
    const auto r = classical_separate_risk(sp, 1, phi, 1e-8, 1.0);
    CHECK(r.variance == Approx(phi / (1 - phi)).epsilon(1e-5));
    CHECK(r.bias < 1e-6);
    CHECK(r.total == Approx(r.bias + r.variance));
  }
}

TEST_CASE("classical ridge at large lambda returns the null risk") {
  const auto sp = make_isotropic(100, 1, 1, 2, 0);
  const auto r = classical_separate_risk(sp, 1, 0.5, 1e8, 1.0);
  CHECK(r.bias == Approx(2.0).epsilon(1e-6));  // ||w*||^2_Sigma
  CHECK(r.variance < 1e-6);
}

TEST_CASE("unregularized separate RP, isotropic cases") {
  const auto sp = make_isotropic(10, 1, 1, 1, 0);
  // gamma < 1, psi_s < 1
  auto r = rp_separate_risk_unregularized(sp, 1, 0.5, 0.8, 1.0);
  CHECK(r.variance == Approx(1.0).epsilon(1e-9));  // psi/(1-psi)
  // interpolating: zero bias, classical variance
  r = rp_separate_risk_unregularized(sp, 1, 0.5, 2.0, 1.0);
  CHECK(r.bias == 0.0);
  CHECK(r.variance == Approx(0.25 / 0.75).epsilon(1e-12));
  CHECK_THROWS_AS(rp_separate_risk_unregularized(sp, 1, 1.0, 0.5, 1.0), Error);  // psi_s = 1 singular
}

TEST_CASE("RP joint risk is equivariant under a group swap") {
  std::vector<double> s1, s2, th;
  for (int k = 1; k <= 30; ++k) {
    s1.push_back(1.0 / k + 0.1);
    s2.push_back(2.0 / (k + 1));
    th.push_back(1.0);
  }
  const JointSpectrum sp(s1, s2, th, std::vector<double>(30, 0.0));
  const auto rg = ScalingRegime::from_rates(0.3, 0.7, 1.4);
  const auto rs = ScalingRegime::from_rates(0.7, 0.7, 1.4);
  const auto a = rp_joint_risk(sp, rg, 0.01, 1.0, 0.5, 1);
  const auto b = rp_joint_risk(sp.swapped(), rs, 0.01, 0.5, 1.0, 2);
  CHECK(a.bias == Approx(b.bias).epsilon(1e-8));
  CHECK(a.variance == Approx(b.variance).epsilon(1e-8));
  const auto c = classical_joint_risk(sp, rg, 0.01, 1.0, 0.5, 2);
  const auto d = classical_joint_risk(sp.swapped(), rs, 0.01, 0.5, 1.0, 1);
  CHECK(c.total == Approx(d.total).epsilon(1e-8));
}

TEST_CASE("risks are nonnegative across regimes") {
  const auto sp = make_diatomic(200, 0.5, 2.0, 1.0, 0.3, 2.0, 1.0);
  for (double phi : {0.2, 1.0, 3.0})
    for (double psi : {0.1, 0.9, 5.0}) {
      const auto rg = ScalingRegime::from_rates(0.5, phi, psi / phi);
      for (int s : {1, 2}) {
        const auto j = rp_joint_risk(sp, rg, 1e-3, 1.0, 0.5, s);
        const auto k = rp_separate_risk(sp, rg, 1e-3, 1.0, s);
        const auto c = classical_joint_risk(sp, rg, 1e-3, 1.0, 0.5, s);
        CHECK(j.bias >= 0);
        CHECK(j.variance >= 0);
        CHECK(k.total >= 0);
        CHECK(c.total >= 0);
      }
    }
}

TEST_CASE("joint risk reduces to the separate model as p1 -> 1") {
  const auto sp = make_isotropic(10, 1.5, 0.7, 1.0, 0.0);
  const auto rg = ScalingRegime::from_rates(0.999, 0.6, 1.5);
  const auto j = rp_joint_risk(sp, rg, 0.05, 1.0, 1.0, 1);
  const auto s = rp_separate_risk(sp, rg, 0.05, 1.0, 1);
  CHECK(j.bias == Approx(s.bias).epsilon(1e-2));
  CHECK(j.variance == Approx(s.variance).epsilon(1e-2));
}

TEST_CASE("h functionals need the B used for the constants") {
  const auto sp = make_isotropic(10, 1.5, 0.7, 1.0, 0.5);
  const auto rg = ScalingRegime::from_rates(0.5, 0.6, 1.5);
  const auto c = solve_rp_joint(sp, rg, 0.05, sigma_map(1));
  CHECK_NOTHROW(h_joint(1, 1, sigma_map(1), sigma_map(1), c, sp, rg, 0.05));
  CHECK_THROWS_AS(h_joint(1, 1, sigma_map(1), sigma_map(2), c, sp, rg, 0.05), Error);
  CHECK_THROWS_AS(h_joint(5, 1, sigma_map(1), sigma_map(1), c, sp, rg, 0.05), Error);
}

TEST_CASE("metrics") {
  const auto m = metrics(1.0, 3.0, 1.5, 2.5);
  CHECK(m.odd == Approx(2.0));
  CHECK(m.edd == Approx(1.0));
  CHECK(m.add == Approx(m.odd / m.edd));
  CHECK(m.add_defined);
  CHECK(m.signed_odd == Approx(2.0));
  const auto z = metrics(1.0, 2.0, 1.0, 1.0);
  CHECK_FALSE(z.add_defined);
  CHECK(std::isnan(z.add));
}

TEST_CASE("power-law limits") {
  const auto l = power_law_limits(2.0, 0.2, 1.0);
  CHECK(l.odd == Approx(2 * 0.2 * 2.0 / 0.6));
  CHECK(l.edd == Approx(2 * 0.2 * 1.0 / 0.6));
  CHECK(l.add == Approx(2.0));
  CHECK_THROWS_AS(power_law_limits(1.0, 0.2, 1.0), Error);
  CHECK_THROWS_AS(power_law_limits(2.0, 0.6, 1.0), Error);
}
