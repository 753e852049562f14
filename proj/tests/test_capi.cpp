#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include "biasamp/biasamp.h"

using doctest::Approx;

TEST_CASE("version and status names") {
  CHECK(std::strlen(ba_version()) > 0);
  CHECK(std::string(ba_status_name(BA_ERR_SINGULAR)) == "singular");
}

TEST_CASE("spectrum handles") {
  ba_spectrum* sp = nullptr;
  REQUIRE(ba_spectrum_diatomic(100, 0.5, 2.0, 1.0, 0.2, 1.0, 0.0, &sp) == BA_OK);
  CHECK(ba_spectrum_dim(sp) == 100);
  CHECK(ba_spectrum_core_size(sp) == 50);
  double v = 0;
  CHECK(ba_spectrum_dof(sp, 1, 1, 1, 0.0, &v) == BA_OK);
  CHECK(v == Approx(0.5));
  CHECK(ba_spectrum_dof(sp, 1, 1, 2, 0.0, &v) == BA_ERR_SINGULAR);
  CHECK(std::strlen(ba_last_error()) > 0);
  ba_spectrum_free(sp);

  ba_spectrum* bad = nullptr;
  CHECK(ba_spectrum_isotropic(-1, 1, 1, 1, 1, &bad) == BA_ERR_INVALID_ARGUMENT);
  CHECK(bad == nullptr);
  CHECK(ba_spectrum_isotropic(10, 1, 1, 1, 1, nullptr) == BA_ERR_INVALID_ARGUMENT);
  ba_spectrum_free(nullptr);
}

TEST_CASE("theory through the C API") {
  ba_spectrum* sp = nullptr;
  REQUIRE(ba_spectrum_isotropic(10, 1, 1, 1, 0, &sp) == BA_OK);
  ba_risk r{};
  REQUIRE(ba_classical_separate_risk(sp, 1, 0.5, 1e-8, 1.0, nullptr, &r) == BA_OK);
  CHECK(r.variance == Approx(1.0).epsilon(1e-5));

  ba_regime rg{0.5, 0.5, 2.0};
  ba_solver_settings st;
  ba_solver_settings_default(&st);
  CHECK(st.tol == 1e-12);
  REQUIRE(ba_rp_joint_risk(sp, &rg, 0.01, 1.0, 1.0, 1, &st, &r) == BA_OK);
  CHECK(r.total == Approx(r.bias + r.variance));
  CHECK(ba_rp_joint_risk(sp, &rg, 0.01, 1.0, 1.0, 3, &st, &r) == BA_ERR_INVALID_ARGUMENT);
  st.max_iter = 1;
  CHECK(ba_rp_joint_risk(sp, &rg, 1e-4, 1.0, 1.0, 1, &st, &r) == BA_ERR_NO_CONVERGENCE);

  ba_metrics m{};
  REQUIRE(ba_compute_metrics(1, 3, 1.5, 2.5, &m) == BA_OK);
  CHECK(m.add == Approx(2.0));
  double o, e, a;
  CHECK(ba_power_law_limits(1.0, 0.2, 1.0, &o, &e, &a) == BA_ERR_UNDEFINED);
  double mp = 0;
  CHECK(ba_solve_mp(1, 1, &mp) == BA_OK);
  CHECK(mp == Approx((std::sqrt(5.0) - 1) / 2));
  ba_spectrum_free(sp);
}

TEST_CASE("config and sweep handles") {
  CHECK(ba_scenario_count() == 6);
  ba_config* cfg = nullptr;
  REQUIRE(ba_config_preset("isotropic-sweep", &cfg) == BA_OK);
  CHECK(ba_config_merge(cfg, R"({"phi":[1.0],"psi":[0.1],"theory_only":true})") == BA_OK);
  CHECK(ba_config_merge(cfg, R"({"nonsense":1})") == BA_ERR_PARSE);
  char* js = nullptr;
  REQUIRE(ba_config_to_json(cfg, &js) == BA_OK);
  CHECK(std::string(js).find("isotropic-sweep") != std::string::npos);
  ba_config* again = nullptr;
  CHECK(ba_config_parse(js, &again) == BA_OK);
  ba_string_free(js);
  ba_config_free(again);

  ba_sweep* sw = nullptr;
  REQUIRE(ba_sweep_run(cfg, &sw) == BA_OK);
  CHECK(ba_sweep_rows(sw) == 1);
  CHECK(ba_sweep_flagged(sw) == 0);
  double v = 0;
  CHECK(ba_sweep_value(sw, 0, "theory_R1j", &v) == BA_OK);
  CHECK(v > 0);
  CHECK(ba_sweep_value(sw, 0, "no_such_column", &v) == BA_ERR_INVALID_ARGUMENT);
  CHECK(ba_sweep_value(sw, 5, "phi", &v) == BA_ERR_INVALID_ARGUMENT);
  const char* flags = nullptr;
  CHECK(ba_sweep_flags(sw, 0, &flags) == BA_OK);
  CHECK(ba_sweep_write_csv(sw, "/nonexistent-dir/x.csv") == BA_ERR_IO);
  ba_sweep_free(sw);
  ba_config_free(cfg);

  CHECK(ba_config_load("/nonexistent.json", &cfg) == BA_ERR_IO);
}

TEST_CASE("log callback receives warnings") {
  static int hits = 0;
  ba_set_log_callback([](const char*, void*) { ++hits; }, nullptr);
  ba_spectrum* sp = nullptr;
  REQUIRE(ba_spectrum_isotropic(10, 1, 1, 1, 0, &sp) == BA_OK);
  ba_regime rg{0.5, 0.5, 0.5};
  ba_risk r{};
  ba_rp_joint_risk(sp, &rg, 0.0, 1, 1, 1, nullptr, &r);
  ba_set_log_callback(nullptr, nullptr);
  CHECK(hits > 0);
  ba_spectrum_free(sp);
}
