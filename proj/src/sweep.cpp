#include <cmath>
#include <limits>

#include "biasamp/experiments.hpp"
#include "parallel.hpp"

namespace biasamp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* flag_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoConvergence:
      return "nonconverged";
    case ErrorCode::Singular:
      return "singular";
    case ErrorCode::Undefined:
      return "undefined";
    default:
      return "invalid";
  }
}

void add_flag(SweepRow& row, const std::string& f) {
  if (std::find(row.flags.begin(), row.flags.end(), f) == row.flags.end()) row.flags.push_back(f);
}

struct GridPoint {
  double phi, psi, lambda, c;
};

std::vector<GridPoint> enumerate(const SweepConfig& cfg) {
  std::vector<GridPoint> pts;
  const bool rp = cfg.family == ModelFamily::RandomProjection;
  const std::vector<double> psis = rp ? cfg.psi : std::vector<double>{kNaN};
  const std::vector<double> cs = cfg.c.empty() ? std::vector<double>{kNaN} : cfg.c;
  for (double phi : cfg.phi)
    for (double psi : psis)
      for (double lam : cfg.lambda)
        for (double c : cs) pts.push_back({phi, psi, lam, c});
  return pts;
}

double sigma2_for(const SweepConfig& cfg, double c) { return std::isnan(c) ? cfg.sigma2_sq : c * cfg.sigma1_sq; }

}  // namespace

bool SweepRow::nonconvergent() const {
  for (const auto& f : flags)
    if (f == "nonconverged" || f == "singular") return true;
  return false;
}

long SweepResult::flagged_nonconvergent() const {
  long k = 0;
  for (const auto& r : rows) k += r.nonconvergent();
  return k;
}

SweepRow evaluate_theory(const SweepConfig& cfg, double phi, double psi, double lambda, double c) {
  const bool rp = cfg.family == ModelFamily::RandomProjection;
  SweepRow row;
  row.phi = phi;
  row.psi = rp ? psi : kNaN;
  row.gamma = rp ? psi / phi : kNaN;
  row.lambda = lambda;
  const double s1 = cfg.sigma1_sq, s2 = sigma2_for(cfg, c);
  row.c = std::isnan(c) ? (s1 > 0 ? s2 / s1 : kNaN) : c;
  const double nd = static_cast<double>(cfg.n);
  row.d = std::max(1L, std::lround(phi * nd));
  row.m = rp ? std::max(1L, std::lround(psi * nd)) : 0;
  row.phi_eff = static_cast<double>(row.d) / nd;
  row.psi_eff = rp ? static_cast<double>(row.m) / nd : kNaN;
  row.gamma_eff = rp ? static_cast<double>(row.m) / static_cast<double>(row.d) : kNaN;
  row.r1j = row.r2j = row.r1s = row.r2s = kNaN;
  if (lambda == 0) add_flag(row, "lambda-floor");

  const JointSpectrum sp = cfg.build_spectrum(row.d);
  const auto rg = rp ? ScalingRegime::from_sizes(cfg.n, row.d, row.m, cfg.p1)
                     : ScalingRegime::from_rates(cfg.p1, row.phi_eff, 1.0);
  const auto& st = cfg.solver;
  bool ok = true;
  auto run = [&](double& out, auto&& f) {
    try {
      const RiskDecomposition r = f();
      out = r.total;
      row.residual = std::max(row.residual, r.residual);
      row.iters = std::max(row.iters, r.iters);
    } catch (const SolverError& e) {
      ok = false;
      row.residual = std::max(row.residual, e.residual());
      row.iters = std::max(row.iters, e.iters());
      add_flag(row, flag_for(e.code()));
    } catch (const Error& e) {
      ok = false;
      add_flag(row, flag_for(e.code()));
    }
  };
  if (rp) {
    run(row.r1j, [&] { return rp_joint_risk(sp, rg, lambda, s1, s2, 1, st); });
    run(row.r2j, [&] { return rp_joint_risk(sp, rg, lambda, s1, s2, 2, st); });
    run(row.r1s, [&] { return rp_separate_risk(sp, rg, lambda, s1, 1, st); });
    run(row.r2s, [&] { return rp_separate_risk(sp, rg, lambda, s2, 2, st); });
  } else {
    const double lam = effective_lambda(lambda, st, "sweep");
    run(row.r1j, [&] { return classical_joint_risk(sp, rg, lam, s1, s2, 1, st); });
    run(row.r2j, [&] { return classical_joint_risk(sp, rg, lam, s1, s2, 2, st); });
    run(row.r1s, [&] { return classical_separate_risk(sp, 1, rg.phi_s(1), lam, s1, st); });
    run(row.r2s, [&] { return classical_separate_risk(sp, 2, rg.phi_s(2), lam, s2, st); });
  }
  row.theory_ok = ok;
  if (ok) {
    row.theory = metrics(row.r1j, row.r2j, row.r1s, row.r2s);
    if (!row.theory.add_defined) add_flag(row, "add-undefined");
  } else {
    row.theory.odd = row.theory.edd = row.theory.add = kNaN;
    row.theory.signed_odd = row.theory.signed_edd = kNaN;
  }
  return row;
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const auto pts = enumerate(cfg);
  SweepResult res;
  res.scenario = cfg.scenario;
  res.family = cfg.family;
  res.rows.resize(pts.size());
  const bool do_mc = !cfg.theory_only && cfg.replicates > 0;
  const int inner_threads = pts.size() > 1 ? 1 : cfg.threads;

  detail::parallel_for(pts.size(), cfg.threads, [&](std::size_t i) {
    const auto& g = pts[i];
    SweepRow row = evaluate_theory(cfg, g.phi, g.psi, g.lambda, g.c);
    if (do_mc) {
      MonteCarloConfig mc{cfg.build_spectrum(row.d)};
      mc.n = cfg.n;
      mc.p1 = cfg.p1;
      mc.sigma1_sq = cfg.sigma1_sq;
      mc.sigma2_sq = sigma2_for(cfg, g.c);
      mc.lambda = g.lambda > 0 ? g.lambda : cfg.solver.lambda_floor;
      mc.family = cfg.family;
      mc.m = row.m;
      mc.nested = cfg.nested;
      mc.threads = inner_threads;
      // each grid point gets its own seed family
      const std::uint64_t seed = cfg.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(i);
      try {
        row.mc = monte_carlo(mc, cfg.replicates, seed);
        row.has_mc = true;
        for (const auto& s : row.mc.seeds)
          if (s.reseeds) add_flag(row, "reseeded");
      } catch (const Error&) {
        add_flag(row, "mc-failed");
      }
    }
    res.rows[i] = std::move(row);
  });
  return res;
}

}  // namespace biasamp
