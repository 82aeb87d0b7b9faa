#include "irs/validation.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "irs/baselines.hpp"
#include "irs/mu_optimizer.hpp"
#include "irs/rng.hpp"
#include "irs/su_optimizer.hpp"

namespace irs {

namespace {

std::string fmt(const char* pattern, double x) {
  char buf[128];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

Scenario small_copy(const Scenario& base, int users) {
  Scenario s = base;
  s.irs_horizontal = 2;
  s.irs_vertical = 3;
  s.ap_antennas = std::min(base.ap_antennas, 3);
  s.user_positions.resize(static_cast<std::size_t>(users), base.user_positions.front());
  for (int k = 1; k < users; ++k) s.user_positions[static_cast<std::size_t>(k)].x() += 1.5 * k;
  s.noise_powers.assign(static_cast<std::size_t>(users), base.noise_powers.front());
  s.correlation.r_rk.assign(static_cast<std::size_t>(users), base.correlation.r_rk.front());
  return s;
}

CheckResult check_quadratic_form(const Scenario& scenario, std::uint64_t seed) {
  Rng rng = make_stream(seed, "validate-form");
  const StatisticalCsi scsi = build_scsi(small_copy(scenario, 1), rng);
  const QuadraticForm qf = build_quadratic_form(scsi);
  CVector v(scsi.elements());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = std::polar(1.0, kTwoPi * uniform01(rng));
  const int draws = 20000;
  double mean = 0.0;
  for (int s = 0; s < draws; ++s) mean += effective_channel(v, sample_instantaneous(scsi, rng), 0).squaredNorm();
  mean /= draws;
  const double analytic = qf.value(v);
  const double rel = std::abs(mean - analytic) / analytic;
  return {"average channel gain matches quadratic form", rel < 0.05, fmt("relative gap %.3g", rel)};
}

CheckResult check_jacobian(const Scenario& scenario, std::uint64_t seed) {
  Rng rng = make_stream(seed, "validate-jacobian");
  const StatisticalCsi scsi = build_scsi(small_copy(scenario, 2), rng);
  const InstantaneousChannels ch = sample_instantaneous(scsi, rng);
  const RVector noise = scenario.noise_vector().head(1).replicate(2, 1);
  CVector v = cscg_vector(rng, scsi.elements()) * 0.5;
  const auto h = effective_channels(v, ch);
  const Precoders w = mrt_equal_power(h, scenario.transmit_power);
  const CMatrix jac = rate_jacobian(v, w, ch, noise);
  const double step = 1e-6;
  double worst = 0.0;
  for (Eigen::Index n = 0; n < v.size(); ++n) {
    for (int part = 0; part < 2; ++part) {
      const Complex dir = part == 0 ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
      CVector vp = v;
      CVector vm = v;
      vp(n) += step * dir;
      vm(n) -= step * dir;
      const RVector fd = (instantaneous_rates(vp, w, ch, noise).rates - instantaneous_rates(vm, w, ch, noise).rates) /
                         (2.0 * step);
      for (Eigen::Index k = 0; k < fd.size(); ++k) {
        const double predicted = 2.0 * (std::conj(jac(n, k)) * dir).real();
        const double scale = std::max(std::abs(fd(k)), 1e-3 * jac.cwiseAbs().maxCoeff());
        worst = std::max(worst, std::abs(predicted - fd(k)) / scale);
      }
    }
  }
  return {"rate Jacobian matches finite differences", worst < 1e-4, fmt("max relative error %.3g", worst)};
}

CheckResult check_wmmse(const Scenario& scenario, std::uint64_t seed) {
  Rng rng = make_stream(seed, "validate-wmmse");
  const StatisticalCsi scsi = build_scsi(small_copy(scenario, 3), rng);
  const InstantaneousChannels ch = sample_instantaneous(scsi, rng);
  const RVector noise = scenario.noise_vector().head(1).replicate(3, 1);
  const auto h = effective_channels(all_ones_phase(scsi.elements()), ch);
  const WmmseState st = wmmse_solve(h, RVector::Ones(3), scenario.transmit_power, noise);
  bool monotone = true;
  for (std::size_t i = 1; i < st.objective_trace.size(); ++i)
    monotone = monotone && st.objective_trace[i] >= st.objective_trace[i - 1] - 1e-9 * std::abs(st.objective_trace[i]);
  double p = 0.0;
  for (const auto& wk : st.w) p += wk.squaredNorm();
  const bool feasible = p <= scenario.transmit_power * (1.0 + 1e-9);
  return {"WMMSE is monotone and power feasible", monotone && feasible,
          fmt("power use %.6g of budget", p / scenario.transmit_power)};
}

CheckResult check_pdd(const Scenario& scenario, std::uint64_t seed) {
  Rng rng = make_stream(seed, "validate-pdd");
  const StatisticalCsi scsi = build_scsi(small_copy(scenario, 1), rng);
  const QuadraticForm qf = build_quadratic_form(scsi);
  PddParams p;
  p.resolution = PhaseResolution::bits(1);
  const PddResult pdd = pdd_solve(qf, p);
  const BruteForceResult best = brute_force_solve(qf, p.resolution);
  const double ratio = pdd.objective / best.objective;
  return {"PDD is near the enumerated optimum", ratio >= 0.95 && pdd.violation < 1e-6,
          fmt("objective ratio %.4f", ratio)};
}

CheckResult check_all_ones(const Scenario& scenario, std::uint64_t seed) {
  Scenario s = small_copy(scenario, 1);
  s.rician = {0.0, 0.0, 0.0};
  s.direct_link = false;
  Rng rng = make_stream(seed, "validate-ones");
  const QuadraticForm qf = build_quadratic_form(build_scsi(s, rng));
  const double ones = qf.objective(all_ones_phase(qf.size()));
  const double bf = brute_force_solve(qf, PhaseResolution::bits(2)).objective;
  const double rel = std::abs(bf - ones) / std::max(bf, 1e-300);
  return {"all-ones phases are optimal under Rayleigh fading", rel < 1e-9, fmt("relative gap %.3g", rel)};
}

}  // namespace

std::vector<CheckResult> run_self_checks(const Scenario& scenario, std::uint64_t seed) {
  scenario.validate();
  const std::vector<std::function<CheckResult(const Scenario&, std::uint64_t)>> checks{
      check_quadratic_form, check_jacobian, check_wmmse, check_pdd, check_all_ones};
  std::vector<CheckResult> out;
  for (const auto& c : checks) {
    try {
      out.push_back(c(scenario, seed));
    } catch (const std::exception& e) {
      out.push_back({"check raised", false, e.what()});
    }
  }
  return out;
}

}  // namespace irs
