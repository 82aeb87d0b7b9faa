#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <span>
#include <sstream>

#include "irs/channel_model.hpp"
#include "irs/mu_optimizer.hpp"
#include "irs/su_optimizer.hpp"
#include "test_support.hpp"

namespace irs {
namespace {

using testing::random_unit_modulus;
using testing::small_scenario;

TEST(SscaParams, StepSizes) {
  SscaParams p;
  EXPECT_NO_THROW(p.validate());
  EXPECT_DOUBLE_EQ(p.rho(1), 1.0);
  EXPECT_DOUBLE_EQ(p.gamma(1), 1.0);
  EXPECT_NEAR(p.rho(32), 1.0 / 16.0, 1e-15);
  EXPECT_NEAR(p.gamma(8), 0.125, 1e-15);
  for (int t = 1; t < 1000; ++t) {
    EXPECT_LT(p.gamma(t + 1), p.gamma(t));
    EXPECT_LE(p.gamma(t), p.rho(t));
  }
}

TEST(SscaParams, Validation) {
  SscaParams p;
  p.rho_exponent = 0.5;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = SscaParams{};
  p.gamma_exponent = 0.7;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = SscaParams{};
  p.gamma_exponent = 1.1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = SscaParams{};
  p.tau = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = SscaParams{};
  p.samples_per_iter = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Surrogate, FirstUpdateIsSampleAverage) {
  Rng rng = make_stream(1, "surrogate");
  const Scenario s = small_scenario(2, 3, 2, 2);
  const StatisticalCsi scsi = build_scsi(s, rng);
  const CVector v0 = random_unit_modulus(rng, 6);
  const RVector alpha = (RVector(2) << 1.0, 2.0).finished();
  const RVector noise = s.noise_vector();
  std::vector<InstantaneousChannels> samples;
  std::vector<WmmseState> pre;
  for (int l = 0; l < 3; ++l) {
    samples.push_back(sample_instantaneous(scsi, rng));
    pre.push_back(wmmse_solve(effective_channels(v0, samples.back()), alpha, s.transmit_power, noise));
  }
  SscaParams p;
  const SurrogateState st = ssca_update_surrogate(SurrogateState::initial(v0, 2), samples, pre, alpha, noise, p);
  EXPECT_EQ(st.t, 1);
  RVector rates = RVector::Zero(2);
  CMatrix jac = CMatrix::Zero(6, 2);
  for (int l = 0; l < 3; ++l) {
    rates += alpha.cwiseProduct(user_rates(effective_channels(v0, samples[l]), pre[l].w, noise));
    jac += rate_jacobian(v0, pre[l].w, samples[l], noise);
  }
  EXPECT_LT((st.r_hat - rates / 3.0).cwiseAbs().maxCoeff(), 1e-12 * rates.norm());
  EXPECT_LT((st.f_mat - jac / 3.0).cwiseAbs().maxCoeff(), 1e-12 * jac.norm());
  EXPECT_LT((st.f - st.f_mat * alpha.cast<Complex>()).norm(), 1e-12 * st.f.norm());

  // Second update mixes with weight rho(2).
  const SurrogateState st2 = ssca_update_surrogate(st, samples, pre, alpha, noise, p);
  const double rho = p.rho(2);
  EXPECT_LT((st2.r_hat - ((1.0 - rho) * st.r_hat + rho * rates / 3.0)).norm(), 1e-12 * rates.norm());
}

TEST(Surrogate, ClosedFormMaximizesPerElement) {
  Rng rng = make_stream(2, "closed-form");
  const double tau = 0.7;
  for (int trial = 0; trial < 10; ++trial) {
    SurrogateState st = SurrogateState::initial(cscg_vector(rng, 8) * 0.5, 1);
    st.f = cscg_vector(rng, 8) * (trial % 2 ? 3.0 : 0.1);
    const CVector relaxed = solve_surrogate(st, tau, AmplitudeMode::relaxed);
    const CVector unit = solve_surrogate(st, tau, AmplitudeMode::unit);
    for (Eigen::Index i = 0; i < 8; ++i) {
      const Complex vp = st.v_prev(i);
      const Complex f = st.f(i);
      auto g = [&](Complex x) { return 2.0 * (std::conj(f) * (x - vp)).real() - tau * std::norm(x - vp); };
      double disk_best = -1e300;
      double circle_best = -1e300;
      for (int a = 0; a < 720; ++a) {
        const double th = kTwoPi * a / 720.0;
        circle_best = std::max(circle_best, g(std::polar(1.0, th)));
        for (int r = 0; r <= 200; ++r) disk_best = std::max(disk_best, g(std::polar(r / 200.0, th)));
      }
      EXPECT_LE(std::abs(relaxed(i)), 1.0 + 1e-12);
      EXPECT_GE(g(relaxed(i)), disk_best - 1e-3);
      EXPECT_NEAR(std::abs(unit(i)), 1.0, 1e-12);
      EXPECT_GE(g(unit(i)), circle_best - 1e-3);
    }
  }
}

TEST(Ssca, StepAndProjection) {
  const CVector a = CVector::Ones(2);
  const CVector b = -CVector::Ones(2);
  EXPECT_LT((ssca_step_v(a, b, 1, 1.0) - b).norm(), 1e-15);
  EXPECT_LT((ssca_step_v(a, b, 4, 1.0) - 0.5 * CVector::Ones(2)).norm(), 1e-15);
  const CVector v = (CVector(3) << Complex(0.2, 0.01), Complex(0.0, -3.0), Complex(0.0, 0.0)).finished();
  const PhaseConfig pc = project_discrete(v, PhaseResolution::bits(2));
  EXPECT_NO_THROW(pc.check());
  EXPECT_LT(std::abs(pc.v(0) - Complex(1.0, 0.0)), 1e-12);
  EXPECT_LT(std::abs(pc.v(1) - Complex(0.0, -1.0)), 1e-12);
  EXPECT_LT(std::abs(pc.v(2) - Complex(1.0, 0.0)), 1e-12);
}

SscaParams quick_params() {
  SscaParams p;
  p.max_iters = 60;
  p.samples_per_iter = 4;
  return p;
}

TEST(Ssca, DeterministicAndFeasible) {
  Rng rng = make_stream(3, "ssca-run");
  const Scenario s = small_scenario(2, 4, 3, 2);
  const StatisticalCsi scsi = build_scsi(s, rng);
  const RVector alpha = RVector::Ones(2);
  const CVector v0 = CVector::Ones(8);
  SscaParams p = quick_params();
  p.resolution = PhaseResolution::bits(2);
  const SscaResult a = ssca_run(scsi, alpha, s.transmit_power, s.noise_vector(), p, v0, 42);
  const SscaResult b = ssca_run(scsi, alpha, s.transmit_power, s.noise_vector(), p, v0, 42);
  EXPECT_EQ(a.v_continuous, b.v_continuous);
  EXPECT_EQ(a.phases.v, b.phases.v);
  EXPECT_NO_THROW(a.phases.check());
  EXPECT_LE(a.v_continuous.cwiseAbs().maxCoeff(), 1.0 + 1e-12);
  ASSERT_EQ(static_cast<int>(a.trace.size()), a.iterations);
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].t, static_cast<int>(i) + 1);
    EXPECT_DOUBLE_EQ(a.trace[i].rho, p.rho(a.trace[i].t));
  }
  const SscaResult c = ssca_run(scsi, alpha, s.transmit_power, s.noise_vector(), p, v0, 43);
  EXPECT_NE(a.v_continuous, c.v_continuous);

  p.amplitude = AmplitudeMode::unit;
  const SscaResult u = ssca_run(scsi, alpha, s.transmit_power, s.noise_vector(), p, v0, 42);
  for (Eigen::Index i = 0; i < 8; ++i) EXPECT_NEAR(std::abs(u.v_continuous(i)), 1.0, 1e-12);
}

TEST(Ssca, ImprovesOnStartingPoint) {
  Rng rng = make_stream(4, "ssca-gain");
  Scenario s = small_scenario(4, 4, 2, 1);
  s.rician = {testing::db(-3.0), testing::db(10.0), testing::db(10.0)};
  const StatisticalCsi scsi = build_scsi(s, rng);
  const RVector alpha = RVector::Ones(1);
  SscaParams p = quick_params();
  p.max_iters = 200;
  const CVector v0 = random_unit_modulus(rng, 16);
  const SscaResult r = ssca_run(scsi, alpha, s.transmit_power, s.noise_vector(), p, v0, 7);
  const QuadraticForm qf = build_quadratic_form(scsi);
  EXPECT_GT(su_rate_upper_bound(qf, r.phases.v, s.transmit_power, s.noise_powers[0]),
            su_rate_upper_bound(qf, v0, s.transmit_power, s.noise_powers[0]));
}

TEST(Ssca, RejectsBadInputs) {
  Rng rng = make_stream(5, "ssca-bad");
  const Scenario s = small_scenario(2, 2, 2, 2);
  const StatisticalCsi scsi = build_scsi(s, rng);
  SscaParams p = quick_params();
  EXPECT_THROW(ssca_run(scsi, RVector::Ones(2), 1.0, s.noise_vector(), p, CVector::Ones(3), 1),
               std::invalid_argument);
  EXPECT_THROW(ssca_run(scsi, RVector::Ones(1), 1.0, s.noise_vector(), p, CVector::Ones(4), 1),
               std::invalid_argument);
  p.rho_exponent = 1.0;
  EXPECT_THROW(ssca_run(scsi, RVector::Ones(2), 1.0, s.noise_vector(), p, CVector::Ones(4), 1),
               std::invalid_argument);
}

Scenario deterministic_scenario(int h, int v, int m, int k) {
  Scenario s = small_scenario(h, v, m, k);
  const double inf = std::numeric_limits<double>::infinity();
  s.rician = {inf, inf, inf};
  return s;
}

std::vector<WmmseState> precode_all(std::span<const InstantaneousChannels> samples, const CVector& v,
                                    const RVector& alpha, double power, const RVector& noise) {
  std::vector<WmmseState> out;
  for (const auto& ch : samples) out.push_back(short_term_precoding(effective_channels(v, ch), alpha, power, noise));
  return out;
}

TEST(Surrogate, StaticChannelsReachTheRatesExactly) {
  Rng rng = make_stream(6, "surrogate-static");
  const Scenario s = deterministic_scenario(2, 3, 2, 2);
  const StatisticalCsi scsi = build_scsi(s, rng);
  const CVector v = random_unit_modulus(rng, 6);
  const RVector alpha = (RVector(2) << 0.7, 1.3).finished();
  const std::vector<InstantaneousChannels> samples(4, sample_instantaneous(scsi, rng));
  const auto pre = precode_all(samples, v, alpha, s.transmit_power, s.noise_vector());
  SurrogateState st = SurrogateState::initial(v, 2);
  SscaParams p;
  for (int t = 0; t < 200; ++t) st = ssca_update_surrogate(st, samples, pre, alpha, s.noise_vector(), p);
  EXPECT_EQ(st.t, 200);
  const RVector target = alpha.cwiseProduct(user_rates(effective_channels(v, samples[0]), pre[0].w, s.noise_vector()));
  EXPECT_LT((st.r_hat - target).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Surrogate, StaticGradientMatchesFiniteDifferences) {
  // K = 1 on deterministic channels: the averaged gradient must be the
  // gradient of the MRT rate log2(1 + P ||h(v)||^2 / sigma^2).
  Rng rng = make_stream(7, "surrogate-grad");
  const Scenario s = deterministic_scenario(2, 3, 2, 1);
  const StatisticalCsi scsi = build_scsi(s, rng);
  const CVector v = random_unit_modulus(rng, 6);
  const RVector alpha = RVector::Ones(1);
  const std::vector<InstantaneousChannels> samples(2, sample_instantaneous(scsi, rng));
  const auto pre = precode_all(samples, v, alpha, s.transmit_power, s.noise_vector());
  SurrogateState st = SurrogateState::initial(v, 1);
  for (int t = 0; t < 50; ++t) st = ssca_update_surrogate(st, samples, pre, alpha, s.noise_vector(), SscaParams{});
  auto rate = [&](const CVector& x) { return mrt_rate(effective_channel(x, samples[0], 0), s.transmit_power, s.noise_powers[0]); };
  const double eps = 1e-6;
  for (Eigen::Index n = 0; n < 6; ++n) {
    CVector d = CVector::Zero(6);
    d(n) = 1.0;
    const double dre = (rate(v + eps * d) - rate(v - eps * d)) / (2.0 * eps);
    d(n) = Complex(0.0, 1.0);
    const double dim = (rate(v + eps * d) - rate(v - eps * d)) / (2.0 * eps);
    const Complex fd(dre / 2.0, dim / 2.0);
    EXPECT_LT(std::abs(st.f(n) - fd), 1e-4 * std::max(1.0, std::abs(fd))) << n;
  }
}

TEST(Surrogate, GradientEstimateApproachesExpectation) {
  Rng rng = make_stream(8, "surrogate-mc");
  Scenario s = small_scenario(2, 2, 2, 1);
  s.rician = {testing::db(10.0), testing::db(10.0), testing::db(10.0)};
  const StatisticalCsi scsi = build_scsi(s, rng);
  const CVector v = random_unit_modulus(rng, 4);
  const RVector alpha = RVector::Ones(1);
  const RVector noise = s.noise_vector();

  CMatrix expected = CMatrix::Zero(4, 1);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const InstantaneousChannels ch = sample_instantaneous(scsi, rng);
    const auto w = short_term_precoding(effective_channels(v, ch), alpha, s.transmit_power, noise);
    expected += rate_jacobian(v, w.w, ch, noise);
  }
  expected /= static_cast<double>(draws);

  SscaParams p;
  SurrogateState st = SurrogateState::initial(v, 1);
  double err_10 = 0.0;
  for (int t = 1; t <= 500; ++t) {
    std::vector<InstantaneousChannels> samples;
    for (int l = 0; l < p.samples_per_iter; ++l) samples.push_back(sample_instantaneous(scsi, rng));
    st = ssca_update_surrogate(st, samples, precode_all(samples, v, alpha, s.transmit_power, noise), alpha, noise, p);
    if (t == 10) err_10 = (st.f_mat - expected).norm();
  }
  const double err_500 = (st.f_mat - expected).norm();
  EXPECT_LT(err_500, err_10);
  EXPECT_LT(err_500, 0.05 * expected.norm());
}

TEST(Surrogate, ClosedFormExamples) {
  SurrogateState st = SurrogateState::initial((CVector(2) << Complex(0.3, 0.1), Complex(-0.5, 0.0)).finished(), 1);
  st.f = CVector::Zero(2);
  EXPECT_EQ(solve_surrogate(st, 0.01), st.v_prev);

  const double tau = 0.25;
  st.v_prev = CVector::Zero(2);
  st.f = (CVector(2) << std::polar(2.0 * tau, 0.4), std::polar(2.0 * tau, -2.0)).finished();
  const CVector v = solve_surrogate(st, tau);
  for (Eigen::Index i = 0; i < 2; ++i) EXPECT_LT(std::abs(v(i) - st.f(i) / std::abs(st.f(i))), 1e-12);
}

TEST(Ssca, StepFixedPoint) {
  const CVector a = (CVector(2) << Complex(0.1, 0.2), Complex(-0.4, 0.3)).finished();
  EXPECT_LT((ssca_step_v(a, a, 17, 1.0) - a).norm(), 1e-15);
}

TEST(Ssca, ZeroPowerKeepsStartingPoint) {
  Rng rng = make_stream(9, "ssca-zero");
  const Scenario s = small_scenario(2, 2, 2, 2);
  const StatisticalCsi scsi = build_scsi(s, rng);
  const CVector v0 = random_unit_modulus(rng, 4) * 0.5;
  const SscaResult r = ssca_run(scsi, RVector::Ones(2), 0.0, s.noise_vector(), quick_params(), v0, 3);
  EXPECT_LT((r.v_continuous - v0).norm(), 1e-15);
  for (const auto& row : r.trace) {
    EXPECT_LT(row.v_change_inf_norm, 1e-15);
    EXPECT_EQ(row.sum_r_hat, 0.0);
  }
}

TEST(Ssca, TraceCsv) {
  std::ostringstream os;
  write_ssca_trace_csv(os, {{1, 1.0, 1.0, 2.5, 0.25}});
  EXPECT_EQ(os.str(), "t,rho_t,gamma_t,sum_r_hat,v_change_inf_norm\n1,1,1,2.5,0.25\n");
}

}  // namespace
}  // namespace irs
