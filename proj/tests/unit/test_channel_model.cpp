#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "irs/channel_model.hpp"
#include "irs/su_optimizer.hpp"
#include "test_support.hpp"

namespace irs {
namespace {

using testing::db;
using testing::small_scenario;

TEST(PathLoss, ClosedForm) {
  EXPECT_DOUBLE_EQ(path_loss(1.0, 3.4, 1e-3, 1.0), 1e-3);
  EXPECT_NEAR(path_loss(50.0, 2.2, 1e-3, 1.0), std::exp(std::log(1e-3) - 2.2 * std::log(50.0)), 1e-20);
  EXPECT_DOUBLE_EQ(path_loss(10.0, 0.0, 1e-3, 1.0), 1e-3);
  EXPECT_THROW(path_loss(0.0, 2.0, 1e-3, 1.0), std::invalid_argument);
  EXPECT_THROW(path_loss(-1.0, 2.0, 1e-3, 1.0), std::invalid_argument);
}

TEST(ExpCorrelation, Examples) {
  EXPECT_TRUE(exp_correlation(4, 0.0).isIdentity());
  EXPECT_TRUE(exp_correlation(3, 1.0).isOnes());
  RMatrix expected(3, 3);
  expected << 1, .5, .25, .5, 1, .5, .25, .5, 1;
  EXPECT_LT((exp_correlation(3, 0.5) - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(exp_correlation(3, 1.5), std::invalid_argument);
  EXPECT_THROW(exp_correlation(3, -0.1), std::invalid_argument);
}

TEST(ExpCorrelation, IsPsdOverGrid) {
  for (int n : {1, 2, 5, 16, 40, 64}) {
    for (int i = 0; i <= 20; ++i) {
      const double r = i / 20.0;
      Eigen::SelfAdjointEigenSolver<RMatrix> eig(exp_correlation(n, r), Eigen::EigenvaluesOnly);
      EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10) << "n=" << n << " r=" << r;
    }
  }
}

TEST(KronCorrelation, Examples) {
  EXPECT_TRUE(kron_correlation(RMatrix::Identity(2, 2), RMatrix::Identity(2, 2)).isIdentity());
  const RMatrix h = exp_correlation(2, 0.3);
  EXPECT_LT((kron_correlation(h, RMatrix::Identity(1, 1)) - h).cwiseAbs().maxCoeff(), 1e-15);
  const RMatrix k = kron_correlation(exp_correlation(2, 0.5), exp_correlation(2, 0.5));
  // Element (h=0, v=0) against (h=1, v=1).
  EXPECT_DOUBLE_EQ(k(0, 3), 0.25);
  EXPECT_DOUBLE_EQ(k(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(k(0, 2), 0.5);
  EXPECT_TRUE(k.diagonal().isOnes());
}

TEST(PsdSqrt, Examples) {
  EXPECT_TRUE(psd_sqrt(RMatrix::Identity(3, 3)).isApprox(RMatrix::Identity(3, 3)));
  RMatrix d = RMatrix::Zero(2, 2);
  d.diagonal() << 4, 9;
  RMatrix expected = RMatrix::Zero(2, 2);
  expected.diagonal() << 2, 3;
  EXPECT_LT((psd_sqrt(d) - expected).cwiseAbs().maxCoeff(), 1e-12);
  const RMatrix phi = exp_correlation(3, 0.5);
  const RMatrix s = psd_sqrt(phi);
  EXPECT_LT((s * s - phi).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(PsdSqrt, ReconstructsRandomPsdInputs) {
  Rng rng = make_stream(3, "psd");
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 12;
    RMatrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = cscg(rng).real();
    const RMatrix phi = a * a.transpose();
    const RMatrix s = psd_sqrt(phi);
    EXPECT_LE((s * s - phi).norm() / phi.norm(), 1e-8);
  }
}

TEST(PsdSqrt, RejectsIndefiniteAndAsymmetric) {
  RMatrix bad(2, 2);
  bad << 1, 2, 2, 1;  // eigenvalues 3 and -1
  EXPECT_THROW(psd_sqrt(bad), NotPsdError);
  RMatrix asym(2, 2);
  asym << 1, 0.5, 0.2, 1;
  EXPECT_THROW(psd_sqrt(asym), std::invalid_argument);
  // Slightly indefinite Kronecker products are clamped.
  const RMatrix k = kron_correlation(exp_correlation(4, 1.0), exp_correlation(10, 1.0));
  EXPECT_NO_THROW(psd_sqrt(k));
}

TEST(Scenario, ValidationCatchesBrokenInvariants) {
  Scenario s = small_scenario(2, 2, 2);
  EXPECT_NO_THROW(s.validate());
  Scenario t = s;
  t.transmit_power = 0.0;
  EXPECT_THROW(t.validate(), std::invalid_argument);
  t = s;
  t.correlation.r_r = 1.2;
  EXPECT_THROW(t.validate(), std::invalid_argument);
  t = s;
  t.user_positions[0] = t.irs_position;
  EXPECT_THROW(t.validate(), std::invalid_argument);
  t = s;
  t.rician.beta_ai = -1.0;
  EXPECT_THROW(t.validate(), std::invalid_argument);
  t = s;
  t.noise_powers.push_back(1e-11);
  EXPECT_THROW(t.validate(), std::invalid_argument);
}

TEST(BuildScsi, DeterministicLimit) {
  Scenario s = small_scenario(10, 40, 1);
  s.rician.beta_iu = 1e12;
  const double l_iu = path_loss((s.user_positions[0] - s.irs_position).norm(), 3.0, 1e-3, 1.0);
  Rng rng = make_stream(21, "det-limit");
  double total = 0.0;
  for (int i = 0; i < 100; ++i) {
    const StatisticalCsi scsi = build_scsi(s, rng);
    EXPECT_LT(scsi.nlos.s_iu[0], 1e-5 * std::sqrt(l_iu));
    total += scsi.zbar_r[0].squaredNorm();
  }
  EXPECT_NEAR(total / 100.0 / (l_iu * 400.0), 1.0, 0.01);
}

TEST(BuildScsi, RayleighLimit) {
  Scenario s = small_scenario(2, 2, 2);
  s.rician.beta_iu = 0.0;
  Rng rng = make_stream(4, "rayleigh");
  const StatisticalCsi scsi = build_scsi(s, rng);
  const double l_iu = path_loss((s.user_positions[0] - s.irs_position).norm(), 3.0, 1e-3, 1.0);
  EXPECT_EQ(scsi.zbar_r[0].squaredNorm(), 0.0);
  EXPECT_NEAR(scsi.nlos.s_iu[0] * scsi.nlos.s_iu[0], l_iu, 1e-15 * l_iu + 1e-300);
}

TEST(BuildScsi, InfiniteFactorIsPurelyDeterministic) {
  Scenario s = small_scenario(2, 2, 2);
  s.rician = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
              std::numeric_limits<double>::infinity()};
  Rng rng = make_stream(4, "inf");
  const StatisticalCsi scsi = build_scsi(s, rng);
  EXPECT_EQ(scsi.nlos.s_ai, 0.0);
  EXPECT_EQ(scsi.nlos.s_iu[0], 0.0);
  EXPECT_EQ(scsi.nlos.s_au[0], 0.0);
  const InstantaneousChannels ch = sample_instantaneous(scsi, rng);
  EXPECT_EQ(ch.g, scsi.fbar);
  EXPECT_EQ(ch.h_r[0], scsi.zbar_r[0]);
  EXPECT_EQ(ch.h_d[0], scsi.zbar_d[0]);
}

TEST(BuildScsi, DeterministicPowerFractionMatchesRicianFactor) {
  Scenario s = small_scenario(1, 1, 1);
  s.rician.beta_iu = db(3.0);
  const double expected = s.rician.beta_iu / (1.0 + s.rician.beta_iu);
  Rng rng = make_stream(8, "fraction");
  double det = 0.0;
  double total = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const StatisticalCsi scsi = build_scsi(s, rng);
    const double d = scsi.zbar_r[0].squaredNorm();
    det += d;
    total += d + scsi.nlos.s_iu[0] * scsi.nlos.s_iu[0];
  }
  EXPECT_NEAR(det / total, expected, 0.01 * expected);
}

TEST(BuildScsi, CorrelationMatricesHaveUnitDiagonal) {
  Scenario s = small_scenario(4, 10, 4, 2);
  s.correlation.r_rk = {0.0, 0.7};
  Rng rng = make_stream(1, "corr");
  const StatisticalCsi scsi = build_scsi(s, rng);
  EXPECT_TRUE(scsi.phi_r.diagonal().isOnes());
  EXPECT_TRUE(scsi.phi_d.diagonal().isOnes());
  EXPECT_TRUE(scsi.phi_rk[0].isIdentity());
  EXPECT_DOUBLE_EQ(scsi.phi_rk[1](0, 1), 0.7);    // vertical neighbour
  EXPECT_DOUBLE_EQ(scsi.phi_rk[1](0, 10), 0.7);   // horizontal neighbour
  EXPECT_NEAR(scsi.phi_r(0, 11), 0.25, 1e-15);  // diagonal neighbour, r_r = 0.5
}

TEST(BuildScsi, DirectLinkCanBeRemoved) {
  Scenario s = small_scenario(2, 2, 2);
  s.direct_link = false;
  Rng rng = make_stream(1, "nodirect");
  const StatisticalCsi scsi = build_scsi(s, rng);
  EXPECT_EQ(scsi.zbar_d[0].squaredNorm(), 0.0);
  EXPECT_EQ(scsi.nlos.s_au[0], 0.0);
}

TEST(BuildScsi, SameSeedSameResult) {
  const Scenario s = small_scenario(2, 3, 2, 2);
  Rng a = make_stream(77, "scsi", {0});
  Rng b = make_stream(77, "scsi", {0});
  const StatisticalCsi x = build_scsi(s, a);
  const StatisticalCsi y = build_scsi(s, b);
  EXPECT_EQ(x.fbar, y.fbar);
  EXPECT_EQ(x.zbar_r[1], y.zbar_r[1]);
  EXPECT_EQ(x.zbar_d[0], y.zbar_d[0]);
  const InstantaneousChannels cx = sample_instantaneous(x, a);
  const InstantaneousChannels cy = sample_instantaneous(y, b);
  EXPECT_EQ(cx.g, cy.g);
  EXPECT_EQ(cx.h_r[0], cy.h_r[0]);
  EXPECT_EQ(cx.h_d[1], cy.h_d[1]);
}

TEST(SampleInstantaneous, ZeroScatteringReturnsMeans) {
  Scenario s = small_scenario(2, 2, 3);
  Rng rng = make_stream(2, "zero");
  StatisticalCsi scsi = build_scsi(s, rng);
  scsi.nlos.s_ai = 0.0;
  scsi.nlos.s_iu = {0.0};
  scsi.nlos.s_au = {0.0};
  const InstantaneousChannels ch = sample_instantaneous(scsi, rng);
  EXPECT_EQ(ch.g, scsi.fbar);
  EXPECT_EQ(ch.h_r[0], scsi.zbar_r[0]);
  EXPECT_EQ(ch.h_d[0], scsi.zbar_d[0]);
}

TEST(SampleInstantaneous, SampleMeanOfGMatchesFbar) {
  Scenario s = small_scenario(2, 2, 2);
  Rng rng = make_stream(12, "mean");
  const StatisticalCsi scsi = build_scsi(s, rng);
  const int draws = 100000;
  CMatrix sum = CMatrix::Zero(4, 2);
  for (int i = 0; i < draws; ++i) sum += sample_instantaneous(scsi, rng).g;
  const CMatrix mean = sum / static_cast<double>(draws);
  // Per-component standard error of the mean of a CSCG entry with variance s^2.
  const double se = scsi.nlos.s_ai * std::sqrt(0.5 / draws);
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    EXPECT_LT(std::abs(mean(i).real() - scsi.fbar(i).real()), 3.5 * se);
    EXPECT_LT(std::abs(mean(i).imag() - scsi.fbar(i).imag()), 3.5 * se);
  }
}

TEST(SampleInstantaneous, ColumnCovarianceOfGMatchesPhiR) {
  Scenario s = small_scenario(2, 4, 2);
  s.rician.beta_ai = 0.0;
  s.correlation.r_d = 0.0;
  s.correlation.r_r = 0.6;
  Rng rng = make_stream(13, "cov");
  const StatisticalCsi scsi = build_scsi(s, rng);
  const int draws = 100000;
  CMatrix cov = CMatrix::Zero(8, 8);
  for (int i = 0; i < draws; ++i) {
    const CVector col = sample_instantaneous(scsi, rng).g.col(0);
    cov.noalias() += col * col.adjoint();
  }
  cov /= static_cast<double>(draws);
  const CMatrix expected = scsi.nlos.s_ai * scsi.nlos.s_ai * scsi.phi_r.cast<Complex>();
  EXPECT_LT((cov - expected).norm() / expected.norm(), 0.02);
}

TEST(EffectiveChannel, ZeroPhasesGiveDirectLink) {
  Scenario s = small_scenario(2, 2, 3);
  Rng rng = make_stream(5, "eff");
  const InstantaneousChannels ch = sample_instantaneous(build_scsi(s, rng), rng);
  EXPECT_LT((effective_channel(CVector::Zero(4), ch, 0) - ch.h_d[0]).norm(), 1e-30);
}

TEST(EffectiveChannel, ScalarCase) {
  InstantaneousChannels ch;
  ch.g = CMatrix::Constant(1, 1, Complex(0.3, -0.2));
  ch.h_r = {CVector::Constant(1, Complex(-1.1, 0.4))};
  ch.h_d = {CVector::Constant(1, Complex(0.05, 0.7))};
  const Complex v(0.6, 0.8);
  // h^H = v^* h_r^* g + h_d^*  =>  h = v g^* h_r + h_d.
  const Complex expected = v * std::conj(Complex(0.3, -0.2)) * Complex(-1.1, 0.4) + Complex(0.05, 0.7);
  EXPECT_LT(std::abs(effective_channel(CVector::Constant(1, v), ch, 0)(0) - expected), 1e-15);
}

TEST(EffectiveChannel, MatchesReflectionMatrixForm) {
  Scenario s = small_scenario(3, 2, 4, 2);
  Rng rng = make_stream(6, "theta");
  const InstantaneousChannels ch = sample_instantaneous(build_scsi(s, rng), rng);
  const CVector v = testing::random_unit_modulus(rng, 6);
  const CMatrix theta = v.conjugate().asDiagonal();
  for (int k = 0; k < 2; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const CVector row = (ch.h_r[ku].adjoint() * theta * ch.g + ch.h_d[ku].adjoint()).adjoint();
    EXPECT_LT((effective_channel(v, ch, k) - row).norm(), 1e-12 * row.norm());
  }
  EXPECT_THROW(effective_channel(v, ch, 2), std::out_of_range);
}

TEST(ChannelModel, AverageGainMatchesQuadraticForm) {
  Scenario s = small_scenario(2, 3, 3);
  Rng rng = make_stream(14, "moments");
  const StatisticalCsi scsi = build_scsi(s, rng);
  const QuadraticForm qf = build_quadratic_form(scsi);
  const CVector v = testing::random_unit_modulus(rng, 6);
  double sum = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) sum += effective_channel(v, sample_instantaneous(scsi, rng), 0).squaredNorm();
  EXPECT_NEAR(sum / draws / qf.value(v), 1.0, 0.01);
}

}  // namespace
}  // namespace irs
