#include "irs/channel_model.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace irs {
namespace {

double deterministic_gain(double beta) {
  if (std::isinf(beta)) return 1.0;
  return std::sqrt(beta / (1.0 + beta));
}

double scattered_gain(double beta) {
  if (std::isinf(beta)) return 0.0;
  return std::sqrt(1.0 / (1.0 + beta));
}

void check_coefficient(double r, const char* name) {
  if (!(r >= 0.0 && r <= 1.0))
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

RVector Scenario::noise_vector() const {
  RVector out(static_cast<Eigen::Index>(noise_powers.size()));
  for (std::size_t k = 0; k < noise_powers.size(); ++k) out(static_cast<Eigen::Index>(k)) = noise_powers[k];
  return out;
}

void Scenario::validate() const {
  if (ap_antennas < 1) throw std::invalid_argument("ap_antennas must be >= 1");
  if (irs_horizontal < 1 || irs_vertical < 1) throw std::invalid_argument("IRS factorization must be >= 1 x 1");
  if (user_positions.empty()) throw std::invalid_argument("at least one user is required");
  if (!(transmit_power > 0.0)) throw std::invalid_argument("transmit power must be positive");
  if (noise_powers.size() != user_positions.size())
    throw std::invalid_argument("one noise power per user is required");
  for (double s : noise_powers)
    if (!(s > 0.0)) throw std::invalid_argument("noise powers must be positive");
  if (correlation.r_rk.size() != user_positions.size())
    throw std::invalid_argument("one IRS-user correlation coefficient per user is required");
  check_coefficient(correlation.r_d, "r_d");
  check_coefficient(correlation.r_r, "r_r");
  for (double r : correlation.r_rk) check_coefficient(r, "r_rk");
  for (double b : {rician.beta_au, rician.beta_ai, rician.beta_iu})
    if (!(b >= 0.0)) throw std::invalid_argument("Rician factors must be >= 0");
  if (!(path_loss.c0 > 0.0) || !(path_loss.d0 > 0.0))
    throw std::invalid_argument("path loss C0 and D0 must be positive");
  if ((ap_position - irs_position).norm() <= 0.0)
    throw std::invalid_argument("AP and IRS positions coincide");
  for (const auto& u : user_positions) {
    if ((u - ap_position).norm() <= 0.0 || (u - irs_position).norm() <= 0.0)
      throw std::invalid_argument("user position coincides with AP or IRS");
  }
}

double path_loss(double distance, double exponent, double c0, double d0) {
  if (!(distance > 0.0)) throw std::invalid_argument("path_loss: distance must be positive");
  if (!(d0 > 0.0)) throw std::invalid_argument("path_loss: reference distance must be positive");
  return c0 * std::pow(distance / d0, -exponent);
}

RMatrix exp_correlation(Eigen::Index n, double r) {
  check_coefficient(r, "correlation coefficient");
  RMatrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out(i, j) = std::pow(r, static_cast<double>(std::abs(j - i)));
  return out;
}

RMatrix kron_correlation(const RMatrix& horizontal, const RMatrix& vertical) {
  if (horizontal.rows() != horizontal.cols() || vertical.rows() != vertical.cols())
    throw std::invalid_argument("kron_correlation: factors must be square");
  const Eigen::Index p = horizontal.rows();
  const Eigen::Index q = vertical.rows();
  RMatrix out(p * q, p * q);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      out.block(i * q, j * q, q, q) = horizontal(i, j) * vertical;
  return out;
}

RMatrix psd_sqrt(const RMatrix& phi) {
  if (phi.rows() != phi.cols()) throw std::invalid_argument("psd_sqrt: matrix must be square");
  if (phi.size() == 0) return phi;
  const double scale = std::max(1.0, phi.cwiseAbs().maxCoeff());
  if ((phi - phi.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("psd_sqrt: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(phi);
  if (eig.info() != Eigen::Success) throw NumericalError("psd_sqrt: eigendecomposition failed");
  RVector lambda = eig.eigenvalues();
  if (lambda.minCoeff() < -1e-6 * scale) throw NotPsdError("psd_sqrt: matrix has a negative eigenvalue");
  lambda = lambda.cwiseMax(0.0).cwiseSqrt();
  const RMatrix& q = eig.eigenvectors();
  RMatrix out = q * lambda.asDiagonal() * q.transpose();
  return 0.5 * (out + out.transpose());
}

void StatisticalCsi::refresh_square_roots() {
  sqrt_phi_r = psd_sqrt(phi_r);
  sqrt_phi_d = psd_sqrt(phi_d);
  sqrt_phi_rk.clear();
  sqrt_phi_rk.reserve(phi_rk.size());
  for (const auto& p : phi_rk) sqrt_phi_rk.push_back(psd_sqrt(p));
}

StatisticalCsi build_scsi(const Scenario& scenario, Rng& rng) {
  scenario.validate();
  const int n = scenario.irs_elements();
  const int m = scenario.ap_antennas;
  const int k_users = scenario.users();
  const auto& pl = scenario.path_loss;
  const auto& beta = scenario.rician;

  const double l_ai = path_loss((scenario.ap_position - scenario.irs_position).norm(), pl.alpha_ai, pl.c0, pl.d0);

  StatisticalCsi scsi;
  // Unit-variance draws first, in a fixed order, so that the stream layout
  // does not depend on Rician factors or path gains.
  scsi.fbar = cscg_matrix(rng, n, m);
  for (int k = 0; k < k_users; ++k) scsi.zbar_r.push_back(cscg_vector(rng, n));
  for (int k = 0; k < k_users; ++k) scsi.zbar_d.push_back(cscg_vector(rng, m));

  scsi.fbar *= std::sqrt(l_ai) * deterministic_gain(beta.beta_ai);
  scsi.nlos.s_ai = std::sqrt(l_ai) * scattered_gain(beta.beta_ai);
  for (int k = 0; k < k_users; ++k) {
    const Vec3& user = scenario.user_positions[static_cast<std::size_t>(k)];
    const double l_iu = path_loss((user - scenario.irs_position).norm(), pl.alpha_iu, pl.c0, pl.d0);
    const double l_au = scenario.direct_link
                            ? path_loss((user - scenario.ap_position).norm(), pl.alpha_au, pl.c0, pl.d0)
                            : 0.0;
    scsi.zbar_r[static_cast<std::size_t>(k)] *= std::sqrt(l_iu) * deterministic_gain(beta.beta_iu);
    scsi.zbar_d[static_cast<std::size_t>(k)] *= std::sqrt(l_au) * deterministic_gain(beta.beta_au);
    scsi.nlos.s_iu.push_back(std::sqrt(l_iu) * scattered_gain(beta.beta_iu));
    scsi.nlos.s_au.push_back(std::sqrt(l_au) * scattered_gain(beta.beta_au));
  }

  const auto& corr = scenario.correlation;
  scsi.phi_d = exp_correlation(m, corr.r_d);
  scsi.phi_r = kron_correlation(exp_correlation(scenario.irs_horizontal, corr.r_r),
                                exp_correlation(scenario.irs_vertical, corr.r_r));
  for (double r : corr.r_rk)
    scsi.phi_rk.push_back(kron_correlation(exp_correlation(scenario.irs_horizontal, r),
                                           exp_correlation(scenario.irs_vertical, r)));
  scsi.refresh_square_roots();
  return scsi;
}

InstantaneousChannels sample_instantaneous(const StatisticalCsi& scsi, Rng& rng) {
  const Eigen::Index n = scsi.elements();
  const Eigen::Index m = scsi.antennas();
  const int k_users = scsi.users();
  if (scsi.sqrt_phi_r.rows() != n || scsi.sqrt_phi_d.rows() != m ||
      static_cast<int>(scsi.sqrt_phi_rk.size()) != k_users)
    throw std::invalid_argument("sample_instantaneous: square roots missing or inconsistent");

  InstantaneousChannels ch;
  ch.h_r.reserve(static_cast<std::size_t>(k_users));
  for (int k = 0; k < k_users; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    CVector z = cscg_vector(rng, n);
    ch.h_r.push_back(scsi.zbar_r[ku] + scsi.nlos.s_iu[ku] * (scsi.sqrt_phi_rk[ku].cast<Complex>() * z));
  }
  CMatrix f = cscg_matrix(rng, n, m);
  ch.g = scsi.fbar + scsi.nlos.s_ai * (scsi.sqrt_phi_r.cast<Complex>() * f * scsi.sqrt_phi_d.cast<Complex>());
  ch.h_d.reserve(static_cast<std::size_t>(k_users));
  for (int k = 0; k < k_users; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    CVector z = cscg_vector(rng, m);
    ch.h_d.push_back(scsi.zbar_d[ku] + scsi.nlos.s_au[ku] * (scsi.sqrt_phi_d.cast<Complex>() * z));
  }
  return ch;
}

InstantaneousChannels mean_channels(const StatisticalCsi& scsi) {
  InstantaneousChannels ch;
  ch.g = scsi.fbar;
  ch.h_r = scsi.zbar_r;
  ch.h_d = scsi.zbar_d;
  return ch;
}

CVector effective_channel(const CVector& v, const InstantaneousChannels& ch, int k) {
  if (k < 0 || k >= ch.users()) throw std::out_of_range("effective_channel: user index out of range");
  const auto ku = static_cast<std::size_t>(k);
  if (v.size() != ch.g.rows()) throw std::invalid_argument("effective_channel: v has wrong length");
  return ch.g.adjoint() * ch.h_r[ku].cwiseProduct(v) + ch.h_d[ku];
}

std::vector<CVector> effective_channels(const CVector& v, const InstantaneousChannels& ch) {
  std::vector<CVector> out;
  out.reserve(static_cast<std::size_t>(ch.users()));
  for (int k = 0; k < ch.users(); ++k) out.push_back(effective_channel(v, ch, k));
  return out;
}

}  // namespace irs
