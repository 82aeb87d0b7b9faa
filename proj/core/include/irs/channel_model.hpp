#pragma once

#include <vector>

#include "irs/phase.hpp"
#include "irs/rng.hpp"
#include "irs/types.hpp"

namespace irs {

/// Distance-dependent path loss C0 (d/D0)^-alpha, all in linear units.
struct PathLossModel {
  double c0 = 1e-3;
  double d0 = 1.0;
  double alpha_au = 3.4;
  double alpha_ai = 2.2;
  double alpha_iu = 3.0;
};

/// Linear Rician factors. 0 is Rayleigh, +inf is purely deterministic.
struct RicianFactors {
  double beta_au = 0.0;
  double beta_ai = 0.0;
  double beta_iu = 0.0;
};

/// Exponential-model correlation coefficients, each in [0, 1].
struct CorrelationSpec {
  double r_d = 0.0;
  double r_r = 0.0;
  std::vector<double> r_rk;  // one per user
};

struct Scenario {
  Vec3 ap_position{2.0, 0.0, 0.0};
  int ap_antennas = 4;
  Vec3 irs_position{0.0, 50.0, 3.0};
  // UPA factorization. The first factor is mapped to the horizontal
  // correlation domain and the second to the vertical one.
  int irs_horizontal = 4;
  int irs_vertical = 10;
  std::vector<Vec3> user_positions{Vec3{2.0, 50.0, 0.0}};
  double transmit_power = 3.1622776601683795e-3;  // 5 dBm
  std::vector<double> noise_powers{1e-11};        // -80 dBm
  PathLossModel path_loss;
  RicianFactors rician;
  CorrelationSpec correlation{0.0, 0.0, {0.0}};
  bool direct_link = true;

  int irs_elements() const { return irs_horizontal * irs_vertical; }
  int users() const { return static_cast<int>(user_positions.size()); }
  RVector noise_vector() const;
  /// Throws std::invalid_argument on any broken invariant.
  void validate() const;
};

/// Per-entry standard deviations of the scattered channel parts after the
/// Rician factor and the path gain have been absorbed.
struct NlosScale {
  double s_ai = 0.0;
  std::vector<double> s_au;  // per user
  std::vector<double> s_iu;  // per user
};

/// Statistical CSI: absorbed deterministic components and correlations.
struct StatisticalCsi {
  std::vector<CVector> zbar_r;  // K x (N)
  std::vector<CVector> zbar_d;  // K x (M)
  CMatrix fbar;                 // N x M
  RMatrix phi_r;                // N x N
  RMatrix phi_d;                // M x M
  std::vector<RMatrix> phi_rk;  // K x (N x N)
  NlosScale nlos;

  // Cached symmetric square roots used by the sampler.
  RMatrix sqrt_phi_r;
  RMatrix sqrt_phi_d;
  std::vector<RMatrix> sqrt_phi_rk;

  Eigen::Index elements() const { return fbar.rows(); }
  Eigen::Index antennas() const { return fbar.cols(); }
  int users() const { return static_cast<int>(zbar_r.size()); }

  /// Recomputes the cached square roots from the correlation matrices.
  void refresh_square_roots();
};

/// One realization of all links for a single time slot.
struct InstantaneousChannels {
  CMatrix g;                  // N x M, AP -> IRS
  std::vector<CVector> h_r;   // K x (N), IRS -> user
  std::vector<CVector> h_d;   // K x (M), AP -> user

  int users() const { return static_cast<int>(h_r.size()); }
};

double path_loss(double distance, double exponent, double c0, double d0);

RMatrix exp_correlation(Eigen::Index n, double r);
RMatrix kron_correlation(const RMatrix& horizontal, const RMatrix& vertical);

/// Symmetric PSD square root via eigendecomposition. Negative eigenvalues
/// down to -1e-6 are clamped to zero; below that NotPsdError is thrown.
RMatrix psd_sqrt(const RMatrix& phi);

StatisticalCsi build_scsi(const Scenario& scenario, Rng& rng);

InstantaneousChannels sample_instantaneous(const StatisticalCsi& scsi, Rng& rng);

/// Deterministic part of the channel (the mean realization).
InstantaneousChannels mean_channels(const StatisticalCsi& scsi);

/// h_k = G^H diag(h_{r,k}) v + h_{d,k}, i.e. h_k^H = v^H diag(h_{r,k}^H) G + h_{d,k}^H.
CVector effective_channel(const CVector& v, const InstantaneousChannels& ch, int k);
inline CVector effective_channel(const PhaseConfig& phases, const InstantaneousChannels& ch, int k) {
  return effective_channel(phases.v, ch, k);
}
std::vector<CVector> effective_channels(const CVector& v, const InstantaneousChannels& ch);

}  // namespace irs
