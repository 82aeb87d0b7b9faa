#pragma once

#include <cmath>

#include "irs/channel_model.hpp"
#include "irs/rng.hpp"
#include "irs/su_optimizer.hpp"

namespace irs::testing {

inline double db(double x) { return std::pow(10.0, x / 10.0); }

/// Default geometry with a smaller IRS and K users spread along x.
inline Scenario small_scenario(int horizontal, int vertical, int antennas, int users = 1) {
  Scenario s;
  s.irs_horizontal = horizontal;
  s.irs_vertical = vertical;
  s.ap_antennas = antennas;
  s.user_positions.clear();
  for (int k = 0; k < users; ++k) s.user_positions.push_back(Vec3(2.0 + 1.5 * k, 50.0, 0.0));
  s.noise_powers.assign(static_cast<std::size_t>(users), 1e-11);
  s.rician = {db(-3.0), db(3.0), db(3.0)};
  s.correlation = {0.2, 0.5, std::vector<double>(static_cast<std::size_t>(users), 0.5)};
  return s;
}

inline CVector random_unit_modulus(Rng& rng, Eigen::Index n) {
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = std::polar(1.0, kTwoPi * uniform01(rng));
  return v;
}

inline CMatrix random_psd(Rng& rng, Eigen::Index n, Eigen::Index rank) {
  const CMatrix a = cscg_matrix(rng, n, rank);
  return a * a.adjoint();
}

/// Random Hermitian PSD Phi and random b.
inline QuadraticForm random_form(Rng& rng, Eigen::Index n) {
  QuadraticForm qf;
  qf.phi = random_psd(rng, n, n);
  qf.b = cscg_vector(rng, n);
  return qf;
}

/// Averaged single-user form of a random S-CSI draw: Rician factors,
/// correlation coefficients, antenna count and user position all vary.
inline QuadraticForm random_scsi_form(Rng& rng, int horizontal, int vertical) {
  Scenario s = small_scenario(horizontal, vertical, 1 + static_cast<int>(4.0 * uniform01(rng)));
  s.rician = {db(-3.0 + 10.0 * uniform01(rng)), db(-10.0 + 30.0 * uniform01(rng)), db(-10.0 + 30.0 * uniform01(rng))};
  s.correlation = {uniform01(rng), uniform01(rng), {uniform01(rng)}};
  s.user_positions[0] = Vec3(2.0 + 10.0 * uniform01(rng), 40.0 + 20.0 * uniform01(rng), 0.0);
  return build_quadratic_form(build_scsi(s, rng));
}

}  // namespace irs::testing
