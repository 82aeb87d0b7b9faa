#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "irs/channel_model.hpp"
#include "irs/phase.hpp"
#include "irs/types.hpp"

namespace irs {

using Precoders = std::vector<CVector>;

// ---------------------------------------------------------------------------
// Instantaneous rates and their derivative with respect to conj(v)

struct RatePartials {
  RVector gamma;        // total received power plus noise
  RVector gamma_minus;  // interference plus noise
  std::vector<CVector> a;
  std::vector<CVector> a_minus;
};

struct RateEvaluation {
  RVector rates;  // bits/s/Hz per user
  RatePartials partials;

  double weighted_sum(const RVector& alpha) const { return alpha.dot(rates); }
};

RateEvaluation instantaneous_rates(const CVector& v, const Precoders& w, const InstantaneousChannels& ch,
                                   const RVector& noise);

/// N x K matrix whose column k is grad_{conj(v)} r_k, rates in bits.
CMatrix rate_jacobian(const RatePartials& partials);
CMatrix rate_jacobian(const CVector& v, const Precoders& w, const InstantaneousChannels& ch, const RVector& noise);

// ---------------------------------------------------------------------------
// WMMSE short-term precoding

struct WmmseParams {
  double rel_tol = 1e-6;
  int max_iters = 200;
  double power_tol = 1e-10;  // relative bisection tolerance on the power budget
};

struct WmmseState {
  Precoders w;
  CVector u_rx;     // receive coefficients u_k = h_k^H w_k / Gamma_k
  RVector mse;      // e_k
  RVector weights;  // alpha_k / e_k
  double mu = 0.0;
  double objective = 0.0;  // sum_k alpha_k r_k in bits
  int iterations = 0;
  std::vector<double> objective_trace;
};

/// Weighted sum-rate of precoders w on effective channels h.
double weighted_sum_rate(std::span<const CVector> h, const Precoders& w, const RVector& alpha, const RVector& noise);

/// Per-user rates (bits/s/Hz) of precoders w on effective channels h.
RVector user_rates(std::span<const CVector> h, const Precoders& w, const RVector& noise);

/// Equal-power MRT-proportional start: w_k = sqrt(P/K) h_k / ||h_k||.
Precoders mrt_equal_power(std::span<const CVector> h, double power);

WmmseState wmmse_solve(std::span<const CVector> h, const RVector& alpha, double power, const RVector& noise,
                       const WmmseParams& params = {}, const Precoders* warm_start = nullptr);

/// Per-slot precoding for fixed phases: MRT when K = 1, WMMSE otherwise.
WmmseState short_term_precoding(std::span<const CVector> h, const RVector& alpha, double power,
                                const RVector& noise, const WmmseParams& params = {},
                                const Precoders* warm_start = nullptr);

// ---------------------------------------------------------------------------
// Stochastic successive convex approximation (long-term phases)

struct SscaParams {
  int samples_per_iter = 10;  // T_H
  double tau = 0.01;
  double rho_exponent = 0.8;    // rho_t = t^-x
  double gamma_exponent = 1.0;  // gamma_t = t^-y
  int max_iters = 2000;
  double tolerance = 1e-4;  // on ||v^t - v^{t-1}||_inf
  int patience = 20;        // consecutive iterations below tolerance
  AmplitudeMode amplitude = AmplitudeMode::relaxed;
  PhaseResolution resolution = PhaseResolution::continuous();
  WmmseParams wmmse;

  /// Checks the step-size conditions for the power-law family
  /// (0.5 < rho_exponent < gamma_exponent <= 1) and the remaining ranges.
  void validate() const;
  double rho(int t) const;
  double gamma(int t) const;
};

struct SurrogateState {
  RVector r_hat;  // running average of alpha_k r_k
  CMatrix f_mat;  // running average of the rate Jacobian, N x K
  CVector f;      // f_mat * alpha
  CVector v_prev;
  CVector v_bar;
  int t = 0;  // number of completed surrogate updates

  static SurrogateState initial(const CVector& v0, int users);
};

/// Folds T_H samples (and the precoders computed for them at v_prev) into the
/// recursive estimates of the average rates and their gradient.
SurrogateState ssca_update_surrogate(const SurrogateState& state, std::span<const InstantaneousChannels> samples,
                                     std::span<const WmmseState> precoders, const RVector& alpha,
                                     const RVector& noise, const SscaParams& params);

/// Per-element maximizer of the quadratic surrogate over |v_n| <= 1
/// (or |v_n| = 1 in unit-amplitude mode).
CVector solve_surrogate(const SurrogateState& state, double tau, AmplitudeMode mode = AmplitudeMode::relaxed);

/// v^t = (1 - gamma_t) v^{t-1} + gamma_t v_bar, gamma_t = t^-gamma_exponent.
CVector ssca_step_v(const CVector& v_prev, const CVector& v_bar, int t, double gamma_exponent);

/// Unit-modulus recovery followed by nearest-level projection.
PhaseConfig project_discrete(const CVector& v, PhaseResolution resolution);

struct SscaTraceRow {
  int t = 0;
  double rho = 0.0;
  double gamma = 0.0;
  double sum_r_hat = 0.0;
  double v_change_inf_norm = 0.0;
};

struct SscaResult {
  PhaseConfig phases;    // projected onto the configured resolution
  CVector v_continuous;  // last iterate before projection
  std::vector<SscaTraceRow> trace;
  bool converged = false;
  int iterations = 0;
};

/// Long-term phase optimization from statistical CSI. Channel samples for
/// iteration t come from the stream ("ssca", t) under `stream_seed`.
SscaResult ssca_run(const StatisticalCsi& scsi, const RVector& alpha, double power, const RVector& noise,
                    const SscaParams& params, const CVector& v0, std::uint64_t stream_seed);

void write_ssca_trace_csv(std::ostream& os, const std::vector<SscaTraceRow>& trace);

}  // namespace irs
