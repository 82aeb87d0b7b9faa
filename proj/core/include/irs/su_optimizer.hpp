#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "irs/channel_model.hpp"
#include "irs/phase.hpp"
#include "irs/types.hpp"

namespace irs {

/// Average received power E{||h_r^H Theta G + h_d^H||^2} written as a
/// quadratic in v: v^H Phi v + 2 Re{v^H b} + const_term.
struct QuadraticForm {
  CMatrix phi;
  CVector b;
  double const_term = 0.0;
  RVector phi_d_eigs;
  // Optional N x r factor with phi == factor * factor^H. When present,
  // products with phi go through it, which is cheaper for low rank.
  CMatrix factor;

  Eigen::Index size() const { return b.size(); }
  /// phi * v
  CVector apply(const CVector& v) const;
  /// v^H Phi v + 2 Re{v^H b}
  double objective(const CVector& v) const;
  /// objective(v) + const_term
  double value(const CVector& v) const { return objective(v) + const_term; }
};

/// Single-user form from statistical CSI. Throws std::invalid_argument if K != 1.
QuadraticForm build_quadratic_form(const StatisticalCsi& scsi);
/// The same construction for user k of a multiuser S-CSI.
QuadraticForm quadratic_form_for_user(const StatisticalCsi& scsi, int k);
/// ||h_k||^2 for a known realization: Phi = D G G^H D^H, b = D G h_d with D = diag(h_r^H).
QuadraticForm instantaneous_quadratic_form(const InstantaneousChannels& ch, int k);

double su_rate_upper_bound(const QuadraticForm& qf, const CVector& v, double power, double noise);

/// sqrt(P) h / ||h||. A zero channel yields a zero precoder.
CVector mrt_precoder(const CVector& h_eff, double power);
/// log2(1 + P ||h||^2 / sigma^2)
double mrt_rate(const CVector& h_eff, double power, double noise);

// ---------------------------------------------------------------------------
// Penalty dual decomposition

struct PddParams {
  double rho0 = 0.0;  // <= 0 selects 10 / (2 lambda_max(Phi)) after normalization
  double c = 0.95;
  double eps_in = 1e-4;
  double eps_out = 1e-6;
  int max_inner = 100;
  int max_outer = 2000;
  PhaseResolution resolution = PhaseResolution::continuous();

  void validate() const;
};

struct PddState {
  CVector v;
  CVector u;
  CVector lambda;
  double rho = 1.0;
  double al_objective = 0.0;
};

/// AL value of the minimization form:
/// -(v^H Phi v + 2 Re{v^H b}) + ||v - u + rho lambda||^2 / (2 rho)
double augmented_lagrangian(const PddState& state, const QuadraticForm& qf);

/// BSUM step on v around the current v.
CVector pdd_v_step(const PddState& state, const QuadraticForm& qf);
/// Exact minimization of ||v - u + rho lambda||^2 over the phase grid.
CVector pdd_u_step(const PddState& state, PhaseResolution resolution);

struct PddIterate {
  int outer_iter = 0;
  int inner_iter = 0;
  double al_value = 0.0;
  double objective = 0.0;
  double violation_inf_norm = 0.0;
};

struct PddResult {
  PhaseConfig phases;
  double objective = 0.0;
  double violation = 0.0;
  bool converged = false;
  int outer_iterations = 0;
  int inner_iterations = 0;
  std::vector<PddIterate> trace;
};

PddResult pdd_solve(const QuadraticForm& qf, const PddParams& params,
                    const std::optional<CVector>& v0 = std::nullopt, bool record_trace = false);

void write_pdd_trace_csv(std::ostream& os, const std::vector<PddIterate>& trace);

// ---------------------------------------------------------------------------
// Reference solvers

struct BcdResult {
  PhaseConfig phases;
  double objective = 0.0;
  std::vector<double> sweep_objectives;  // objective after each full sweep, [0] is the start
};

/// Cyclic one-element-at-a-time maximization of v^H Phi v + 2 Re{v^H b}.
BcdResult bcd_solve(const QuadraticForm& qf, PhaseResolution resolution,
                    const std::optional<CVector>& v0 = std::nullopt, int max_sweeps = 1000);

struct BruteForceResult {
  PhaseConfig phases;
  double objective = 0.0;
};

/// Exhaustive search over all L^N grid vectors (L^N <= 2^20).
BruteForceResult brute_force_solve(const QuadraticForm& qf, PhaseResolution resolution);

}  // namespace irs
