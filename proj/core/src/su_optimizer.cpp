#include "irs/su_optimizer.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <spdlog/spdlog.h>

namespace irs {

CVector QuadraticForm::apply(const CVector& v) const {
  if (factor.size() > 0) return factor * (factor.adjoint() * v);
  return phi * v;
}

double QuadraticForm::objective(const CVector& v) const {
  return (v.dot(apply(v))).real() + 2.0 * v.dot(b).real();
}

QuadraticForm quadratic_form_for_user(const StatisticalCsi& scsi, int k) {
  if (k < 0 || k >= scsi.users()) throw std::out_of_range("quadratic_form_for_user: bad user index");
  const auto ku = static_cast<std::size_t>(k);
  const CVector& zr = scsi.zbar_r[ku];
  const CVector& zd = scsi.zbar_d[ku];
  const RMatrix& phi_ru = scsi.phi_rk[ku];
  const double s_ai2 = scsi.nlos.s_ai * scsi.nlos.s_ai;
  const double s_iu2 = scsi.nlos.s_iu[ku] * scsi.nlos.s_iu[ku];
  const double s_au2 = scsi.nlos.s_au[ku] * scsi.nlos.s_au[ku];

  QuadraticForm qf;
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(scsi.phi_d, Eigen::EigenvaluesOnly);
  qf.phi_d_eigs = eig.eigenvalues();
  const double lambda_sum = qf.phi_d_eigs.sum();

  // diag(zbar_r^H) Fbar
  const CMatrix a = zr.conjugate().asDiagonal() * scsi.fbar;
  const CMatrix ff = scsi.fbar * scsi.fbar.adjoint();
  // diag(zbar_r^H) Phi_r diag(zbar_r), entry (i,j) = conj(z_i) Phi_r(i,j) z_j
  const CMatrix zz = zr.conjugate() * zr.transpose();

  qf.phi = a * a.adjoint();
  qf.phi += (s_ai2 * lambda_sum) * zz.cwiseProduct(scsi.phi_r.cast<Complex>());
  qf.phi += s_iu2 * ff.cwiseProduct(phi_ru.cast<Complex>());
  qf.phi += (lambda_sum * s_ai2 * s_iu2) * phi_ru.cwiseProduct(scsi.phi_r).cast<Complex>();
  qf.phi = 0.5 * (qf.phi + qf.phi.adjoint()).eval();

  qf.b = a * zd;
  qf.const_term = zd.squaredNorm() + s_au2 * scsi.phi_d.trace();
  return qf;
}

QuadraticForm build_quadratic_form(const StatisticalCsi& scsi) {
  if (scsi.users() != 1)
    throw std::invalid_argument("build_quadratic_form: single-user S-CSI required (K = 1)");
  return quadratic_form_for_user(scsi, 0);
}

QuadraticForm instantaneous_quadratic_form(const InstantaneousChannels& ch, int k) {
  if (k < 0 || k >= ch.users()) throw std::out_of_range("instantaneous_quadratic_form: bad user index");
  const auto ku = static_cast<std::size_t>(k);
  const CMatrix a = ch.h_r[ku].conjugate().asDiagonal() * ch.g;
  QuadraticForm qf;
  qf.phi = a * a.adjoint();
  qf.factor = a;
  qf.b = a * ch.h_d[ku];
  qf.const_term = ch.h_d[ku].squaredNorm();
  return qf;
}

double su_rate_upper_bound(const QuadraticForm& qf, const CVector& v, double power, double noise) {
  const double quad = v.dot(qf.apply(v)).real();
  const double lin = 2.0 * v.dot(qf.b).real();
  const double q = quad + lin + qf.const_term;
  const double magnitude = std::abs(quad) + std::abs(lin) + std::abs(qf.const_term);
  if (q < -1e-9 * std::max(magnitude, std::numeric_limits<double>::min()))
    throw NumericalError("su_rate_upper_bound: negative average channel power (Phi not PSD)");
  return std::log2(1.0 + power * std::max(q, 0.0) / noise);
}

CVector mrt_precoder(const CVector& h_eff, double power) {
  const double norm = h_eff.norm();
  if (norm == 0.0) {
    spdlog::warn("mrt_precoder: zero effective channel, returning zero precoder");
    return CVector::Zero(h_eff.size());
  }
  return (std::sqrt(power) / norm) * h_eff;
}

double mrt_rate(const CVector& h_eff, double power, double noise) {
  return std::log2(1.0 + power * h_eff.squaredNorm() / noise);
}

// ---------------------------------------------------------------------------

void PddParams::validate() const {
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("PDD penalty scale c must lie in (0, 1)");
  if (!(eps_in > 0.0) || !(eps_out > 0.0)) throw std::invalid_argument("PDD tolerances must be positive");
  if (max_inner < 1 || max_outer < 1) throw std::invalid_argument("PDD iteration caps must be >= 1");
}

double augmented_lagrangian(const PddState& state, const QuadraticForm& qf) {
  const CVector gap = state.v - state.u + state.rho * state.lambda;
  return -qf.objective(state.v) + gap.squaredNorm() / (2.0 * state.rho);
}

CVector pdd_v_step(const PddState& state, const QuadraticForm& qf) {
  const double n = static_cast<double>(state.v.size());
  CVector c = state.u - state.rho * state.lambda + (2.0 * state.rho) * (qf.apply(state.v) + qf.b);
  const double c2 = c.squaredNorm();
  if (c2 > n) c /= std::sqrt(c2 / n);
  return c;
}

namespace {

// Elementwise PhaseResolution::quantize with the level phasors tabulated.
class GridProjector {
 public:
  explicit GridProjector(PhaseResolution resolution) : resolution_(resolution) {
    for (int l = 0; l < resolution.level_count(); ++l) table_.push_back(std::polar(1.0, resolution.level_angle(l)));
  }

  CVector operator()(const CVector& target) const {
    CVector out(target.size());
    for (Eigen::Index i = 0; i < target.size(); ++i) {
      const Complex z = target(i);
      if (z == Complex(0.0, 0.0)) {
        out(i) = Complex(1.0, 0.0);
      } else if (resolution_.is_continuous()) {
        out(i) = z / std::abs(z);
      } else {
        out(i) = table_[static_cast<std::size_t>(resolution_.nearest_level(std::arg(z)))];
      }
    }
    return out;
  }

 private:
  PhaseResolution resolution_;
  std::vector<Complex> table_;
};

}  // namespace

CVector pdd_u_step(const PddState& state, PhaseResolution resolution) {
  return GridProjector(resolution)(state.v + state.rho * state.lambda);
}

namespace {

double lambda_max(const QuadraticForm& qf) {
  if (qf.factor.size() > 0) {
    const CMatrix gram = qf.factor.adjoint() * qf.factor;
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().maxCoeff();
  }
  if (qf.phi.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(qf.phi, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

CVector project_to_grid(const CVector& v, PhaseResolution resolution) { return GridProjector(resolution)(v); }

}  // namespace

PddResult pdd_solve(const QuadraticForm& qf, const PddParams& params, const std::optional<CVector>& v0,
                    bool record_trace) {
  params.validate();
  const Eigen::Index n = qf.size();
  if (qf.phi.rows() != n || qf.phi.cols() != n) throw std::invalid_argument("pdd_solve: inconsistent form");

  PddResult result;
  result.phases.resolution = params.resolution;
  result.phases.amplitude = AmplitudeMode::unit;

  const CVector start = v0 ? project_to_grid(*v0, params.resolution) : all_ones_phase(n);
  if (start.size() != n) throw std::invalid_argument("pdd_solve: v0 has wrong length");

  // Work on a normalized copy so that iteration counts, tolerances and the
  // returned grid point do not depend on the physical scale of (Phi, b).
  const double lmax = std::max(lambda_max(qf), 0.0);
  const double scale = std::max(lmax, qf.b.norm() / std::sqrt(static_cast<double>(std::max<Eigen::Index>(n, 1))));
  if (!(scale > 0.0)) {
    result.phases.v = start;
    result.objective = 0.0;
    result.converged = true;
    return result;
  }
  QuadraticForm norm_qf;
  norm_qf.phi = qf.phi / scale;
  if (qf.factor.size() > 0) norm_qf.factor = qf.factor / std::sqrt(scale);
  norm_qf.b = qf.b / scale;

  PddState state;
  state.v = start;
  state.u = start;
  state.lambda = CVector::Zero(n);
  if (params.rho0 > 0.0) {
    state.rho = params.rho0 * scale;
  } else {
    const double lm = lmax / scale;
    state.rho = lm > 0.0 ? 10.0 / (2.0 * lm) : 5.0;
  }

  const GridProjector project(params.resolution);
  CVector best_u = state.u;
  double best_obj = norm_qf.objective(best_u);
  // Same steps as pdd_v_step / pdd_u_step / augmented_lagrangian, with
  // Phi v cached between the AL evaluation and the next v-step.
  const double n_elems = static_cast<double>(n);
  CVector phi_v = norm_qf.apply(state.v);
  CVector c(n);
  CVector gap(n);
  auto al_value = [&] {
    gap = state.v - state.u + state.rho * state.lambda;
    const double f = state.v.dot(phi_v).real() + 2.0 * state.v.dot(norm_qf.b).real();
    return -f + gap.squaredNorm() / (2.0 * state.rho);
  };
  for (int outer = 1; outer <= params.max_outer; ++outer) {
    double al_prev = al_value();
    for (int inner = 1; inner <= params.max_inner; ++inner) {
      c = state.u - state.rho * state.lambda + (2.0 * state.rho) * (phi_v + norm_qf.b);
      const double c2 = c.squaredNorm();
      if (c2 > n_elems) c /= std::sqrt(c2 / n_elems);
      state.v = c;
      phi_v = norm_qf.apply(state.v);
      state.u = project(state.v + state.rho * state.lambda);
      if (const double obj_u = norm_qf.objective(state.u); obj_u > best_obj) {
        best_obj = obj_u;
        best_u = state.u;
      }
      const double al = al_value();
      state.al_objective = al * scale;
      ++result.inner_iterations;
      if (record_trace) {
        result.trace.push_back({outer, inner, al * scale, qf.objective(state.v),
                                (state.v - state.u).cwiseAbs().maxCoeff()});
      }
      const bool settled = std::abs(al_prev - al) / std::max(1.0, std::abs(al)) < params.eps_in;
      al_prev = al;
      if (settled) break;
    }
    result.outer_iterations = outer;
    result.violation = (state.v - state.u).cwiseAbs().maxCoeff();
    if (result.violation < params.eps_out) {
      result.converged = true;
      break;
    }
    state.lambda += (state.v - state.u) / state.rho;
    state.rho *= params.c;
  }

  if (!result.converged)
    spdlog::debug("pdd_solve: no convergence after {} outer iterations (violation {:.3e})",
                  result.outer_iterations, result.violation);
  result.phases.v = best_u;
  result.objective = qf.objective(best_u);
  return result;
}

void write_pdd_trace_csv(std::ostream& os, const std::vector<PddIterate>& trace) {
  os << "outer_iter,inner_iter,al_value,objective,violation_inf_norm\n";
  char buf[256];
  for (const auto& row : trace) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.6g,%.6g,%.6g\n", row.outer_iter, row.inner_iter, row.al_value,
                  row.objective, row.violation_inf_norm);
    os << buf;
  }
}

// ---------------------------------------------------------------------------

BcdResult bcd_solve(const QuadraticForm& qf, PhaseResolution resolution, const std::optional<CVector>& v0,
                    int max_sweeps) {
  const Eigen::Index n = qf.size();
  CVector v = v0 ? project_to_grid(*v0, resolution) : all_ones_phase(n);
  if (v.size() != n) throw std::invalid_argument("bcd_solve: v0 has wrong length");

  BcdResult result;
  CVector y = qf.phi * v;
  double obj = qf.objective(v);
  result.sweep_objectives.push_back(obj);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const Complex q = y(i) - qf.phi(i, i) * v(i) + qf.b(i);
      if (q == Complex(0.0, 0.0)) continue;
      const Complex candidate = resolution.quantize(q);
      // Only move on strict improvement of Re{conj(v_i) q_i}.
      if ((std::conj(candidate) * q).real() > (std::conj(v(i)) * q).real()) {
        y += qf.phi.col(i) * (candidate - v(i));
        v(i) = candidate;
      }
    }
    y = qf.phi * v;
    const double next = qf.objective(v);
    result.sweep_objectives.push_back(next);
    const bool done = (next - obj) <= 1e-8 * std::abs(next);
    obj = next;
    if (done) break;
  }
  result.phases = PhaseConfig{v, resolution, AmplitudeMode::unit};
  result.objective = obj;
  return result;
}

BruteForceResult brute_force_solve(const QuadraticForm& qf, PhaseResolution resolution) {
  if (resolution.is_continuous()) throw std::invalid_argument("brute_force_solve: discrete resolution required");
  const Eigen::Index n = qf.size();
  const int levels = resolution.level_count();
  const double space = std::pow(static_cast<double>(levels), static_cast<double>(n));
  if (space > static_cast<double>(1 << 20)) throw std::invalid_argument("brute_force_solve: search space exceeds 2^20");

  std::vector<Complex> phasor(static_cast<std::size_t>(levels));
  for (int l = 0; l < levels; ++l) phasor[static_cast<std::size_t>(l)] = std::polar(1.0, resolution.level_angle(l));

  // Fixed tie-breaking: a later candidate must beat the incumbent by a margin
  // proportional to the problem scale.
  const double ref = qf.phi.cwiseAbs().sum() + 2.0 * qf.b.cwiseAbs().sum();
  const double tie_tol = 1e-12 * ref;

  std::vector<int> digits(static_cast<std::size_t>(n), 0);
  CVector v = CVector::Constant(n, phasor[0]);
  BruteForceResult best{PhaseConfig{v, resolution, AmplitudeMode::unit}, qf.objective(v)};
  const auto total = static_cast<long long>(std::llround(space));
  for (long long idx = 1; idx < total; ++idx) {
    for (Eigen::Index i = 0; i < n; ++i) {
      auto& d = digits[static_cast<std::size_t>(i)];
      d = (d + 1) % levels;
      v(i) = phasor[static_cast<std::size_t>(d)];
      if (d != 0) break;
    }
    const double obj = qf.objective(v);
    if (obj > best.objective + tie_tol) {
      best.objective = obj;
      best.phases.v = v;
    }
  }
  return best;
}

}  // namespace irs
