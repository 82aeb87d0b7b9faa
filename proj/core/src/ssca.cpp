#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "irs/mu_optimizer.hpp"
#include "irs/rng.hpp"

namespace irs {

void SscaParams::validate() const {
  if (samples_per_iter < 1) throw std::invalid_argument("ssca: samples_per_iter must be >= 1");
  if (!(tau > 0.0)) throw std::invalid_argument("ssca: tau must be > 0");
  if (!(rho_exponent > 0.5 && rho_exponent < gamma_exponent && gamma_exponent <= 1.0))
    throw std::invalid_argument("ssca: step sizes need 0.5 < rho_exponent < gamma_exponent <= 1");
  if (max_iters < 1) throw std::invalid_argument("ssca: max_iters must be >= 1");
  if (!(tolerance > 0.0)) throw std::invalid_argument("ssca: tolerance must be > 0");
  if (patience < 1) throw std::invalid_argument("ssca: patience must be >= 1");
}

double SscaParams::rho(int t) const { return std::pow(static_cast<double>(t), -rho_exponent); }
double SscaParams::gamma(int t) const { return std::pow(static_cast<double>(t), -gamma_exponent); }

SurrogateState SurrogateState::initial(const CVector& v0, int users) {
  SurrogateState s;
  s.r_hat = RVector::Zero(users);
  s.f_mat = CMatrix::Zero(v0.size(), users);
  s.f = CVector::Zero(v0.size());
  s.v_prev = v0;
  s.v_bar = v0;
  s.t = 0;
  return s;
}

SurrogateState ssca_update_surrogate(const SurrogateState& state, std::span<const InstantaneousChannels> samples,
                                     std::span<const WmmseState> precoders, const RVector& alpha,
                                     const RVector& noise, const SscaParams& params) {
  if (samples.empty() || samples.size() != precoders.size())
    throw std::invalid_argument("ssca_update_surrogate: need one precoder set per sample");
  SurrogateState next = state;
  next.t = state.t + 1;
  const double rho = params.rho(next.t);

  RVector mean_rates = RVector::Zero(state.r_hat.size());
  CMatrix mean_jac = CMatrix::Zero(state.f_mat.rows(), state.f_mat.cols());
  for (std::size_t l = 0; l < samples.size(); ++l) {
    const RateEvaluation eval = instantaneous_rates(state.v_prev, precoders[l].w, samples[l], noise);
    mean_rates += alpha.cwiseProduct(eval.rates);
    mean_jac += rate_jacobian(eval.partials);
  }
  const double inv = 1.0 / static_cast<double>(samples.size());
  next.r_hat = (1.0 - rho) * state.r_hat + (rho * inv) * mean_rates;
  next.f_mat = (1.0 - rho) * state.f_mat + (rho * inv) * mean_jac;
  next.f = next.f_mat * alpha.cast<Complex>();
  return next;
}

CVector solve_surrogate(const SurrogateState& state, double tau, AmplitudeMode mode) {
  if (!(tau > 0.0)) throw std::invalid_argument("solve_surrogate: tau must be > 0");
  const Eigen::Index n = state.v_prev.size();
  CVector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex num = tau * state.v_prev(i) + state.f(i);
    const double mag = std::abs(num);
    if (mode == AmplitudeMode::unit) {
      out(i) = mag > 0.0 ? num / mag : state.v_prev(i) / std::max(std::abs(state.v_prev(i)), 1e-300);
      if (mag == 0.0 && std::abs(state.v_prev(i)) == 0.0) out(i) = Complex(1.0, 0.0);
      continue;
    }
    const Complex free = state.v_prev(i) + state.f(i) / tau;
    if (std::abs(free) <= 1.0) {
      out(i) = free;
    } else {
      const double lambda = mag - tau;
      out(i) = num / (tau + lambda);
    }
  }
  return out;
}

CVector ssca_step_v(const CVector& v_prev, const CVector& v_bar, int t, double gamma_exponent) {
  const double g = std::pow(static_cast<double>(t), -gamma_exponent);
  return (1.0 - g) * v_prev + g * v_bar;
}

PhaseConfig project_discrete(const CVector& v, PhaseResolution resolution) {
  PhaseConfig out;
  out.resolution = resolution;
  out.amplitude = AmplitudeMode::unit;
  out.v.resize(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out.v(i) = resolution.quantize(v(i));
  return out;
}

namespace {

CVector to_unit_modulus(const CVector& v) {
  CVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    out(i) = mag > 0.0 ? v(i) / mag : Complex(1.0, 0.0);
  }
  return out;
}

}  // namespace

SscaResult ssca_run(const StatisticalCsi& scsi, const RVector& alpha, double power, const RVector& noise,
                    const SscaParams& params, const CVector& v0, std::uint64_t stream_seed) {
  params.validate();
  const int k_users = scsi.users();
  if (v0.size() != scsi.elements()) throw std::invalid_argument("ssca_run: v0 has the wrong length");
  if (alpha.size() != k_users || noise.size() != k_users)
    throw std::invalid_argument("ssca_run: alpha and noise need one entry per user");

  CVector v = params.amplitude == AmplitudeMode::unit ? to_unit_modulus(v0) : v0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > 1.0) v(i) /= std::abs(v(i));

  SurrogateState state = SurrogateState::initial(v, k_users);
  SscaResult result;
  const auto samples_per_iter = static_cast<std::size_t>(params.samples_per_iter);
  std::vector<InstantaneousChannels> samples(samples_per_iter);
  std::vector<WmmseState> precoders(samples_per_iter);
  int below = 0;

  for (int t = 1; t <= params.max_iters; ++t) {
    Rng rng = make_stream(stream_seed, "ssca", {static_cast<std::uint64_t>(t)});
    for (std::size_t l = 0; l < samples_per_iter; ++l) samples[l] = sample_instantaneous(scsi, rng);
    // Each sample warm-starts from the same sample index of the previous
    // iteration, so the per-sample solves stay independent of each other.
    for (std::size_t l = 0; l < samples_per_iter; ++l) {
      const auto h = effective_channels(v, samples[l]);
      const Precoders* warm = t > 1 ? &precoders[l].w : nullptr;
      precoders[l] = short_term_precoding(h, alpha, power, noise, params.wmmse, warm);
    }
    state = ssca_update_surrogate(state, samples, precoders, alpha, noise, params);
    const CVector v_bar = solve_surrogate(state, params.tau, params.amplitude);
    CVector v_next = ssca_step_v(state.v_prev, v_bar, state.t, params.gamma_exponent);
    if (params.amplitude == AmplitudeMode::unit) v_next = to_unit_modulus(v_next);

    const double change = (v_next - v).cwiseAbs().maxCoeff();
    result.trace.push_back({state.t, params.rho(state.t), params.gamma(state.t), state.r_hat.sum(), change});
    state.v_bar = v_bar;
    state.v_prev = v_next;
    v = v_next;
    result.iterations = t;

    below = change < params.tolerance ? below + 1 : 0;
    if (below >= params.patience) {
      result.converged = true;
      break;
    }
  }
  result.v_continuous = v;
  result.phases = project_discrete(v, params.resolution);
  return result;
}

void write_ssca_trace_csv(std::ostream& os, const std::vector<SscaTraceRow>& trace) {
  os << "t,rho_t,gamma_t,sum_r_hat,v_change_inf_norm\n";
  char buf[256];
  for (const auto& row : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.6g,%.6g,%.6g,%.6g\n", row.t, row.rho, row.gamma, row.sum_r_hat,
                  row.v_change_inf_norm);
    os << buf;
  }
}

}  // namespace irs
