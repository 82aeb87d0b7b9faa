#include "irs/baselines.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace irs {

namespace {

constexpr std::array<std::pair<BaselineKind, std::string_view>, 5> kTags{{
    {BaselineKind::random_phase, "random-phase"},
    {BaselineKind::no_irs, "no-irs"},
    {BaselineKind::naive_icsi, "naive-icsi"},
    {BaselineKind::single_timescale, "single-timescale"},
    {BaselineKind::icsi_per_slot, "icsi-per-slot"},
}};

}  // namespace

std::string_view to_string(BaselineKind kind) {
  for (const auto& [k, tag] : kTags)
    if (k == kind) return tag;
  return "unknown";
}

BaselineKind parse_baseline(std::string_view tag) {
  for (const auto& [k, t] : kTags)
    if (t == tag) return k;
  throw std::invalid_argument("unknown baseline tag '" + std::string(tag) + "'");
}

PhaseConfig random_phase(PhaseResolution resolution, Eigen::Index n, Rng& rng) {
  PhaseConfig out{CVector(n), resolution, AmplitudeMode::unit};
  if (resolution.is_continuous()) {
    for (Eigen::Index i = 0; i < n; ++i) out.v(i) = std::polar(1.0, kTwoPi * uniform01(rng));
    return out;
  }
  std::uniform_int_distribution<int> pick(0, resolution.level_count() - 1);
  for (Eigen::Index i = 0; i < n; ++i) out.v(i) = std::polar(1.0, resolution.level_angle(pick(rng)));
  return out;
}

RVector no_irs_rate(const InstantaneousChannels& ch, const RVector& alpha, double power, const RVector& noise,
                    const WmmseParams& wmmse) {
  const std::vector<CVector>& h = ch.h_d;
  if (h.size() == 1) {
    RVector r(1);
    r(0) = h[0].norm() > 0.0 ? mrt_rate(h[0], power, noise(0)) : 0.0;
    return r;
  }
  const WmmseState state = wmmse_solve(h, alpha, power, noise, wmmse);
  return user_rates(h, state.w, noise);
}

QuadraticForm weighted_mse_form(const InstantaneousChannels& ch, const WmmseState& state) {
  const Eigen::Index n = ch.g.rows();
  const int k_users = ch.users();
  std::vector<CVector> gw;
  for (const auto& wj : state.w) gw.push_back(ch.g * wj);

  CMatrix psi = CMatrix::Zero(n, n);
  CVector beta = CVector::Zero(n);
  for (int k = 0; k < k_users; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const Complex g = std::conj(state.u_rx(k));  // receive filter applied to y_k
    const double wk = state.weights(k);
    const double g2 = std::norm(g);
    const CVector hr_conj = ch.h_r[ku].conjugate();
    for (int j = 0; j < k_users; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const CVector c = hr_conj.cwiseProduct(gw[ju]);  // h_k^H w_j = v^H c + d
      const Complex d = ch.h_d[ku].dot(state.w[ju]);
      psi.noalias() += (wk * g2) * (c * c.adjoint());
      beta += (wk * g2 * std::conj(d)) * c;
      if (j == k) beta -= (wk * g) * c;
    }
  }
  QuadraticForm qf;
  qf.phi = -psi;
  qf.b = -beta;
  qf.const_term = 0.0;
  return qf;
}

namespace {

IcsiResult single_user_icsi(const InstantaneousChannels& ch, PhaseResolution resolution, const RVector& alpha,
                            double power, const RVector& noise, const IcsiParams& params,
                            const std::optional<CVector>& v0) {
  const QuadraticForm qf = instantaneous_quadratic_form(ch, 0);
  PddParams pdd = params.pdd;
  pdd.resolution = resolution;
  PddResult solved = pdd_solve(qf, pdd, v0);
  PhaseConfig phases = solved.phases;
  if (params.polish) {
    const BcdResult polished = bcd_solve(qf, resolution, phases.v);
    if (polished.objective > qf.objective(phases.v)) phases = polished.phases;
  }
  IcsiResult out;
  out.phases = phases;
  const CVector h = effective_channel(phases, ch, 0);
  out.precoders = {mrt_precoder(h, power)};
  out.rates = RVector::Constant(1, h.norm() > 0.0 ? mrt_rate(h, power, noise(0)) : 0.0);
  out.objective = alpha(0) * out.rates(0);
  out.round_objectives.push_back(out.objective);
  return out;
}

}  // namespace

IcsiResult icsi_per_slot(const InstantaneousChannels& ch, PhaseResolution resolution, const RVector& alpha,
                         double power, const RVector& noise, const IcsiParams& params,
                         const std::optional<CVector>& v0) {
  if (ch.users() == 1) return single_user_icsi(ch, resolution, alpha, power, noise, params, v0);

  const Eigen::Index n = ch.g.rows();
  CVector v = v0 ? project_discrete(*v0, resolution).v : all_ones_phase(n);
  if (v.size() != n) throw std::invalid_argument("icsi_per_slot: v0 has the wrong length");

  IcsiResult out;
  WmmseState state = wmmse_solve(effective_channels(v, ch), alpha, power, noise, params.wmmse);
  out.round_objectives.push_back(state.objective);
  for (int round = 1; round < params.max_rounds; ++round) {
    const QuadraticForm qf = weighted_mse_form(ch, state);
    v = bcd_solve(qf, resolution, v).phases.v;
    WmmseState next = wmmse_solve(effective_channels(v, ch), alpha, power, noise, params.wmmse, &state.w);
    const double gain = next.objective - state.objective;
    state = std::move(next);
    out.round_objectives.push_back(state.objective);
    if (gain <= params.rel_tol * std::abs(state.objective)) break;
  }
  out.phases = PhaseConfig{v, resolution, AmplitudeMode::unit};
  out.precoders = state.w;
  out.rates = user_rates(effective_channels(v, ch), state.w, noise);
  out.objective = alpha.dot(out.rates);
  return out;
}

PhaseConfig naive_icsi(const InstantaneousChannels& first_slot, PhaseResolution resolution, const RVector& alpha,
                       double power, const RVector& noise, const IcsiParams& params) {
  return icsi_per_slot(first_slot, resolution, alpha, power, noise, params).phases;
}

Precoders mean_channel_precoders(const StatisticalCsi& scsi, const PhaseConfig& phases, const RVector& alpha,
                                 double power, const RVector& noise, const WmmseParams& wmmse) {
  const auto h = effective_channels(phases.v, mean_channels(scsi));
  return short_term_precoding(h, alpha, power, noise, wmmse).w;
}

FrozenDesign single_timescale(const StatisticalCsi& scsi, PhaseResolution resolution, const RVector& alpha,
                              double power, const RVector& noise, const PddParams& pdd, const SscaParams& ssca,
                              std::uint64_t ssca_seed) {
  FrozenDesign out;
  if (scsi.users() == 1) {
    PddParams p = pdd;
    p.resolution = resolution;
    out.phases = pdd_solve(build_quadratic_form(scsi), p).phases;
  } else {
    SscaParams s = ssca;
    s.resolution = resolution;
    out.phases = ssca_run(scsi, alpha, power, noise, s, all_ones_phase(scsi.elements()), ssca_seed).phases;
  }
  out.precoders = mean_channel_precoders(scsi, out.phases, alpha, power, noise, ssca.wmmse);
  return out;
}

}  // namespace irs
