#include <cmath>
#include <limits>

#include "irs/mu_optimizer.hpp"
#include "irs/su_optimizer.hpp"

namespace irs {

RateEvaluation instantaneous_rates(const CVector& v, const Precoders& w, const InstantaneousChannels& ch,
                                   const RVector& noise) {
  const int k_users = ch.users();
  if (static_cast<int>(w.size()) != k_users) throw std::invalid_argument("instantaneous_rates: one precoder per user");
  if (noise.size() != k_users) throw std::invalid_argument("instantaneous_rates: one noise power per user");

  std::vector<CVector> gw;
  gw.reserve(w.size());
  for (const auto& wj : w) gw.push_back(ch.g * wj);

  RateEvaluation out;
  out.rates.resize(k_users);
  out.partials.gamma.resize(k_users);
  out.partials.gamma_minus.resize(k_users);
  const Eigen::Index n = ch.g.rows();
  for (int k = 0; k < k_users; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const CVector hk = effective_channel(v, ch, k);
    const CVector hr_conj = ch.h_r[ku].conjugate();
    double gamma_minus = noise(k);
    double signal = 0.0;
    CVector a = CVector::Zero(n);
    CVector a_minus = CVector::Zero(n);
    for (int j = 0; j < k_users; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const Complex x = hk.dot(w[ju]);  // h_k^H w_j
      const CVector term = hr_conj.cwiseProduct(gw[ju]) * std::conj(x);
      a += term;
      if (j == k) {
        signal = std::norm(x);
      } else {
        gamma_minus += std::norm(x);
        a_minus += term;
      }
    }
    const double gamma = gamma_minus + signal;
    out.rates(k) = std::log2(gamma / gamma_minus);
    out.partials.gamma(k) = gamma;
    out.partials.gamma_minus(k) = gamma_minus;
    out.partials.a.push_back(std::move(a));
    out.partials.a_minus.push_back(std::move(a_minus));
  }
  return out;
}

CMatrix rate_jacobian(const RatePartials& partials) {
  const auto k_users = static_cast<Eigen::Index>(partials.a.size());
  if (k_users == 0) return {};
  const Eigen::Index n = partials.a.front().size();
  CMatrix jac(n, k_users);
  for (Eigen::Index k = 0; k < k_users; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    jac.col(k) = (partials.a[ku] / partials.gamma(k) - partials.a_minus[ku] / partials.gamma_minus(k)) / kLn2;
  }
  return jac;
}

CMatrix rate_jacobian(const CVector& v, const Precoders& w, const InstantaneousChannels& ch, const RVector& noise) {
  return rate_jacobian(instantaneous_rates(v, w, ch, noise).partials);
}

RVector user_rates(std::span<const CVector> h, const Precoders& w, const RVector& noise) {
  RVector rates(static_cast<Eigen::Index>(h.size()));
  for (std::size_t k = 0; k < h.size(); ++k) {
    double interference = noise(static_cast<Eigen::Index>(k));
    double signal = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double p = std::norm(h[k].dot(w[j]));
      if (j == k) signal = p; else interference += p;
    }
    rates(static_cast<Eigen::Index>(k)) = std::log2(1.0 + signal / interference);
  }
  return rates;
}

double weighted_sum_rate(std::span<const CVector> h, const Precoders& w, const RVector& alpha, const RVector& noise) {
  return alpha.dot(user_rates(h, w, noise));
}

Precoders mrt_equal_power(std::span<const CVector> h, double power) {
  Precoders w;
  w.reserve(h.size());
  const double per_user = h.empty() ? 0.0 : power / static_cast<double>(h.size());
  for (const auto& hk : h) {
    const double norm = hk.norm();
    w.push_back(norm > 0.0 ? CVector((std::sqrt(per_user) / norm) * hk) : CVector(CVector::Zero(hk.size())));
  }
  return w;
}

namespace {

double total_power(const Precoders& w) {
  double p = 0.0;
  for (const auto& wk : w) p += wk.squaredNorm();
  return p;
}

// Solves w_k = (A + mu I)^{-1} rhs_k with the smallest mu >= 0 meeting the
// power budget, found by bisection on the eigenbasis of A.
Precoders regularized_solve(const CMatrix& a, const CMatrix& rhs, double power, double tol, double& mu_out) {
  const Eigen::Index m = a.rows();
  const Eigen::Index k_users = rhs.cols();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(a);
  const RVector lambda = eig.eigenvalues().cwiseMax(0.0);
  const CMatrix& q = eig.eigenvectors();
  const CMatrix c = q.adjoint() * rhs;
  const RVector row_power = c.cwiseAbs2().rowwise().sum();
  const double total = row_power.sum();

  Precoders w(static_cast<std::size_t>(k_users), CVector::Zero(m));
  mu_out = 0.0;
  if (total == 0.0) return w;

  const double lmax = lambda.maxCoeff();
  const double null_tol = 1e-12 * std::max(lmax, std::numeric_limits<double>::min());
  const double rhs_tol = 1e-24 * total;
  auto power_at = [&](double mu) {
    double p = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double denom = lambda(i) + mu;
      if (denom <= null_tol) {
        if (row_power(i) > rhs_tol) return std::numeric_limits<double>::infinity();
        continue;
      }
      p += row_power(i) / (denom * denom);
    }
    return p;
  };

  double mu = 0.0;
  if (!(power_at(0.0) <= power)) {
    double lo = 0.0;
    double hi = std::sqrt(total / power);  // p(hi) <= total / hi^2 = P
    for (int it = 0; it < 400; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (power_at(mid) > power) lo = mid; else hi = mid;
      if (power - power_at(hi) <= tol * power || hi - lo <= 1e-16 * hi) break;
    }
    mu = hi;
  }
  mu_out = mu;

  CMatrix scaled = c;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double denom = lambda(i) + mu;
    scaled.row(i) *= (denom <= null_tol) ? 0.0 : 1.0 / denom;
  }
  const CMatrix sol = q * scaled;
  for (Eigen::Index k = 0; k < k_users; ++k) w[static_cast<std::size_t>(k)] = sol.col(k);
  return w;
}

void fill_receivers(std::span<const CVector> h, const Precoders& w, const RVector& alpha, const RVector& noise,
                    WmmseState& state) {
  const auto k_users = static_cast<Eigen::Index>(h.size());
  state.u_rx.resize(k_users);
  state.mse.resize(k_users);
  state.weights.resize(k_users);
  for (Eigen::Index k = 0; k < k_users; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    double interference = noise(k);
    Complex x{0.0, 0.0};
    for (std::size_t j = 0; j < w.size(); ++j) {
      const Complex y = h[ku].dot(w[j]);
      if (j == ku) x = y; else interference += std::norm(y);
    }
    const double gamma = interference + std::norm(x);
    state.u_rx(k) = x / gamma;
    state.mse(k) = interference / gamma;  // 1 - |x|^2 / Gamma
    state.weights(k) = alpha(k) / state.mse(k);
  }
}

}  // namespace

WmmseState wmmse_solve(std::span<const CVector> h, const RVector& alpha, double power, const RVector& noise,
                       const WmmseParams& params, const Precoders* warm_start) {
  const auto k_users = static_cast<Eigen::Index>(h.size());
  if (k_users == 0) throw std::invalid_argument("wmmse_solve: no users");
  if (alpha.size() != k_users || noise.size() != k_users)
    throw std::invalid_argument("wmmse_solve: alpha and noise need one entry per user");
  const Eigen::Index m = h.front().size();

  WmmseState state;
  bool all_zero = true;
  for (const auto& hk : h) all_zero = all_zero && hk.squaredNorm() == 0.0;
  if (power <= 0.0 || all_zero) {
    state.w.assign(static_cast<std::size_t>(k_users), CVector::Zero(m));
    fill_receivers(h, state.w, alpha, noise, state);
    state.objective = 0.0;
    state.objective_trace.push_back(0.0);
    return state;
  }

  if (warm_start && static_cast<Eigen::Index>(warm_start->size()) == k_users) {
    state.w = *warm_start;
    const double p = total_power(state.w);
    if (p > power) for (auto& wk : state.w) wk *= std::sqrt(power / p);
    if (p == 0.0) state.w = mrt_equal_power(h, power);
  } else {
    state.w = mrt_equal_power(h, power);
  }

  double obj = weighted_sum_rate(h, state.w, alpha, noise);
  state.objective_trace.push_back(obj);
  for (int it = 1; it <= params.max_iters; ++it) {
    fill_receivers(h, state.w, alpha, noise, state);
    CMatrix a = CMatrix::Zero(m, m);
    CMatrix rhs(m, k_users);
    for (Eigen::Index k = 0; k < k_users; ++k) {
      const auto& hk = h[static_cast<std::size_t>(k)];
      a += (state.weights(k) * std::norm(state.u_rx(k))) * (hk * hk.adjoint());
      rhs.col(k) = (state.weights(k) * state.u_rx(k)) * hk;
    }
    state.w = regularized_solve(a, rhs, power, params.power_tol, state.mu);
    const double next = weighted_sum_rate(h, state.w, alpha, noise);
    state.objective_trace.push_back(next);
    state.iterations = it;
    const bool done = next - obj <= params.rel_tol * std::abs(next);
    obj = next;
    if (done) break;
  }
  fill_receivers(h, state.w, alpha, noise, state);
  state.objective = obj;
  return state;
}

WmmseState short_term_precoding(std::span<const CVector> h, const RVector& alpha, double power,
                                const RVector& noise, const WmmseParams& params, const Precoders* warm_start) {
  if (h.size() != 1) return wmmse_solve(h, alpha, power, noise, params, warm_start);
  WmmseState state;
  state.w = {h[0].norm() > 0.0 ? CVector((std::sqrt(std::max(power, 0.0)) / h[0].norm()) * h[0])
                               : CVector(CVector::Zero(h[0].size()))};
  fill_receivers(h, state.w, alpha, noise, state);
  state.objective = alpha(0) * mrt_rate(h[0], std::max(power, 0.0), noise(0));
  if (h[0].norm() == 0.0) state.objective = 0.0;
  state.objective_trace.push_back(state.objective);
  return state;
}

}  // namespace irs
