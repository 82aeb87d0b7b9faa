#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "irs/channel_model.hpp"
#include "irs/mu_optimizer.hpp"
#include "irs/rng.hpp"
#include "irs/su_optimizer.hpp"

namespace irs {

enum class BaselineKind { random_phase, no_irs, naive_icsi, single_timescale, icsi_per_slot };

std::string_view to_string(BaselineKind kind);
/// Parses the tag form ("random-phase", "no-irs", ...). Throws std::invalid_argument.
BaselineKind parse_baseline(std::string_view tag);

/// Independent uniform draw from the resolution's levels per element.
PhaseConfig random_phase(PhaseResolution resolution, Eigen::Index n, Rng& rng);

/// Rates with the IRS switched off: MRT on h_d for K = 1, WMMSE otherwise.
RVector no_irs_rate(const InstantaneousChannels& ch, const RVector& alpha, double power, const RVector& noise,
                    const WmmseParams& wmmse = {});

struct IcsiParams {
  PddParams pdd;
  WmmseParams wmmse;
  int max_rounds = 30;
  double rel_tol = 1e-4;
  bool polish = true;  // finish the single-user PDD solution with BCD sweeps
};

struct IcsiResult {
  PhaseConfig phases;
  Precoders precoders;
  RVector rates;
  double objective = 0.0;  // weighted sum-rate in bits
  std::vector<double> round_objectives;
};

/// Quadratic form of -sum_k W_k e_k(v) for fixed precoders and MMSE
/// receivers/weights, so that maximizing it minimizes the weighted MSE.
QuadraticForm weighted_mse_form(const InstantaneousChannels& ch, const WmmseState& state);

/// Joint phase and precoder design with perfect instantaneous CSI.
IcsiResult icsi_per_slot(const InstantaneousChannels& ch, PhaseResolution resolution, const RVector& alpha,
                         double power, const RVector& noise, const IcsiParams& params = {},
                         const std::optional<CVector>& v0 = std::nullopt);

/// Phases designed from the first slot only and then reused.
PhaseConfig naive_icsi(const InstantaneousChannels& first_slot, PhaseResolution resolution, const RVector& alpha,
                       double power, const RVector& noise, const IcsiParams& params = {});

struct FrozenDesign {
  PhaseConfig phases;
  Precoders precoders;
};

/// Precoders computed once on the mean effective channels for given phases.
Precoders mean_channel_precoders(const StatisticalCsi& scsi, const PhaseConfig& phases, const RVector& alpha,
                                 double power, const RVector& noise, const WmmseParams& wmmse = {});

/// Phases and precoders both chosen from statistical CSI and kept fixed:
/// PDD on the averaged quadratic form for K = 1, SSCA otherwise.
FrozenDesign single_timescale(const StatisticalCsi& scsi, PhaseResolution resolution, const RVector& alpha,
                              double power, const RVector& noise, const PddParams& pdd, const SscaParams& ssca,
                              std::uint64_t ssca_seed);

}  // namespace irs
