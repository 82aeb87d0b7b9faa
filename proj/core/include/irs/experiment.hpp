#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "irs/baselines.hpp"
#include "irs/channel_model.hpp"
#include "irs/mu_optimizer.hpp"
#include "irs/su_optimizer.hpp"

namespace irs {

/// Raised when too many trials of an experiment fail.
class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SchemeKind {
  tts_pdd,
  tts_bcd,
  tts_ssca,
  random_phase,
  no_irs,
  naive_icsi,
  single_timescale,
  icsi_per_slot,
};

std::string_view to_string(SchemeKind kind);
/// Parses "tts-pdd", "tts-bcd", "tts-ssca" or a baseline tag. Throws ConfigError.
SchemeKind parse_scheme(std::string_view tag);
/// True for schemes whose rate does not depend on the phase resolution.
bool resolution_free(SchemeKind kind);

enum class SweepVariable { none, d, rician_beta, r_r, r_ru, r_rk, power };

std::string_view to_string(SweepVariable var);
/// Accepts "d", "rician_beta", "r_r", "r_ru", "r_rk", "P". Throws ConfigError.
SweepVariable parse_sweep_variable(std::string_view name);

struct Sweep {
  SweepVariable variable = SweepVariable::none;
  std::vector<double> grid{0.0};
};

/// Returns the scenario with the sweep variable set to `value`.
///   d            horizontal AP-user distance along y; the user group is translated
///   rician_beta  AP-IRS and IRS-user Rician factors, in dB
///   r_r          IRS-side correlation of the AP-IRS link
///   r_ru, r_rk   IRS-side correlation of every IRS-user link
///   power        transmit power in dBm
Scenario apply_sweep(const Scenario& base, SweepVariable var, double value);

struct ExperimentSpec {
  Scenario scenario;
  std::vector<SchemeKind> schemes;
  std::vector<PhaseResolution> resolutions{PhaseResolution::bits(1)};
  int slots = 200;
  int trials = 200;
  RVector weights;  // empty selects all ones
  Sweep sweep;
  std::uint64_t seed = 1;
  PddParams pdd;
  SscaParams ssca;
  IcsiParams icsi;
  int threads = 1;
  double max_failure_fraction = 0.05;

  /// Throws ConfigError on an inconsistent spec.
  void validate() const;
  RVector alpha() const;
};

struct ResultRecord {
  double sweep_value = 0.0;
  SchemeKind scheme = SchemeKind::no_irs;
  std::optional<PhaseResolution> resolution;  // empty for resolution-free schemes
  RVector user_rates;                          // averaged over slots and trials
  double weighted_sum_rate = 0.0;
  double std_error = 0.0;  // across trials
  double wall_time = 0.0;  // seconds, summed over trials
  int failed_trials = 0;
  std::vector<double> trial_rates;  // per-trial weighted sum-rate, NaN when failed
};

/// Per-trial, per-design outcome before aggregation.
struct TrialOutcome {
  RVector user_rates;
  double seconds = 0.0;
  bool failed = false;
};

/// Runs one trial of every (scheme, resolution) design at one sweep point.
/// Designs are ordered as in `design_list`.
std::vector<TrialOutcome> run_trial(const ExperimentSpec& spec, const Scenario& scenario, int trial);

struct Design {
  SchemeKind scheme;
  std::optional<PhaseResolution> resolution;
};
std::vector<Design> design_list(const ExperimentSpec& spec);

/// Monte-Carlo experiment over the sweep grid. Records are ordered by sweep
/// value, scheme tag and resolution (continuous last). Results do not depend
/// on the thread count.
std::vector<ResultRecord> run_experiment(const ExperimentSpec& spec);

}  // namespace irs
