#include "irs/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include <spdlog/spdlog.h>

#include "irs/rng.hpp"

namespace irs {

namespace {

constexpr std::array<std::pair<SchemeKind, std::string_view>, 8> kSchemeTags{{
    {SchemeKind::tts_pdd, "tts-pdd"},
    {SchemeKind::tts_bcd, "tts-bcd"},
    {SchemeKind::tts_ssca, "tts-ssca"},
    {SchemeKind::random_phase, "random-phase"},
    {SchemeKind::no_irs, "no-irs"},
    {SchemeKind::naive_icsi, "naive-icsi"},
    {SchemeKind::single_timescale, "single-timescale"},
    {SchemeKind::icsi_per_slot, "icsi-per-slot"},
}};

constexpr std::array<std::pair<SweepVariable, std::string_view>, 7> kSweepNames{{
    {SweepVariable::none, "none"},
    {SweepVariable::d, "d"},
    {SweepVariable::rician_beta, "rician_beta"},
    {SweepVariable::r_r, "r_r"},
    {SweepVariable::r_ru, "r_ru"},
    {SweepVariable::r_rk, "r_rk"},
    {SweepVariable::power, "P"},
}};

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

std::string_view to_string(SchemeKind kind) {
  for (const auto& [k, tag] : kSchemeTags)
    if (k == kind) return tag;
  return "unknown";
}

SchemeKind parse_scheme(std::string_view tag) {
  for (const auto& [k, t] : kSchemeTags)
    if (t == tag) return k;
  throw ConfigError("unknown scheme '" + std::string(tag) + "'");
}

bool resolution_free(SchemeKind kind) { return kind == SchemeKind::no_irs; }

std::string_view to_string(SweepVariable var) {
  for (const auto& [v, name] : kSweepNames)
    if (v == var) return name;
  return "unknown";
}

SweepVariable parse_sweep_variable(std::string_view name) {
  for (const auto& [v, n] : kSweepNames)
    if (n == name) return v;
  throw ConfigError("unknown sweep variable '" + std::string(name) + "'");
}

Scenario apply_sweep(const Scenario& base, SweepVariable var, double value) {
  Scenario s = base;
  switch (var) {
    case SweepVariable::none:
      break;
    case SweepVariable::d: {
      double centroid = 0.0;
      for (const auto& u : s.user_positions) centroid += u.y();
      centroid /= static_cast<double>(s.user_positions.size());
      const double shift = s.ap_position.y() + value - centroid;
      for (auto& u : s.user_positions) u.y() += shift;
      break;
    }
    case SweepVariable::rician_beta:
      s.rician.beta_ai = db_to_linear(value);
      s.rician.beta_iu = db_to_linear(value);
      break;
    case SweepVariable::r_r:
      s.correlation.r_r = value;
      break;
    case SweepVariable::r_ru:
    case SweepVariable::r_rk:
      std::fill(s.correlation.r_rk.begin(), s.correlation.r_rk.end(), value);
      break;
    case SweepVariable::power:
      s.transmit_power = db_to_linear(value - 30.0);
      break;
  }
  return s;
}

void ExperimentSpec::validate() const {
  try {
    scenario.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  if (schemes.empty()) throw ConfigError("experiment: at least one scheme is required");
  if (slots < 1) throw ConfigError("experiment: slots must be >= 1");
  if (trials < 1) throw ConfigError("experiment: trials must be >= 1");
  if (sweep.grid.empty()) throw ConfigError("experiment: sweep grid must not be empty");
  if (threads < 0) throw ConfigError("experiment: threads must be >= 0");
  if (weights.size() != 0 && weights.size() != scenario.users())
    throw ConfigError("experiment: one weight per user is required");
  for (Eigen::Index k = 0; k < weights.size(); ++k)
    if (!(weights(k) >= 0.0)) throw ConfigError("experiment: weights must be >= 0");
  bool needs_resolution = false;
  for (auto s : schemes) {
    needs_resolution = needs_resolution || !resolution_free(s);
    if ((s == SchemeKind::tts_pdd || s == SchemeKind::tts_bcd) && scenario.users() != 1)
      throw ConfigError(std::string(to_string(s)) + " is a single-user scheme; use tts-ssca for K > 1");
  }
  if (needs_resolution && resolutions.empty()) throw ConfigError("experiment: at least one resolution is required");
  try {
    pdd.validate();
    ssca.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

RVector ExperimentSpec::alpha() const {
  return weights.size() == 0 ? RVector(RVector::Ones(scenario.users())) : weights;
}

std::vector<Design> design_list(const ExperimentSpec& spec) {
  std::vector<Design> out;
  for (auto s : spec.schemes) {
    if (resolution_free(s)) {
      out.push_back({s, std::nullopt});
      continue;
    }
    for (const auto& r : spec.resolutions) out.push_back({s, r});
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

struct PreparedDesign {
  PhaseConfig phases;
  Precoders frozen;
  bool ready = false;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::vector<TrialOutcome> run_trial(const ExperimentSpec& spec, const Scenario& scenario, int trial) {
  const auto designs = design_list(spec);
  const auto trial_index = static_cast<std::uint64_t>(trial);
  const RVector alpha = spec.alpha();
  const RVector noise = scenario.noise_vector();
  const double power = scenario.transmit_power;
  const int k_users = scenario.users();
  const Eigen::Index n = scenario.irs_elements();

  std::vector<TrialOutcome> out(designs.size());
  for (auto& o : out) o.user_rates = RVector::Zero(k_users);

  Rng scsi_rng = make_stream(spec.seed, "scsi", {trial_index});
  const StatisticalCsi scsi = build_scsi(scenario, scsi_rng);
  const std::uint64_t ssca_seed = derive_seed(spec.seed, "ssca", {trial_index});

  // Long-term phase designs shared between schemes, keyed by (scheme, levels).
  std::map<std::pair<int, int>, PhaseConfig> cache;
  std::optional<QuadraticForm> averaged_form;
  auto tts_phases = [&](SchemeKind kind, PhaseResolution res) -> const PhaseConfig& {
    const auto key = std::make_pair(static_cast<int>(kind), res.level_count());
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    PhaseConfig phases;
    if (kind == SchemeKind::tts_ssca) {
      SscaParams p = spec.ssca;
      p.resolution = res;
      phases = ssca_run(scsi, alpha, power, noise, p, all_ones_phase(n), ssca_seed).phases;
    } else {
      if (!averaged_form) averaged_form = build_quadratic_form(scsi);
      if (kind == SchemeKind::tts_bcd) {
        phases = bcd_solve(*averaged_form, res).phases;
      } else {
        PddParams p = spec.pdd;
        p.resolution = res;
        phases = pdd_solve(*averaged_form, p).phases;
      }
    }
    return cache.emplace(key, std::move(phases)).first->second;
  };

  std::vector<PreparedDesign> prepared(designs.size());
  auto fail = [&](std::size_t i, const std::exception& e) {
    if (!out[i].failed)
      spdlog::warn("trial {} scheme {}: {}", trial, to_string(designs[i].scheme), e.what());
    out[i].failed = true;
  };

  for (std::size_t i = 0; i < designs.size(); ++i) {
    const auto start = Clock::now();
    try {
      const auto& d = designs[i];
      auto& p = prepared[i];
      switch (d.scheme) {
        case SchemeKind::tts_pdd:
        case SchemeKind::tts_bcd:
        case SchemeKind::tts_ssca:
          p.phases = tts_phases(d.scheme, *d.resolution);
          break;
        case SchemeKind::single_timescale: {
          const SchemeKind base = k_users == 1 ? SchemeKind::tts_pdd : SchemeKind::tts_ssca;
          p.phases = tts_phases(base, *d.resolution);
          p.frozen = mean_channel_precoders(scsi, p.phases, alpha, power, noise, spec.ssca.wmmse);
          break;
        }
        default:
          break;
      }
      p.ready = true;
    } catch (const std::exception& e) {
      fail(i, e);
    }
    out[i].seconds += seconds_since(start);
  }

  for (int slot = 0; slot < spec.slots; ++slot) {
    Rng sample_rng = make_stream(spec.seed, "samples", {trial_index, static_cast<std::uint64_t>(slot)});
    const InstantaneousChannels ch = sample_instantaneous(scsi, sample_rng);
    for (std::size_t i = 0; i < designs.size(); ++i) {
      if (out[i].failed) continue;
      const auto start = Clock::now();
      try {
        const auto& d = designs[i];
        auto& p = prepared[i];
        RVector rates;
        switch (d.scheme) {
          case SchemeKind::tts_pdd:
          case SchemeKind::tts_bcd:
          case SchemeKind::tts_ssca: {
            const auto h = effective_channels(p.phases.v, ch);
            rates = user_rates(h, short_term_precoding(h, alpha, power, noise, spec.icsi.wmmse).w, noise);
            break;
          }
          case SchemeKind::single_timescale:
            rates = user_rates(effective_channels(p.phases.v, ch), p.frozen, noise);
            break;
          case SchemeKind::random_phase: {
            Rng phase_rng = make_stream(spec.seed, "random-phase", {trial_index, static_cast<std::uint64_t>(slot)});
            const PhaseConfig phases = random_phase(*d.resolution, n, phase_rng);
            const auto h = effective_channels(phases.v, ch);
            rates = user_rates(h, short_term_precoding(h, alpha, power, noise, spec.icsi.wmmse).w, noise);
            break;
          }
          case SchemeKind::no_irs:
            rates = no_irs_rate(ch, alpha, power, noise, spec.icsi.wmmse);
            break;
          case SchemeKind::naive_icsi:
            if (slot == 0) {
              const IcsiResult r = icsi_per_slot(ch, *d.resolution, alpha, power, noise, spec.icsi);
              p.phases = r.phases;
              rates = r.rates;
            } else {
              const auto h = effective_channels(p.phases.v, ch);
              rates = user_rates(h, short_term_precoding(h, alpha, power, noise, spec.icsi.wmmse).w, noise);
            }
            break;
          case SchemeKind::icsi_per_slot:
            rates = icsi_per_slot(ch, *d.resolution, alpha, power, noise, spec.icsi).rates;
            break;
        }
        if (!rates.allFinite()) throw NumericalError("non-finite rate");
        out[i].user_rates += rates;
      } catch (const std::exception& e) {
        fail(i, e);
      }
      out[i].seconds += seconds_since(start);
    }
  }
  for (auto& o : out) o.user_rates /= static_cast<double>(spec.slots);
  return out;
}

namespace {

// Sort key: scheme tag, then resolution with continuous last and
// resolution-free schemes first.
std::pair<std::string_view, long long> record_key(const ResultRecord& r) {
  long long q = -1;
  if (r.resolution) q = r.resolution->is_continuous() ? std::numeric_limits<long long>::max() : r.resolution->level_count();
  return {to_string(r.scheme), q};
}

}  // namespace

std::vector<ResultRecord> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const auto designs = design_list(spec);
  const auto points = spec.sweep.grid.size();
  const auto trials = static_cast<std::size_t>(spec.trials);
  const RVector alpha = spec.alpha();

  std::vector<Scenario> scenarios;
  for (double value : spec.sweep.grid) {
    scenarios.push_back(apply_sweep(spec.scenario, spec.sweep.variable, value));
    try {
      scenarios.back().validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("sweep point: ") + e.what());
    }
  }

  std::vector<std::vector<TrialOutcome>> results(points * trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < results.size(); task = next++) {
      const std::size_t point = task / trials;
      const int trial = static_cast<int>(task % trials);
      try {
        results[task] = run_trial(spec, scenarios[point], trial);
      } catch (const std::exception& e) {
        spdlog::warn("trial {} at sweep point {}: {}", trial, spec.sweep.grid[point], e.what());
        results[task].assign(designs.size(), TrialOutcome{RVector::Zero(spec.scenario.users()), 0.0, true});
      }
    }
  };
  std::size_t threads = spec.threads > 0 ? static_cast<std::size_t>(spec.threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, results.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<ResultRecord> records;
  for (std::size_t point = 0; point < points; ++point) {
    for (std::size_t i = 0; i < designs.size(); ++i) {
      ResultRecord rec;
      rec.sweep_value = spec.sweep.grid[point];
      rec.scheme = designs[i].scheme;
      rec.resolution = designs[i].resolution;
      rec.user_rates = RVector::Zero(spec.scenario.users());
      int ok = 0;
      double sum = 0.0;
      for (std::size_t t = 0; t < trials; ++t) {
        const TrialOutcome& o = results[point * trials + t][i];
        rec.wall_time += o.seconds;
        if (o.failed) {
          ++rec.failed_trials;
          rec.trial_rates.push_back(std::numeric_limits<double>::quiet_NaN());
          continue;
        }
        ++ok;
        rec.user_rates += o.user_rates;
        const double w = alpha.dot(o.user_rates);
        rec.trial_rates.push_back(w);
        sum += w;
      }
      if (static_cast<double>(rec.failed_trials) > spec.max_failure_fraction * static_cast<double>(trials))
        throw ExperimentError(std::string(to_string(rec.scheme)) + ": " + std::to_string(rec.failed_trials) + " of " +
                              std::to_string(trials) + " trials failed");
      if (ok > 0) {
        rec.user_rates /= ok;
        rec.weighted_sum_rate = sum / ok;
      }
      if (ok > 1) {
        double ss = 0.0;
        for (double w : rec.trial_rates)
          if (!std::isnan(w)) ss += (w - rec.weighted_sum_rate) * (w - rec.weighted_sum_rate);
        rec.std_error = std::sqrt(ss / (ok - 1)) / std::sqrt(static_cast<double>(ok));
      }
      records.push_back(std::move(rec));
    }
  }
  std::stable_sort(records.begin(), records.end(), [](const ResultRecord& a, const ResultRecord& b) {
    if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
    return record_key(a) < record_key(b);
  });
  return records;
}

}  // namespace irs
