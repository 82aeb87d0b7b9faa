// Command-line front end for the IRS two-timescale simulator.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "irs/config.hpp"
#include "irs/csv.hpp"
#include "irs/experiment.hpp"
#include "irs/rng.hpp"
#include "irs/validation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitExperiment = 2;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool quiet = false;
};

irs::ExperimentSpec load_spec(const std::string& config, const Globals& g) {
  irs::ExperimentSpec spec = config.empty() ? irs::ExperimentSpec{} : irs::load_experiment(config);
  if (config.empty()) {
    spec.schemes = {irs::SchemeKind::tts_pdd, irs::SchemeKind::random_phase, irs::SchemeKind::no_irs};
  }
  irs::apply_env_overrides(spec);
  if (g.seed) spec.seed = *g.seed;
  if (g.threads) spec.threads = *g.threads;
  return spec;
}

// Runs `body` with the output stream bound to `path`, or stdout when empty.
template <typename Body>
void with_output(const std::string& path, Body&& body) {
  if (path.empty()) {
    body(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  body(out);
  if (!out.flush()) throw std::runtime_error("write to '" + path + "' failed");
}

void report(const Globals& g, const std::string& line) {
  if (!g.quiet) std::cerr << line << '\n';
}

int run_records(irs::ExperimentSpec& spec, const std::string& out_path, bool timing, const Globals& g) {
  spec.validate();
  report(g, "running " + std::to_string(spec.sweep.grid.size()) + " sweep point(s) x " + std::to_string(spec.trials) +
                " trial(s) x " + std::to_string(spec.slots) + " slot(s)");
  const auto records = irs::run_experiment(spec);
  with_output(out_path, [&](std::ostream& os) { irs::emit_csv(os, records, timing); });
  return kExitOk;
}

int run_convergence(irs::ExperimentSpec& spec, const std::string& scheme_tag, const std::string& q,
                    const std::string& out_path) {
  const irs::SchemeKind scheme = irs::parse_scheme(scheme_tag);
  const irs::PhaseResolution res = irs::parse_resolution(q);
  const irs::Scenario scenario = irs::apply_sweep(spec.scenario, spec.sweep.variable, spec.sweep.grid.front());
  irs::Rng rng = irs::make_stream(spec.seed, "scsi", {0});
  const irs::StatisticalCsi scsi = irs::build_scsi(scenario, rng);
  switch (scheme) {
    case irs::SchemeKind::tts_pdd: {
      if (scsi.users() != 1) throw irs::ConfigError("tts-pdd traces need a single-user scenario");
      irs::PddParams p = spec.pdd;
      p.resolution = res;
      const auto result = irs::pdd_solve(irs::build_quadratic_form(scsi), p, std::nullopt, true);
      with_output(out_path, [&](std::ostream& os) { irs::write_pdd_trace_csv(os, result.trace); });
      break;
    }
    case irs::SchemeKind::tts_bcd: {
      if (scsi.users() != 1) throw irs::ConfigError("tts-bcd traces need a single-user scenario");
      const auto result = irs::bcd_solve(irs::build_quadratic_form(scsi), res);
      with_output(out_path, [&](std::ostream& os) {
        os << "sweep,objective\n";
        char buf[64];
        for (std::size_t i = 0; i < result.sweep_objectives.size(); ++i) {
          std::snprintf(buf, sizeof buf, "%zu,%.6g\n", i, result.sweep_objectives[i]);
          os << buf;
        }
      });
      break;
    }
    case irs::SchemeKind::tts_ssca: {
      irs::SscaParams p = spec.ssca;
      p.resolution = res;
      const auto result = irs::ssca_run(scsi, spec.alpha(), scenario.transmit_power, scenario.noise_vector(), p,
                                        irs::all_ones_phase(scsi.elements()), irs::derive_seed(spec.seed, "ssca", {0}));
      with_output(out_path, [&](std::ostream& os) { irs::write_ssca_trace_csv(os, result.trace); });
      break;
    }
    default:
      throw irs::ConfigError("convergence traces exist for tts-pdd, tts-bcd and tts-ssca only");
  }
  return kExitOk;
}

int run_validate(irs::ExperimentSpec& spec, bool quiet) {
  spec.validate();
  bool ok = true;
  for (const auto& check : irs::run_self_checks(spec.scenario, spec.seed)) {
    ok = ok && check.passed;
    if (!quiet || !check.passed)
      std::cout << (check.passed ? "PASS " : "FAIL ") << check.name << " (" << check.detail << ")\n";
  }
  return ok ? kExitOk : kExitExperiment;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-timescale IRS beamforming simulator"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed = 0;
  int threads = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Master RNG seed (overrides IRS_SEED and the config)");
  auto* threads_opt =
      app.add_option("--threads", threads, "Worker threads, 0 for all cores (overrides IRS_THREADS)")->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", g.quiet, "Only print errors");

  std::string config;
  std::string out;
  bool timing = false;

  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("--config", config, "YAML experiment file")->required();
  run->add_option("--out", out, "CSV output path (stdout when omitted)");
  run->add_flag("--timing", timing, "Append a wall_time column");

  std::string var;
  std::string grid;
  auto* sweep = app.add_subcommand("sweep", "Run a config over a one-dimensional parameter grid");
  sweep->add_option("--config", config, "YAML experiment file (built-in single-user default when omitted)");
  sweep->add_option("--var", var, "d, rician_beta, r_r, r_ru, r_rk or P")->required();
  sweep->add_option("--grid", grid, "Comma-separated values, e.g. 40,45,50")->required();
  sweep->add_option("--out", out, "CSV output path (stdout when omitted)");
  sweep->add_flag("--timing", timing, "Append a wall_time column");

  auto* validate = app.add_subcommand("validate", "Check a config and run the built-in oracle checks");
  validate->add_option("--config", config, "YAML experiment file (built-in default when omitted)");

  std::string scheme;
  std::string q = "inf";
  auto* convergence = app.add_subcommand("convergence", "Write the per-iteration trace of a long-term optimizer");
  convergence->add_option("--config", config, "YAML experiment file (built-in default when omitted)");
  convergence->add_option("--scheme", scheme, "tts-pdd, tts-bcd or tts-ssca")->required();
  convergence->add_option("--q", q, "Phase resolution in bits, or inf");
  convergence->add_option("--out", out, "CSV output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  if (seed_opt->count() > 0) g.seed = seed;
  if (threads_opt->count() > 0) g.threads = threads;
  spdlog::set_level(g.quiet ? spdlog::level::err : spdlog::level::warn);

  try {
    irs::ExperimentSpec spec = load_spec(config, g);
    if (*run) return run_records(spec, out, timing, g);
    if (*sweep) {
      spec.sweep.variable = irs::parse_sweep_variable(var);
      spec.sweep.grid = irs::parse_grid(grid);
      return run_records(spec, out, timing, g);
    }
    if (*validate) return run_validate(spec, g.quiet);
    if (*convergence) {
      spec.validate();
      return run_convergence(spec, scheme, q, out);
    }
  } catch (const irs::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitExperiment;
  }
  return kExitOk;
}
