#include <benchmark/benchmark.h>

#include <vector>

#include "irs/channel_model.hpp"
#include "irs/config.hpp"
#include "irs/mu_optimizer.hpp"
#include "irs/rng.hpp"
#include "irs/su_optimizer.hpp"

namespace {

using namespace irs;

Scenario scenario_with(int vertical, int users) {
  Scenario s;
  s.irs_vertical = vertical;
  if (users > 1) s.user_positions = semicircle_users(Vec3{0.0, 50.0, 0.0}, 3.0, users);
  s.noise_powers.assign(static_cast<std::size_t>(users), 1e-11);
  s.correlation.r_rk.assign(static_cast<std::size_t>(users), 0.5);
  s.rician = {0.3, 3.0, 3.0};
  return s;
}

StatisticalCsi scsi_for(const Scenario& s) {
  Rng rng = make_stream(1, "bench");
  return build_scsi(s, rng);
}

void BM_PddSolve(benchmark::State& state) {
  const QuadraticForm qf = build_quadratic_form(scsi_for(scenario_with(static_cast<int>(state.range(0)), 1)));
  PddParams p;
  p.resolution = PhaseResolution::bits(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(pdd_solve(qf, p).objective);
}
BENCHMARK(BM_PddSolve)->Args({10, 1})->Args({10, 3})->Args({10, 0})->Args({25, 3})->Unit(benchmark::kMicrosecond);

void BM_BcdSolve(benchmark::State& state) {
  const QuadraticForm qf = build_quadratic_form(scsi_for(scenario_with(static_cast<int>(state.range(0)), 1)));
  const PhaseResolution res = PhaseResolution::bits(3);
  for (auto _ : state) benchmark::DoNotOptimize(bcd_solve(qf, res).objective);
}
BENCHMARK(BM_BcdSolve)->Arg(10)->Arg(25)->Unit(benchmark::kMicrosecond);

void BM_WmmseSolve(benchmark::State& state) {
  const int users = static_cast<int>(state.range(0));
  const Scenario s = scenario_with(10, users);
  const StatisticalCsi scsi = scsi_for(s);
  Rng rng = make_stream(2, "bench-wmmse");
  const InstantaneousChannels ch = sample_instantaneous(scsi, rng);
  const std::vector<CVector> h = effective_channels(all_ones_phase(scsi.elements()), ch);
  const RVector alpha = RVector::Ones(users);
  for (auto _ : state) benchmark::DoNotOptimize(wmmse_solve(h, alpha, s.transmit_power, s.noise_vector()));
}
BENCHMARK(BM_WmmseSolve)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);

void BM_SampleInstantaneous(benchmark::State& state) {
  const StatisticalCsi scsi = scsi_for(scenario_with(10, static_cast<int>(state.range(0))));
  Rng rng = make_stream(3, "bench-sample");
  for (auto _ : state) benchmark::DoNotOptimize(sample_instantaneous(scsi, rng));
}
BENCHMARK(BM_SampleInstantaneous)->Arg(1)->Arg(4)->Unit(benchmark::kMicrosecond);

void BM_SscaIteration(benchmark::State& state) {
  const int users = 4;
  const Scenario s = scenario_with(10, users);
  const StatisticalCsi scsi = scsi_for(s);
  SscaParams p;
  p.max_iters = static_cast<int>(state.range(0));
  p.patience = p.max_iters + 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        ssca_run(scsi, RVector::Ones(users), s.transmit_power, s.noise_vector(), p, all_ones_phase(40), 7));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SscaIteration)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
