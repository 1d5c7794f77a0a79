// SPDX-License-Identifier: Apache-2.0
//
// Serial vs OpenMP timings for the data-parallel kernels: randomization
// candidate scoring and the received-power map.

#include <benchmark/benchmark.h>

#include "risleak/harness.hpp"

namespace {

using namespace risleak;

ScenarioConfig bench_cfg() {
  ScenarioConfig cfg;
  cfg.ris_nx = 10;
  cfg.ris_ny = 10;
  cfg.ap_antennas = 16;
  cfg.test_points = 125;
  cfg.reference_loss = 1.0;
  cfg.finalize();
  return cfg;
}

struct MapFixture {
  ScenarioConfig cfg = bench_cfg();
  ArrayGeometry geom = build_geometry(cfg);
  TestPointCloud cloud;
  ChannelSet channels;
  VecC v;

  MapFixture() {
    rng::Stream tp(1, rng::StreamTag::TestPoints, 0);
    cloud = sample_test_points(cfg, tp);
    channels = build_channel_set(cfg, geom, cloud, 1, 0);
    rng::Stream rs(2, rng::StreamTag::Generic, 0);
    v.resize(cfg.ris_elements());
    for (Eigen::Index i = 0; i < v.size(); ++i)
      v(i) = std::exp(std::complex<double>(0, rs.uniform(0, 6.283185307)));
  }
};

void bm_power_map_serial(benchmark::State& state) {
  const MapFixture fix;
  GridSpec grid;
  grid.nx = grid.ny = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const PowerMap map = received_power_map_serial(
        fix.v, fix.cfg, fix.geom, fix.channels.G,
        fix.channels.h[static_cast<std::size_t>(fix.cloud.ue_index)], grid, 1, 0);
    benchmark::DoNotOptimize(map.power_w.data());
  }
}

void bm_power_map_omp(benchmark::State& state) {
  const MapFixture fix;
  GridSpec grid;
  grid.nx = grid.ny = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const PowerMap map = received_power_map(
        fix.v, fix.cfg, fix.geom, fix.channels.G,
        fix.channels.h[static_cast<std::size_t>(fix.cloud.ue_index)], grid, 1, 0, true);
    benchmark::DoNotOptimize(map.power_w.data());
  }
}

struct CandidateFixture {
  ScenarioConfig cfg = bench_cfg();
  PartitionedChannels part;
  MatC V;

  CandidateFixture() {
    const ArrayGeometry geom = build_geometry(cfg);
    rng::Stream tp(1, rng::StreamTag::TestPoints, 0);
    const TestPointCloud cloud = sample_test_points(cfg, tp);
    const ChannelSet channels = build_channel_set(cfg, geom, cloud, 1, 0);
    rng::Stream fi(1, rng::StreamTag::FaultIndices, 0);
    FaultRealization fault;
    fault.indices = sample_fault_indices(FaultPattern::Uniform, 10, cfg.ris_nx, cfg.ris_ny,
                                         cfg.pattern_padding, fi);
    rng::Stream fs(1, rng::StreamTag::FaultStates, 0);
    fault.states = sample_fault_states(10, fs);
    part = partition(channels, fault);
    const VecC u = VecC::Ones(part.lifted_dim());
    V = 0.5 * MatC::Identity(part.lifted_dim(), part.lifted_dim()) + 0.5 * u * u.adjoint();
  }
};

void run_randomization(const CandidateFixture& fix, int samples, bool parallel) {
  auto evaluate = [&](const VecC& vhat) {
    return CandidateScore{surrogate_slnr(vhat, fix.part, 0.0, 0.0, 1e-3), true};
  };
  rng::Stream stream(9, rng::StreamTag::Randomization, 0, 0);
  auto out = gaussian_randomization(fix.V, evaluate, samples, stream, parallel);
  benchmark::DoNotOptimize(out.second.best_objective);
}

void bm_candidates_serial(benchmark::State& state) {
  const CandidateFixture fix;
  for (auto _ : state) run_randomization(fix, static_cast<int>(state.range(0)), false);
}

void bm_candidates_omp(benchmark::State& state) {
  const CandidateFixture fix;
  for (auto _ : state) run_randomization(fix, static_cast<int>(state.range(0)), true);
}

BENCHMARK(bm_power_map_serial)->Arg(60)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_power_map_omp)->Arg(60)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_candidates_serial)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_candidates_omp)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
