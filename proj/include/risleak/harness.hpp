// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo experiment driver: the fault-count sweep, the received-power
// heatmap, and the fault-pattern study. Trials are independent work units;
// all methods inside a trial consume identical channel, fault and test-point
// draws, and aggregation is an ordered reduction so results do not depend on
// the worker count.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "risleak/optimizers.hpp"

namespace risleak {

inline constexpr const char* kVersion = "0.1.0";

constexpr std::array<Method, 4> kAllMethods{Method::Baseline, Method::Naive, Method::MaxSlnr,
                                            Method::Robust};

struct SweepSpec {
  std::vector<int> fault_counts{0, 5, 10, 15, 20, 25};
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  int trials = 50;
  FaultPattern pattern = FaultPattern::Uniform;
};

struct MethodTrial {
  bool failed = false;
  std::string error;
  double snr = 0.0;      // linear, realized with the true fault states
  double slnr = 0.0;
  double leakage = 0.0;
  double robust_bound = 0.0;  // partial-CSI expected-SLNR bound (robust only)
  int sdp_iterations = 0;
  int bisection_steps = 0;
  bool fallback = false;
};

struct TrialRecord {
  int fault_count = 0;
  std::string pattern;
  int trial = 0;
  Method method = Method::Baseline;
  MethodTrial out;
  std::uint64_t draw_checksum = 0;  // identical across methods within a trial
};

struct AggregateRecord {
  int fault_count = 0;
  std::string pattern;
  Method method = Method::Baseline;
  double mean_slnr_db = 0.0;  // dB of the linear mean
  double std_slnr_db = 0.0;   // std of the per-trial dB values
  double mean_snr_db = 0.0;
  double std_snr_db = 0.0;
  double mean_slnr = 0.0;  // linear mean, convenience for ratio checks
  double mean_snr = 0.0;
  double mean_robust_bound = 0.0;  // linear mean of the partial-CSI objective
  double mean_iterations = 0.0;
  double fallback_rate = 0.0;
  int trials = 0;
  int failures = 0;
};

struct SweepResult {
  std::vector<AggregateRecord> aggregates;
  std::vector<TrialRecord> trials;
};

// Runs every (fault count, trial) cell of the sweep; `jobs` <= 1 runs the
// serial reference path, otherwise cells execute on an OpenMP pool.
SweepResult run_sweep(const ScenarioConfig& cfg, const SweepSpec& spec, int jobs);

// One trial of every requested method on shared draws. Exposed for tests.
std::vector<TrialRecord> run_single_trial(const ScenarioConfig& cfg, const ArrayGeometry& geom,
                                          FaultPattern pattern, int fault_count, int trial,
                                          const std::vector<Method>& methods);

struct HeatmapResult {
  PowerMap map;
  std::vector<std::vector<int>> mask;  // [ix][iy]
  MethodTrial diag;
  double ue_cell_power_w = 0.0;
  VecC v_full;
};

// Received-power map for one method at fault count B. Single realization
// (trial 0 of the configured seed) by default; `average` > 1 averages that
// many independent realizations cell by cell in watts.
HeatmapResult run_heatmap(const ScenarioConfig& cfg, Method method, int fault_count,
                          const GridSpec& grid, FaultPattern pattern = FaultPattern::Uniform,
                          bool parallel = true, int average = 1);

// Fig.-style pattern study: all four patterns at the quarter fault count.
SweepResult run_pattern_study(const ScenarioConfig& cfg, int trials, int jobs);

// CSV/metadata emission. Numeric formatting is fixed so identical results
// give identical bytes.
void write_sweep_csv(const std::string& path, const std::vector<AggregateRecord>& records,
                     bool pattern_keyed = false);
void write_trials_csv(const std::string& path, const std::vector<TrialRecord>& records);
void write_heatmap_csv(const std::string& path, const PowerMap& map);
void write_mask_csv(const std::string& path, const std::vector<std::vector<int>>& mask);
void write_metadata(const std::string& path, const ScenarioConfig& cfg,
                    const std::string& command, int jobs,
                    const std::vector<std::string>& outputs);

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed = 1469598103934665603ull);

}  // namespace risleak
