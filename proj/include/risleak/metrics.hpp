// SPDX-License-Identifier: Apache-2.0
//
// Link metrics for a candidate RIS configuration: SNR, discretized leakage,
// SLNR, the expected-SLNR lower bound used under partial CSI, and the
// received-power map over the target area.

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "risleak/channel.hpp"
#include "risleak/faulty.hpp"

namespace risleak {

enum class Method { Baseline, Naive, MaxSlnr, Robust };

Method parse_method(const std::string& name);
std::string to_string(Method method);

struct RisConfig {
  VecC v;  // unit-modulus; length N-B, except Baseline which commands all N
  Method origin = Method::Baseline;
};

struct SolverDiagnostics {
  int sdp_iterations = 0;     // summed over all solves of the call
  int bisection_steps = 0;
  double final_gap = 0.0;
  bool feasible = true;
  bool fallback = false;      // randomization had no feasible sample
};

struct MethodResult {
  double snr = 0.0;      // linear
  double slnr = 0.0;     // linear
  double leakage = 0.0;  // linear signal-power units
  RisConfig config;
  SolverDiagnostics diag;
};

// ||v_R^H Hbar_R,t + hb_t^H||^2 for one test point.
double signal_power(const VecC& v_r, const PartitionedChannels& part, int t);

// P * signal_power(ue) / sigma_n^2.
double snr(const VecC& v_r, const PartitionedChannels& part, double tx_power,
           double noise_power);

// Sum of signal_power over every non-UE point.
double leakage(const VecC& v_r, const PartitionedChannels& part);

// signal(ue) / (leakage + sigma_n^2 / P).
double slnr(const VecC& v_r, const PartitionedChannels& part, double noise_power,
            double tx_power);

// Partial-CSI lower bound: reads fault indices only, never fault states:
// (||v_R^H Hr_k||^2 + ||Hb_k||_F^2 / 3) over the matching leakage sum.
double expected_slnr_lower_bound(const VecC& v_r, const PartitionedChannels& part,
                                 double noise_power, double tx_power);

// MRT precoder w = sqrt(P) (v^H Hbar_ue)^H / ||v^H Hbar_ue|| for the full
// N-element configuration.
VecC mrt_precoder(const VecC& v_full, const MatC& Hbar_ue, double tx_power);

struct GridSpec {
  int nx = 60;
  int ny = 60;
};

// Received power |v^H Hbar(p) w|^2 in watts at each cell center of the
// target area, with w aimed at the UE. Each cell draws its own NLoS
// realization; the cell containing the UE reuses the UE's actual channel so
// the map agrees with snr() there. Cells are row-major, x fastest.
struct PowerMap {
  GridSpec grid;
  std::vector<double> power_w;   // nx*ny
  std::vector<double> x_m, y_m;  // cell-center coordinates
};

PowerMap received_power_map(const VecC& v_full, const ScenarioConfig& cfg,
                            const ArrayGeometry& geom, const MatC& G, const VecC& h_ue,
                            const GridSpec& grid, std::uint64_t master_seed,
                            std::uint64_t trial, bool parallel = true);

// Serial reference for the map kernel; testing/benchmark use.
PowerMap received_power_map_serial(const VecC& v_full, const ScenarioConfig& cfg,
                                   const ArrayGeometry& geom, const MatC& G, const VecC& h_ue,
                                   const GridSpec& grid, std::uint64_t master_seed,
                                   std::uint64_t trial);

// Merges an optimized v_R with drawn fault states into the full N-vector.
VecC interleave_configuration(const VecC& v_r, const VecC& v_b,
                              const PartitionedChannels& part);

}  // namespace risleak
