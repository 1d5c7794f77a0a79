// SPDX-License-Identifier: Apache-2.0
//
// Scenario configuration and test-point cloud generation. Holds geometry,
// array sizes, RF parameters and Monte Carlo controls, loads/saves them from
// a plain-text key=value format, and samples the leakage test points.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "risleak/rng.hpp"

namespace risleak {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

enum class GammaMode { PerTrial, Fixed };

// How structured fault patterns interpret the "25%" cases on a grid whose
// rows/columns do not divide evenly: pad from the adjacent row/column to the
// exact quarter count, or keep the literal two-row/two-column set.
enum class PatternPadding { PadToQuarter, Exact };

struct ScenarioConfig {
  // Geometry (meters).
  Eigen::Vector3d ap_position{0.0, 0.0, 10.0};
  Eigen::Vector3d ris_position{10.0, 34.0, 10.0};
  Eigen::Vector3d ue_position{16.0, 16.0, 0.0};

  // Arrays.
  int ap_antennas = 16;     // M
  int ris_nx = 10;          // grid columns (along +x)
  int ris_ny = 10;          // grid rows (along +z, vertical)
  double wavelength_m = 0.01;
  double element_spacing_m = 0.005;  // defaults to lambda/2
  double ap_spacing_m = 0.005;

  // RF.
  double tx_power_w = dbm_to_watts(12.0);
  double noise_power_w = dbm_to_watts(-80.0);
  double rician_k = 10.0;  // linear
  int scatter_paths = 10;  // P_K
  double pathloss_exp_ap_ris = 2.0;
  double pathloss_exp_ris_ue = 2.0;
  double reference_loss = 0.0;  // zeta_0; 0 = derive Friis (lambda/4pi)^2 on load

  // Leakage area / test points.
  double area_side_x_m = 30.0;
  double area_side_y_m = 30.0;
  int test_points = 125;  // T, including the UE
  double exclusion_radius_m = 1.0;

  // Optimization controls.
  double snr_divisor = 1.5;  // rho_gamma
  GammaMode gamma_mode = GammaMode::PerTrial;
  double gamma_fixed_snr_db = 0.0;  // used when gamma_mode == Fixed
  int randomization_samples = 500;  // L
  double bisection_tol = 1e-3;      // delta_bis, relative
  double gamma_feas_slack = 0.02;   // eps_gamma

  // Solver tolerances.
  double solver_gap_tol = 1e-6;
  double solver_feas_tol = 1e-7;  // eps_psd and eps_eq
  int solver_max_iters = 120;

  // Monte Carlo.
  int trials = 50;
  std::uint64_t seed = 1;
  PatternPadding pattern_padding = PatternPadding::PadToQuarter;

  int ris_elements() const { return ris_nx * ris_ny; }

  // Fills derived defaults (spacing from wavelength, Friis reference loss)
  // and checks invariants; throws std::invalid_argument naming the bad key.
  void finalize();
};

struct TestPointCloud {
  std::vector<Eigen::Vector3d> positions;  // size T, ground plane z = 0
  int ue_index = 0;                        // index k of the intended UE
};

// Parses the key=value config format. Unknown keys are an error; missing
// keys keep their defaults. Keys with a _db/_dbm suffix are converted.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& text, const std::string& origin);

// Applies a single "key=value" override string to an existing config.
void apply_override(ScenarioConfig& cfg, const std::string& assignment);

// Serializes the resolved config; reloading the result round-trips exactly.
std::string dump_config(const ScenarioConfig& cfg);

// T-1 points uniform over the area rectangle centered on the UE, each at
// least exclusion_radius_m away from it (rejection sampling), plus the UE
// inserted at the cloud's ue_index. Deterministic given the stream.
TestPointCloud sample_test_points(const ScenarioConfig& cfg, rng::Stream& stream);

}  // namespace risleak
