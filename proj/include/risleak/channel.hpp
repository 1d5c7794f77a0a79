// SPDX-License-Identifier: Apache-2.0
//
// Propagation synthesis: steering vectors over explicit element positions,
// distance pathloss, the LoS AP-RIS matrix G, Rician RIS-to-point vectors,
// and the cascaded per-point matrices Hbar_t = diag(h_t^H) G.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "risleak/rng.hpp"
#include "risleak/scenario.hpp"

namespace risleak {

using Vec3 = Eigen::Vector3d;
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;

// Element positions for both arrays, derived once from the scenario.
// The RIS is a vertical planar grid facing the AP/UE midpoint; local axis u
// is horizontal (grid index ix, increasing with +x), v is vertical (iy,
// increasing with +z). The AP is a horizontal ULA broadside to the RIS.
struct ArrayGeometry {
  std::vector<Vec3> ris_elements;  // N, ordered iy*Nx + ix
  std::vector<Vec3> ap_elements;   // M
  Vec3 ris_normal;                 // boresight of the RIS plane
};

ArrayGeometry build_geometry(const ScenarioConfig& cfg);

// entry_n = exp(j (2pi/lambda) <r_n - r_0, direction>); direction must be a
// unit vector (toward the far end of the link). Reduces to the classical ULA
// form for collinear positions with spacing d.
VecC steering_vector(const std::vector<Vec3>& positions, const Vec3& direction,
                     double wavelength);

// zeta0 / distance^exponent; throws on non-positive distance.
double pathloss(double zeta0, double distance, double exponent);

// LoS AP-RIS link: G = sqrt(gamma_i) b(psi_A) a(psi_D)^H, rank 1.
MatC ap_ris_channel(const ScenarioConfig& cfg, const ArrayGeometry& geom);

// Steering vector of the AP toward the RIS (the "a" factor of G).
VecC ap_steering(const ScenarioConfig& cfg, const ArrayGeometry& geom);

// One scattering path: fading entries times the steering vector for its AoD.
struct ScatterPath {
  VecC fading;    // N entries
  Vec3 direction; // unit, departure direction at the RIS
};

// Combines explicit paths: sqrt(gamma_g / P) * sum_p fading_p (*) b(dir_p).
VecC nlos_from_paths(const std::vector<ScatterPath>& paths, double gamma_g,
                     const ArrayGeometry& geom, double wavelength);

// Draws scatter_paths i.i.d. CN(0, I) fading vectors with AoDs uniform over
// the hemisphere in front of the RIS, then combines them.
VecC nlos_component(const ScenarioConfig& cfg, const Vec3& point,
                    const ArrayGeometry& geom, rng::Stream& stream);

// sqrt(K/(1+K)) h_LoS + sqrt(1/(1+K)) h_NLoS; K >= 1e9 short-circuits to the
// pure LoS component.
VecC rician_channel(const ScenarioConfig& cfg, const Vec3& point,
                    const ArrayGeometry& geom, rng::Stream& stream);

// Hbar = diag(h^H) G: row n is conj(h_n) times row n of G.
MatC cascade(const VecC& h, const MatC& G);

// All propagation quantities for one test-point cloud.
struct ChannelSet {
  MatC G;                    // N x M
  VecC ap_steer;             // a(psi_D), M
  std::vector<VecC> h;       // T vectors of length N
  std::vector<MatC> Hbar;    // T matrices N x M
  int ue_index = 0;
};

// Per-point channels drawn from substreams (master, Nlos, trial, point) so
// trials can run in parallel with reproducible draws.
ChannelSet build_channel_set(const ScenarioConfig& cfg, const ArrayGeometry& geom,
                             const TestPointCloud& cloud, std::uint64_t master_seed,
                             std::uint64_t trial);

}  // namespace risleak
