// SPDX-License-Identifier: Apache-2.0
//
// The four RIS configuration strategies: the closed-form baseline, max-SNR
// via semidefinite relaxation, max-SLNR via bisection over SDP feasibility
// subproblems, and the partial-CSI robust variant, plus the shared Gaussian
// randomization extraction and the gamma threshold rule.

#pragma once

#include <functional>
#include <utility>

#include "risleak/faulty.hpp"
#include "risleak/metrics.hpp"
#include "risleak/sdp.hpp"

namespace risleak {

struct OptimizerSettings {
  sdp::SdpOptions sdp;
  int randomization_samples = 500;
  double bisection_tol = 1e-3;   // relative bracket width
  double gamma_feas_slack = 0.02;  // candidates pass if signal >= gamma*(1-slack)
  bool parallel_candidates = false;

  static OptimizerSettings from_config(const ScenarioConfig& cfg) {
    OptimizerSettings s;
    s.sdp.gap_tol = cfg.solver_gap_tol;
    s.sdp.feas_tol = cfg.solver_feas_tol;
    s.sdp.max_iters = cfg.solver_max_iters;
    s.randomization_samples = cfg.randomization_samples;
    s.bisection_tol = cfg.bisection_tol;
    s.gamma_feas_slack = cfg.gamma_feas_slack;
    return s;
  }
};

struct BisectionState {
  double lo = 0.0;  // highest beta proven feasible
  double hi = 0.0;  // lowest beta proven (or bounded) infeasible
  double tol = 1e-3;
  int iterations = 0;
  std::vector<std::pair<double, bool>> history;  // (beta, feasible)
};

struct RandomizationReport {
  int samples = 0;
  int feasible_count = 0;
  double best_objective = 0.0;
  bool fallback = false;  // no sample met the constraint; best overall returned
};

// Phase alignment of the principal left singular vector of the rank-1
// cascaded UE channel; commands all N elements and ignores faults.
RisConfig baseline(const MatC& Hbar_ue);

struct NaiveResult {
  RisConfig config;
  RandomizationReport randomization;
  sdp::SdpSolution relaxed;
};

// SDR of the lifted max-SNR program followed by randomization.
NaiveResult naive_max_snr(const PartitionedChannels& part, const OptimizerSettings& settings,
                          rng::Stream& stream);

// Analytic optimum of the same program (the lifted objective is rank one
// under a LoS AP-RIS link); used as a cross-check oracle and fast path.
RisConfig naive_max_snr_analytic(const PartitionedChannels& part);

// Converts the naive SNR into the signal-power threshold of the SLNR
// program: gamma = (snr_naive / rho) * sigma_n^2 / P.
double gamma_threshold(double snr_naive, double rho_gamma, double noise_power,
                       double tx_power);

struct MaxSlnrResult {
  RisConfig config;
  BisectionState bisection;
  RandomizationReport randomization;
  sdp::SdpSolution last_feasible;  // relaxed solution backing the extraction
  int sdp_iterations = 0;          // summed over all feasibility solves
  int solves = 0;
};

// Algorithm: bisection on the SLNR level beta, each step one max-slack
// feasibility SDP, then Gaussian randomization of the last feasible relaxed
// solution with the realized SLNR as ranking objective. Throws if gamma is
// infeasible (checked by one feasibility solve at beta = 0).
MaxSlnrResult max_slnr(const PartitionedChannels& part, double gamma, double noise_power,
                       double tx_power, const OptimizerSettings& settings, rng::Stream& stream);

// Same algorithm on the partial-CSI surrogate: fault states withheld
// (hb = 0 in `part`), Frobenius offsets added to both sides of the SLNR
// constraint, candidates ranked by the expected-SLNR lower bound.
// `part` must come from partition_indices_only.
MaxSlnrResult robust_max_slnr(const PartitionedChannels& part, double gamma,
                              double noise_power, double tx_power,
                              const OptimizerSettings& settings, rng::Stream& stream);

struct CandidateScore {
  double objective = 0.0;
  bool feasible = true;
};

using CandidateEvaluator = std::function<CandidateScore(const VecC&)>;

// Draws `samples` complex Gaussian vectors with covariance V, rotates each
// by its last coordinate's phase and projects entrywise onto unit modulus
// (last entry exactly 1), then returns the best candidate per the evaluator.
std::pair<VecC, RandomizationReport> gaussian_randomization(const MatC& V,
                                                            const CandidateEvaluator& evaluate,
                                                            int samples, rng::Stream& stream,
                                                            bool parallel = false);

// Surrogate SLNR of a lifted candidate vhat = [v_R; 1] evaluated through the
// rank-1 factors: (|vhat^H chat_k|^2 M + off_k) / (sum + off_sum + noise/P).
// Perfect-CSI callers pass zero offsets.
double surrogate_slnr(const VecC& vhat, const PartitionedChannels& part, double off_k,
                      double off_sum, double noise_over_power);

}  // namespace risleak
