// SPDX-License-Identifier: Apache-2.0

#include "risleak/optimizers.hpp"

#include <omp.h>

#include <cmath>
#include <stdexcept>

namespace risleak {

namespace {

const std::complex<double> kJ{0.0, 1.0};

VecC phase_project(const VecC& x) {
  VecC v(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) v(i) = std::exp(kJ * std::arg(x(i)));
  return v;
}

// Shared data of one SLNR bisection run. off_* are the partial-CSI Frobenius
// offsets (zero under perfect CSI); Hk/Hsum are assembled from the stacked
// channel blocks so no rank assumption enters the programs.
struct SlnrProgram {
  MatC Hk;
  MatC Hsum;
  double off_k = 0.0;
  double off_sum = 0.0;
  double noise_over_power = 0.0;
  double gamma = 0.0;

  sdp::SdpProblem feasibility_at(double beta) const {
    sdp::SdpProblem p;
    p.n = static_cast<int>(Hk.rows());
    p.mode = sdp::Mode::MaximizeSlack;
    sdp::Inequality slnr;
    slnr.A = Hk - beta * Hsum;
    slnr.b = beta * (off_sum + noise_over_power) - off_k;
    sdp::Inequality floor;
    floor.A = Hk;
    floor.b = gamma;
    p.inequalities = {std::move(slnr), std::move(floor)};
    return p;
  }
};

SlnrProgram build_program(const PartitionedChannels& part, double gamma, double noise_power,
                          double tx_power, bool robust) {
  SlnrProgram prog;
  const int n = part.lifted_dim();
  prog.Hk = part.lifted(part.ue_index);
  prog.Hsum = MatC::Zero(n, n);
  for (int t = 0; t < static_cast<int>(part.pts.size()); ++t) {
    if (t == part.ue_index) continue;
    prog.Hsum += part.lifted(t);
  }
  if (robust) {
    prog.off_k = part.pts[static_cast<std::size_t>(part.ue_index)].fro2_b / 3.0;
    for (int t = 0; t < static_cast<int>(part.pts.size()); ++t)
      if (t != part.ue_index)
        prog.off_sum += part.pts[static_cast<std::size_t>(t)].fro2_b / 3.0;
  }
  prog.noise_over_power = noise_power / tx_power;
  prog.gamma = gamma;
  return prog;
}

// Candidate with the largest surrogate signal power: phases of chat_k
// relative to the fixed last coordinate.
VecC aligned_candidate(const PartitionedChannels& part) {
  const VecC& chat = part.pts[static_cast<std::size_t>(part.ue_index)].chat;
  VecC vhat = phase_project(chat);
  const std::complex<double> last = chat(chat.size() - 1);
  if (std::abs(last) > 0) vhat *= std::exp(-kJ * std::arg(last));
  vhat(vhat.size() - 1) = 1.0;
  return vhat;
}

MaxSlnrResult run_bisection(const PartitionedChannels& part, const SlnrProgram& prog,
                            const OptimizerSettings& settings, rng::Stream& stream,
                            bool robust) {
  MaxSlnrResult res;
  const int n = part.lifted_dim();

  auto check = [&](double beta) {
    sdp::FeasibilityResult f = sdp::check_feasibility(prog.feasibility_at(beta), settings.sdp);
    res.sdp_iterations += f.solution.iterations;
    res.solves += 1;
    res.bisection.history.emplace_back(beta, f.feasible);
    return f;
  };

  // Gamma achievability; also supplies a relaxed solution if nothing better.
  sdp::FeasibilityResult at_zero = check(0.0);
  if (!at_zero.feasible)
    throw std::runtime_error("max_slnr: gamma floor is infeasible for this instance");
  res.last_feasible = at_zero.solution;

  // Sound upper bound on the surrogate SLNR level: signal power cannot
  // exceed n*lambda_max(Hk) (+ offset) and the denominator is at least the
  // noise term, paper-leakage excluded.
  Eigen::SelfAdjointEigenSolver<MatC> es(prog.Hk, Eigen::EigenvaluesOnly);
  const double cap =
      1.05 * (n * std::max(0.0, es.eigenvalues().maxCoeff()) + prog.off_k) /
      prog.noise_over_power;

  // Feasible starting level from the max-signal candidate, then exponential
  // expansion to an infeasible level; the spec-level cap is infeasible by
  // construction so it never needs a solve.
  double lo = 0.0;
  const VecC v0 = aligned_candidate(part);
  const double beta0 =
      surrogate_slnr(v0, part, prog.off_k, prog.off_sum, prog.noise_over_power);
  const double sig0 = part.a_norm2 * std::norm(v0.dot(part.pts[static_cast<std::size_t>(part.ue_index)].chat));
  if (beta0 > 0 && sig0 >= prog.gamma) {
    lo = beta0;
    res.last_feasible = sdp::SdpSolution{};
    res.last_feasible.X = v0 * v0.adjoint();
    res.last_feasible.status = sdp::Status::Optimal;
    res.last_feasible.iterations = 0;
  }
  double hi = cap;
  if (lo > 0) {
    double probe = std::min(4.0 * lo, cap);
    while (probe < cap) {
      sdp::FeasibilityResult f = check(probe);
      if (!f.feasible) { hi = probe; break; }
      lo = probe;
      res.last_feasible = f.solution;
      probe = std::min(4.0 * probe, cap);
    }
  }

  // Bisection on the bracket.
  while (hi > 0 && (hi - lo) / hi >= settings.bisection_tol) {
    const double beta = 0.5 * (hi + lo);
    sdp::FeasibilityResult f = check(beta);
    if (f.feasible) {
      lo = beta;
      res.last_feasible = f.solution;
    } else {
      hi = beta;
    }
    res.bisection.iterations += 1;
  }
  res.bisection.lo = lo;
  res.bisection.hi = hi;
  res.bisection.tol = settings.bisection_tol;

  // Extraction. Perfect CSI ranks by realized SLNR; the robust variant only
  // ever sees the index-derived surrogate.
  const double gamma_floor = prog.gamma * (1.0 - settings.gamma_feas_slack);
  const VecC& chat_k = part.pts[static_cast<std::size_t>(part.ue_index)].chat;
  auto evaluate = [&](const VecC& vhat) {
    CandidateScore score;
    score.objective =
        surrogate_slnr(vhat, part, prog.off_k, prog.off_sum, prog.noise_over_power);
    score.feasible = part.a_norm2 * std::norm(vhat.dot(chat_k)) >= gamma_floor;
    return score;
  };
  auto [vhat, report] =
      gaussian_randomization(res.last_feasible.X, evaluate, settings.randomization_samples,
                             stream, settings.parallel_candidates);
  res.randomization = report;
  res.config.v = vhat.head(n - 1);
  res.config.origin = robust ? Method::Robust : Method::MaxSlnr;
  return res;
}

}  // namespace

double surrogate_slnr(const VecC& vhat, const PartitionedChannels& part, double off_k,
                      double off_sum, double noise_over_power) {
  double den = off_sum + noise_over_power;
  double num = 0.0;
  for (int t = 0; t < static_cast<int>(part.pts.size()); ++t) {
    const double sig =
        part.a_norm2 * std::norm(vhat.dot(part.pts[static_cast<std::size_t>(t)].chat));
    if (t == part.ue_index)
      num = sig + off_k;
    else
      den += sig;
  }
  return num / den;
}

RisConfig baseline(const MatC& Hbar_ue) {
  if (Hbar_ue.norm() <= 0) throw std::invalid_argument("baseline: zero channel");
  Eigen::JacobiSVD<MatC> svd(Hbar_ue, Eigen::ComputeThinU);
  RisConfig cfg;
  cfg.v = phase_project(svd.matrixU().col(0));
  cfg.origin = Method::Baseline;
  return cfg;
}

RisConfig naive_max_snr_analytic(const PartitionedChannels& part) {
  RisConfig cfg;
  const VecC vhat = aligned_candidate(part);
  cfg.v = vhat.head(vhat.size() - 1);
  cfg.origin = Method::Naive;
  return cfg;
}

NaiveResult naive_max_snr(const PartitionedChannels& part, const OptimizerSettings& settings,
                          rng::Stream& stream) {
  sdp::SdpProblem p;
  p.n = part.lifted_dim();
  p.mode = sdp::Mode::MaximizeObjective;
  p.C = part.lifted(part.ue_index);

  NaiveResult res;
  res.relaxed = sdp::solve(p, settings.sdp);
  if (res.relaxed.status != sdp::Status::Optimal)
    throw std::runtime_error("naive_max_snr: solver returned " + to_string(res.relaxed.status));

  const VecC& chat_k = part.pts[static_cast<std::size_t>(part.ue_index)].chat;
  auto evaluate = [&](const VecC& vhat) {
    return CandidateScore{part.a_norm2 * std::norm(vhat.dot(chat_k)), true};
  };
  auto [vhat, report] = gaussian_randomization(
      res.relaxed.X, evaluate, settings.randomization_samples, stream,
      settings.parallel_candidates);
  res.randomization = report;
  res.config.v = vhat.head(p.n - 1);
  res.config.origin = Method::Naive;
  return res;
}

double gamma_threshold(double snr_naive, double rho_gamma, double noise_power,
                       double tx_power) {
  if (rho_gamma <= 1.0) throw std::invalid_argument("gamma_threshold: rho must be > 1");
  if (snr_naive < 0) throw std::invalid_argument("gamma_threshold: negative SNR");
  return snr_naive / rho_gamma * noise_power / tx_power;
}

MaxSlnrResult max_slnr(const PartitionedChannels& part, double gamma, double noise_power,
                       double tx_power, const OptimizerSettings& settings,
                       rng::Stream& stream) {
  const SlnrProgram prog = build_program(part, gamma, noise_power, tx_power, /*robust=*/false);
  return run_bisection(part, prog, settings, stream, /*robust=*/false);
}

MaxSlnrResult robust_max_slnr(const PartitionedChannels& part, double gamma,
                              double noise_power, double tx_power,
                              const OptimizerSettings& settings, rng::Stream& stream) {
  for (const auto& pp : part.pts)
    if (pp.hb.squaredNorm() != 0.0)
      throw std::invalid_argument(
          "robust_max_slnr: partition carries fault states; use partition_indices_only");
  const SlnrProgram prog = build_program(part, gamma, noise_power, tx_power, /*robust=*/true);
  return run_bisection(part, prog, settings, stream, /*robust=*/true);
}

std::pair<VecC, RandomizationReport> gaussian_randomization(const MatC& V,
                                                            const CandidateEvaluator& evaluate,
                                                            int samples, rng::Stream& stream,
                                                            bool parallel) {
  if (samples < 1) throw std::invalid_argument("gaussian_randomization: samples must be >= 1");
  const int n = static_cast<int>(V.rows());

  Eigen::SelfAdjointEigenSolver<MatC> es(0.5 * (V + V.adjoint()));
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  // Numerically-zero directions would only add eigensolver dust to the draws.
  const double floor = 1e-12 * lam.maxCoeff();
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    if (lam(i) < floor) lam(i) = 0.0;
  const MatC F = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();

  // Draw serially (one stream), evaluate in parallel, reduce serially.
  std::vector<VecC> candidates(static_cast<std::size_t>(samples));
  for (auto& cand : candidates) {
    VecC g(n);
    for (int i = 0; i < n; ++i) g(i) = stream.cnormal();
    VecC xi = F * g;
    const std::complex<double> last = xi(n - 1);
    if (std::abs(last) > 0) xi *= std::exp(-kJ * std::arg(last));
    cand = phase_project(xi);
    cand(n - 1) = 1.0;
  }

  std::vector<CandidateScore> scores(static_cast<std::size_t>(samples));
#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < samples; ++i)
    scores[static_cast<std::size_t>(i)] = evaluate(candidates[static_cast<std::size_t>(i)]);

  RandomizationReport report;
  report.samples = samples;
  int best = -1, best_any = 0;
  for (int i = 0; i < samples; ++i) {
    const CandidateScore& s = scores[static_cast<std::size_t>(i)];
    if (s.feasible) {
      ++report.feasible_count;
      if (best < 0 || s.objective > scores[static_cast<std::size_t>(best)].objective) best = i;
    }
    if (s.objective > scores[static_cast<std::size_t>(best_any)].objective) best_any = i;
  }
  if (best < 0) {
    report.fallback = true;
    best = best_any;
  }
  report.best_objective = scores[static_cast<std::size_t>(best)].objective;
  return {candidates[static_cast<std::size_t>(best)], report};
}

}  // namespace risleak
