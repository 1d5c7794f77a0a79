// SPDX-License-Identifier: Apache-2.0
//
// Dense primal-dual interior-point solver for the lifted programs: maximize
// a linear functional of a Hermitian PSD matrix under a unit-diagonal
// equality constraint and a small number of affine inequalities. Problems
// are solved natively in complex arithmetic; a real 2n x 2n embedding is
// available as a cross-check route.

#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "risleak/channel.hpp"

namespace risleak::sdp {

enum class Mode {
  MaximizeObjective,  // max tr(C X)
  MaximizeSlack,      // max s s.t. tr(A_i X) - b_i >= s for every inequality
};

enum class Status { Optimal, Infeasible, MaxIter };

std::string to_string(Status status);

struct Inequality {
  MatC A;       // Hermitian n x n (symmetrized on ingest)
  double b = 0; // sense: tr(A X) >= b
};

struct SdpProblem {
  int n = 0;
  MatC C;  // Hermitian objective; ignored in MaximizeSlack mode
  std::vector<Inequality> inequalities;
  bool diag_one = true;
  Mode mode = Mode::MaximizeObjective;
};

struct SdpOptions {
  double gap_tol = 1e-6;
  double feas_tol = 1e-7;   // primal/dual residual and PSD/diag tolerance
  int max_iters = 120;
  double init_scale = 1.0;  // multiplier on the cold-start iterate
};

struct SdpSolution {
  MatC X;
  double objective = 0.0;   // tr(C X), or the slack s in MaximizeSlack mode
  double gap = 0.0;         // |primal - dual| in original data units
  double rel_gap = 0.0;     // gap / (1 + max(|p|, |d|))
  double max_violation = 0.0;  // worst equality/inequality violation (scaled data)
  double lambda_min = 0.0;     // smallest eigenvalue of X
  double diag_violation = 0.0; // max |X_ii - 1|
  double data_scale = 1.0;     // rescale divisor applied to the input data
  int iterations = 0;
  Status status = Status::MaxIter;
};

// Solves the program; inputs are symmetrized and globally rescaled so that
// tolerances act relative to the data magnitude. Throws on NaN/Inf data or
// dimension mismatches. Never silently returns on iteration exhaustion:
// the status says so.
SdpSolution solve(const SdpProblem& problem, const SdpOptions& opts = {});

struct FeasibilityResult {
  bool feasible = false;
  SdpSolution solution;  // X achieving the max slack; status Infeasible when not
};

// Decides feasibility of the inequality system over {diag(X)=1, X PSD} via
// the sign of the maximized shared slack: feasible iff slack >= -tol in the
// rescaled data units.
FeasibilityResult check_feasibility(const SdpProblem& problem, const SdpOptions& opts = {});

// Cross-check oracle: solves the same program through the real symmetric
// 2n x 2n embedding [Re X, -Im X; Im X, Re X] and maps the solution back.
SdpSolution solve_via_real_embedding(const SdpProblem& problem, const SdpOptions& opts = {});

// Plain-text dump/load of a problem for offline cross-validation.
void dump_problem(const SdpProblem& problem, std::ostream& out);
SdpProblem load_problem(std::istream& in);

// Optional global audit: when set, every solve records its certification
// quantities (thread-safe). Used to assert solver quality across whole
// experiment runs.
struct SolveAudit {
  long solves = 0;
  long optimal = 0;
  long non_optimal = 0;
  double max_rel_gap = 0.0;        // over optimal solves
  double max_diag_violation = 0.0; // over optimal solves
  double min_lambda_ratio = 0.0;   // min of lambda_min(X) / tr(X), optimal solves
};

void set_global_audit(SolveAudit* audit);  // nullptr disables

}  // namespace risleak::sdp
