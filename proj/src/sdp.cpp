// SPDX-License-Identifier: Apache-2.0
//
// Mehrotra predictor-corrector path following with the HKM direction,
// specialized to one dense Hermitian block plus a nonnegative slack block.
// The unit-diagonal constraints make the Schur complement's dominant block
// an elementwise product of the iterates, so each iteration costs a handful
// of dense n^3 operations at the dimensions the lifted programs produce.

#include "risleak/sdp.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>

namespace risleak::sdp {

namespace {

using Eigen::VectorXd;

MatC herm(const MatC& a) { return 0.5 * (a + a.adjoint()); }

// Re tr(A B) for Hermitian A, B.
double hip(const MatC& a, const MatC& b) {
  return a.cwiseProduct(b.conjugate()).sum().real();
}

void check_finite(const MatC& m, const char* what) {
  if (!m.allFinite()) throw std::invalid_argument(std::string("sdp: non-finite data in ") + what);
}

// Internal standard form:
//   min <C, X> + cl.t   s.t.  diag(X) = 1,  <B_j, X> + dl_j.t = beta_j,
//   X Hermitian PSD (n x n), t >= 0 (m_lp scalars).
struct InternalProblem {
  int n = 0;
  int q = 0;     // generic equality rows
  int m_lp = 0;  // slack variables
  MatC C;
  VectorXd cl;
  std::vector<MatC> B;
  std::vector<VectorXd> dl;
  VectorXd beta;

  double scale = 1.0;         // divisor applied to all user data
  double slack_offset = 0.0;  // b_1 in slack mode (scaled units)
  bool slack_mode = false;
};

InternalProblem build_internal(const SdpProblem& problem) {
  if (problem.n < 1) throw std::invalid_argument("sdp: dimension must be >= 1");
  if (!problem.diag_one) throw std::invalid_argument("sdp: diag(X)=1 is required");
  const int n = problem.n;
  const int m = static_cast<int>(problem.inequalities.size());
  if (problem.mode == Mode::MaximizeSlack && m < 1)
    throw std::invalid_argument("sdp: slack mode needs at least one inequality");

  // Global rescale so tolerances act relative to the data magnitude.
  double scale = 0.0;
  if (problem.mode == Mode::MaximizeObjective) {
    if (problem.C.rows() != n || problem.C.cols() != n)
      throw std::invalid_argument("sdp: objective dimension mismatch");
    check_finite(problem.C, "objective");
    scale = std::max(scale, problem.C.norm());
  }
  for (const auto& iq : problem.inequalities) {
    if (iq.A.rows() != n || iq.A.cols() != n)
      throw std::invalid_argument("sdp: inequality dimension mismatch");
    check_finite(iq.A, "inequality");
    if (!std::isfinite(iq.b)) throw std::invalid_argument("sdp: non-finite inequality bound");
    scale = std::max({scale, iq.A.norm(), std::abs(iq.b)});
  }
  if (scale <= 0) scale = 1.0;

  std::vector<MatC> A(static_cast<std::size_t>(m));
  VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    A[static_cast<std::size_t>(i)] =
        herm(problem.inequalities[static_cast<std::size_t>(i)].A) / scale;
    b(i) = problem.inequalities[static_cast<std::size_t>(i)].b / scale;
  }

  InternalProblem ip;
  ip.n = n;
  ip.scale = scale;
  if (problem.mode == Mode::MaximizeObjective) {
    // Slacks turn tr(A_i X) >= b_i into tr(A_i X) - t_i = b_i.
    ip.C = -herm(problem.C) / scale;
    ip.m_lp = m;
    ip.q = m;
    ip.cl = VectorXd::Zero(m);
    ip.beta = b;
    for (int i = 0; i < m; ++i) {
      ip.B.push_back(A[static_cast<std::size_t>(i)]);
      VectorXd d = VectorXd::Zero(m);
      d(i) = -1.0;
      ip.dl.push_back(d);
    }
  } else {
    // max s with tr(A_i X) - b_i - s >= 0. Substituting
    // t_i = tr(A_i X) - b_i - s >= 0 eliminates the free variable s:
    //   min -tr(A_1 X) + t_1        (s = tr(A_1 X) - b_1 - t_1)
    //   s.t. tr((A_i - A_1) X) + t_1 - t_i = b_i - b_1,  i = 2..m.
    ip.slack_mode = true;
    ip.slack_offset = b(0);
    ip.C = -A[0];
    ip.m_lp = m;
    ip.q = m - 1;
    ip.cl = VectorXd::Zero(m);
    ip.cl(0) = 1.0;
    ip.beta.resize(ip.q);
    for (int i = 1; i < m; ++i) {
      ip.B.push_back(A[static_cast<std::size_t>(i)] - A[0]);
      VectorXd d = VectorXd::Zero(m);
      d(0) = 1.0;
      d(i) = -1.0;
      ip.dl.push_back(d);
      ip.beta(i - 1) = b(i) - b(0);
    }
  }
  return ip;
}

struct Iterate {
  MatC X, S;
  VectorXd y;     // n diag duals followed by q generic duals
  VectorXd t, z;  // LP block
};

struct Direction {
  MatC dX, dS;
  VectorXd dy, dt, dz;
};

// Largest step alpha <= 1 keeping M + alpha*dM positive definite: power
// iteration estimates the most negative eigenvalue of L^-1 dM L^-H, then a
// Cholesky probe certifies (and if needed shrinks) the step.
double psd_step(const MatC& M, const MatC& dM) {
  const int n = static_cast<int>(M.rows());
  Eigen::LLT<MatC> llt(M);
  if (llt.info() != Eigen::Success) return 0.0;
  const MatC L = llt.matrixL();

  auto apply_k = [&](const VecC& u) -> VecC {
    VecC w = L.adjoint().triangularView<Eigen::Upper>().solve(u);
    w = dM * w;
    return L.triangularView<Eigen::Lower>().solve(w);
  };

  VecC u(n);
  for (int i = 0; i < n; ++i)
    u(i) = std::complex<double>(std::sin(i + 1.0), std::cos(2.0 * i + 0.5));
  u.normalize();
  double lam_dom = 0.0;
  bool negligible = false;
  for (int it = 0; it < 40; ++it) {
    VecC v = apply_k(u);
    const double nv = v.norm();
    if (nv < 1e-300) { negligible = true; break; }
    lam_dom = u.dot(v).real();
    u = v / nv;
  }
  double lam_min = lam_dom;
  if (!negligible && lam_dom > 0) {
    // Shifted pass isolates the smallest eigenvalue.
    VecC u2(n);
    for (int i = 0; i < n; ++i)
      u2(i) = std::complex<double>(std::cos(i + 2.0), std::sin(3.0 * i + 1.0));
    u2.normalize();
    const double shift = 1.2 * std::abs(lam_dom) + 1e-30;
    double mu = 0.0;
    for (int it = 0; it < 40; ++it) {
      VecC v = shift * u2 - apply_k(u2);
      const double nv = v.norm();
      if (nv < 1e-300) break;
      mu = u2.dot(v).real();
      u2 = v / nv;
    }
    lam_min = shift - mu;
  }

  double alpha = 1.0;
  if (!negligible && lam_min < 0) alpha = std::min(1.0, -0.99 / (1.02 * lam_min));
  for (int tries = 0; tries < 60; ++tries) {
    Eigen::LLT<MatC> probe(herm(M + alpha * dM));
    if (probe.info() == Eigen::Success) return alpha;
    alpha *= 0.9;
    if (alpha < 1e-12) break;
  }
  return 0.0;
}

double lp_step(const VectorXd& t, const VectorXd& dt) {
  double alpha = 1.0;
  for (int i = 0; i < t.size(); ++i)
    if (dt(i) < 0) alpha = std::min(alpha, -0.99 * t(i) / dt(i));
  return alpha;
}

class Ipm {
 public:
  Ipm(const InternalProblem& ip, const SdpOptions& opts) : ip_(ip), opts_(opts) {}

  SdpSolution run() {
    const int n = ip_.n;
    const int p = n + ip_.q;
    const double tau0 = std::max(1.0, std::sqrt(static_cast<double>(n))) * opts_.init_scale;

    Iterate it;
    it.X = tau0 * MatC::Identity(n, n);
    it.S = tau0 * MatC::Identity(n, n);
    it.y = VectorXd::Zero(p);
    it.t = VectorXd::Constant(ip_.m_lp, tau0);
    it.z = VectorXd::Constant(ip_.m_lp, tau0);

    SdpSolution sol;
    int iter = 0;
    for (; iter < opts_.max_iters; ++iter) {
      VectorXd rp = primal_residual(it);
      MatC aty = MatC::Zero(n, n);
      for (int i = 0; i < n; ++i) aty(i, i) = it.y(i);
      for (int j = 0; j < ip_.q; ++j) aty += it.y(n + j) * ip_.B[static_cast<std::size_t>(j)];
      const MatC Rd = ip_.C - it.S - aty;
      VectorXd rdl = ip_.cl - it.z;
      for (int j = 0; j < ip_.q; ++j) rdl -= it.y(n + j) * ip_.dl[static_cast<std::size_t>(j)];

      const double mu = (hip(it.X, it.S) + it.t.dot(it.z)) / cone_dim();
      const double pobj = hip(ip_.C, it.X) + ip_.cl.dot(it.t);
      const double dobj = it.y.head(n).sum() + (ip_.q ? it.y.tail(ip_.q).dot(ip_.beta) : 0.0);
      const double relgap =
          std::abs(pobj - dobj) / (1.0 + std::max(std::abs(pobj), std::abs(dobj)));
      const double prim_inf = rp.lpNorm<Eigen::Infinity>();
      const double dual_inf =
          std::max(Rd.cwiseAbs().maxCoeff(), ip_.m_lp ? rdl.lpNorm<Eigen::Infinity>() : 0.0);

      if (relgap <= opts_.gap_tol && prim_inf <= opts_.feas_tol && dual_inf <= opts_.feas_tol) {
        finalize(sol, it, iter, pobj, dobj, prim_inf, Status::Optimal);
        return sol;
      }

      Eigen::LLT<MatC> lltS(it.S);
      if (lltS.info() != Eigen::Success) break;
      const MatC Sinv = lltS.solve(MatC::Identity(n, n));

      // Schur complement. Diagonal constraints contribute elementwise; the
      // few generic rows need dense products.
      Eigen::MatrixXd Mschur(p, p);
      Mschur.topLeftCorner(n, n) = it.X.cwiseProduct(Sinv.conjugate()).real();
      std::vector<MatC> W(static_cast<std::size_t>(ip_.q));
      for (int j = 0; j < ip_.q; ++j) {
        W[static_cast<std::size_t>(j)] = it.X * ip_.B[static_cast<std::size_t>(j)] * Sinv;
        Mschur.col(n + j).head(n) = W[static_cast<std::size_t>(j)].diagonal().real();
        Mschur.row(n + j).head(n) = W[static_cast<std::size_t>(j)].diagonal().real().transpose();
      }
      for (int i = 0; i < ip_.q; ++i)
        for (int j = 0; j < ip_.q; ++j) {
          double v = ip_.B[static_cast<std::size_t>(i)]
                         .cwiseProduct(W[static_cast<std::size_t>(j)].transpose())
                         .sum()
                         .real();
          v += ip_.dl[static_cast<std::size_t>(i)].cwiseProduct(ip_.dl[static_cast<std::size_t>(j)])
                   .dot((it.t.array() / it.z.array()).matrix());
          Mschur(n + i, n + j) = v;
        }
      Mschur = 0.5 * (Mschur + Mschur.transpose()).eval();
      Eigen::LDLT<Eigen::MatrixXd> schur(Mschur);
      if (schur.info() != Eigen::Success || !schur.isPositive()) {
        Mschur.diagonal().array() += 1e-12 * (1.0 + Mschur.diagonal().maxCoeff());
        schur.compute(Mschur);
        if (schur.info() != Eigen::Success) break;
      }

      const MatC XRdSinv = herm(it.X * Rd * Sinv);

      auto solve_direction = [&](double sigma_mu, const MatC* corrX, const VectorXd* corr_lp,
                                 Direction& d) {
        MatC U = -it.X - XRdSinv;
        if (sigma_mu != 0.0) U += sigma_mu * Sinv;
        if (corrX) U -= *corrX;
        VectorXd ulp = VectorXd::Zero(ip_.m_lp);
        if (ip_.m_lp) {
          ulp = -it.t - (it.t.array() / it.z.array()).matrix().cwiseProduct(rdl);
          if (sigma_mu != 0.0) ulp += sigma_mu * it.z.cwiseInverse();
          if (corr_lp) ulp -= *corr_lp;
        }
        VectorXd rhs(p);
        rhs.head(n) = rp.head(n) - U.diagonal().real();
        for (int j = 0; j < ip_.q; ++j)
          rhs(n + j) = rp(n + j) - hip(ip_.B[static_cast<std::size_t>(j)], U) -
                       ip_.dl[static_cast<std::size_t>(j)].dot(ulp);

        d.dy = schur.solve(rhs);
        MatC atdy = MatC::Zero(n, n);
        for (int i = 0; i < n; ++i) atdy(i, i) = d.dy(i);
        for (int j = 0; j < ip_.q; ++j) atdy += d.dy(n + j) * ip_.B[static_cast<std::size_t>(j)];
        d.dS = herm(Rd - atdy);
        d.dX = herm(U + it.X * atdy * Sinv);
        d.dz = rdl;
        d.dt.resize(ip_.m_lp);
        for (int j = 0; j < ip_.q; ++j) d.dz -= d.dy(n + j) * ip_.dl[static_cast<std::size_t>(j)];
        for (int s = 0; s < ip_.m_lp; ++s) {
          double dtw = 0.0;
          for (int j = 0; j < ip_.q; ++j) dtw += d.dy(n + j) * ip_.dl[static_cast<std::size_t>(j)](s);
          d.dt(s) = ulp(s) + it.t(s) / it.z(s) * dtw;
        }
      };

      // Predictor.
      Direction aff;
      solve_direction(0.0, nullptr, nullptr, aff);
      double ap = psd_step(it.X, aff.dX);
      double ad = psd_step(it.S, aff.dS);
      if (ip_.m_lp) {
        ap = std::min(ap, lp_step(it.t, aff.dt));
        ad = std::min(ad, lp_step(it.z, aff.dz));
      }
      const double mu_aff = (hip(it.X + ap * aff.dX, it.S + ad * aff.dS) +
                             (ip_.m_lp ? (it.t + ap * aff.dt).dot(it.z + ad * aff.dz) : 0.0)) /
                            cone_dim();
      double sigma = std::pow(std::max(0.0, mu_aff / mu), 3);
      sigma = std::min(1.0, std::max(sigma, 1e-8));

      // Corrector with the second-order term.
      const MatC corrX = herm(aff.dX * aff.dS * Sinv);
      VectorXd corr_lp;
      if (ip_.m_lp) corr_lp = (aff.dt.array() * aff.dz.array() / it.z.array()).matrix();
      Direction dir;
      solve_direction(sigma * mu, &corrX, ip_.m_lp ? &corr_lp : nullptr, dir);

      double sp = psd_step(it.X, dir.dX);
      double sd = psd_step(it.S, dir.dS);
      if (ip_.m_lp) {
        sp = std::min(sp, lp_step(it.t, dir.dt));
        sd = std::min(sd, lp_step(it.z, dir.dz));
      }
      if (sp <= 1e-12 || sd <= 1e-12) break;

      it.X = herm(it.X + sp * dir.dX);
      it.S = herm(it.S + sd * dir.dS);
      it.y += sd * dir.dy;
      if (ip_.m_lp) {
        it.t += sp * dir.dt;
        it.z += sd * dir.dz;
      }
    }

    const double pobj = hip(ip_.C, it.X) + ip_.cl.dot(it.t);
    const double dobj =
        it.y.head(n).sum() + (ip_.q ? it.y.tail(ip_.q).dot(ip_.beta) : 0.0);
    finalize(sol, it, iter, pobj, dobj, primal_residual(it).lpNorm<Eigen::Infinity>(),
             Status::MaxIter);
    return sol;
  }

 private:
  double cone_dim() const { return static_cast<double>(ip_.n + std::max(ip_.m_lp, 1)); }

  VectorXd primal_residual(const Iterate& it) const {
    VectorXd rp(ip_.n + ip_.q);
    for (int i = 0; i < ip_.n; ++i) rp(i) = 1.0 - it.X(i, i).real();
    for (int j = 0; j < ip_.q; ++j)
      rp(ip_.n + j) = ip_.beta(j) - hip(ip_.B[static_cast<std::size_t>(j)], it.X) -
                      ip_.dl[static_cast<std::size_t>(j)].dot(it.t);
    return rp;
  }

  void finalize(SdpSolution& sol, const Iterate& it, int iterations, double pobj, double dobj,
                double prim_inf, Status status) {
    sol.status = status;
    sol.iterations = iterations;
    sol.X = it.X;
    sol.gap = std::abs(pobj - dobj) * ip_.scale;
    sol.rel_gap = std::abs(pobj - dobj) / (1.0 + std::max(std::abs(pobj), std::abs(dobj)));
    sol.max_violation = prim_inf;
    if (ip_.slack_mode) {
      sol.objective = (-pobj - ip_.slack_offset) * ip_.scale;
    } else {
      sol.objective = -pobj * ip_.scale;
    }
    sol.data_scale = ip_.scale;
    sol.diag_violation = 0.0;
    for (int i = 0; i < ip_.n; ++i)
      sol.diag_violation =
          std::max(sol.diag_violation, std::abs(it.X(i, i) - std::complex<double>(1, 0)));
    Eigen::SelfAdjointEigenSolver<MatC> es(it.X, Eigen::EigenvaluesOnly);
    sol.lambda_min = es.eigenvalues().minCoeff();
  }

  const InternalProblem& ip_;
  SdpOptions opts_;
};

}  // namespace

std::string to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::MaxIter: return "max-iter";
  }
  return "?";
}

namespace {
std::mutex g_audit_mutex;
SolveAudit* g_audit = nullptr;
}  // namespace

void set_global_audit(SolveAudit* audit) {
  std::lock_guard<std::mutex> lock(g_audit_mutex);
  g_audit = audit;
}

SdpSolution solve(const SdpProblem& problem, const SdpOptions& opts) {
  InternalProblem ip = build_internal(problem);
  Ipm ipm(ip, opts);
  SdpSolution sol = ipm.run();
  if (sol.status == Status::MaxIter) {
    // Restart from a different cold-start scale; keep the better iterate.
    SdpOptions retry = opts;
    retry.init_scale = opts.init_scale * 16.0;
    Ipm ipm2(ip, retry);
    SdpSolution sol2 = ipm2.run();
    if (sol2.status == Status::Optimal || sol2.rel_gap < sol.rel_gap) sol = sol2;
  }
  {
    std::lock_guard<std::mutex> lock(g_audit_mutex);
    if (g_audit) {
      g_audit->solves += 1;
      if (sol.status == Status::Optimal) {
        g_audit->optimal += 1;
        g_audit->max_rel_gap = std::max(g_audit->max_rel_gap, sol.rel_gap);
        g_audit->max_diag_violation = std::max(g_audit->max_diag_violation, sol.diag_violation);
        const double tr = sol.X.trace().real();
        if (tr > 0)
          g_audit->min_lambda_ratio = std::min(g_audit->min_lambda_ratio, sol.lambda_min / tr);
      } else {
        g_audit->non_optimal += 1;
      }
    }
  }
  return sol;
}

FeasibilityResult check_feasibility(const SdpProblem& problem, const SdpOptions& opts) {
  if (problem.mode != Mode::MaximizeSlack)
    throw std::invalid_argument("check_feasibility requires MaximizeSlack mode");
  FeasibilityResult res;
  res.solution = solve(problem, opts);
  if (res.solution.status == Status::MaxIter) {
    res.feasible = false;
    return res;
  }
  // The slack sign is judged relative to the data magnitude.
  res.feasible = res.solution.objective >= -opts.feas_tol * res.solution.data_scale;
  if (!res.feasible) res.solution.status = Status::Infeasible;
  return res;
}

SdpSolution solve_via_real_embedding(const SdpProblem& problem, const SdpOptions& opts) {
  const int n = problem.n;
  auto embed = [n](const MatC& a) {
    MatC e = MatC::Zero(2 * n, 2 * n);
    e.topLeftCorner(n, n).real() = a.real();
    e.bottomRightCorner(n, n).real() = a.real();
    e.topRightCorner(n, n).real() = -a.imag();
    e.bottomLeftCorner(n, n).real() = a.imag();
    return e;
  };

  SdpProblem big;
  big.n = 2 * n;
  big.mode = problem.mode;
  big.diag_one = true;
  // tr(T(A) T(X)) = 2 tr(A X): halving the embedded data keeps values equal.
  if (problem.mode == Mode::MaximizeObjective && problem.C.size())
    big.C = 0.5 * embed(herm(problem.C));
  for (const auto& iq : problem.inequalities)
    big.inequalities.push_back({0.5 * embed(herm(iq.A)), iq.b});

  SdpSolution sol = solve(big, opts);
  const MatC& Y = sol.X;
  MatC X(n, n);
  X.real() = 0.5 * (Y.topLeftCorner(n, n).real() + Y.bottomRightCorner(n, n).real());
  X.imag() = 0.5 * (Y.bottomLeftCorner(n, n).real() - Y.topRightCorner(n, n).real());
  sol.X = herm(X);
  Eigen::SelfAdjointEigenSolver<MatC> es(sol.X, Eigen::EigenvaluesOnly);
  sol.lambda_min = es.eigenvalues().minCoeff();
  return sol;
}

void dump_problem(const SdpProblem& problem, std::ostream& out) {
  out << "risleak-sdp 1\n";
  out << "n " << problem.n << " mode "
      << (problem.mode == Mode::MaximizeObjective ? "objective" : "slack") << " ineq "
      << problem.inequalities.size() << "\n";
  out.precision(17);
  auto dump_mat = [&](const MatC& m) {
    for (int r = 0; r < m.rows(); ++r) {
      for (int c = 0; c < m.cols(); ++c)
        out << m(r, c).real() << " " << m(r, c).imag() << (c + 1 < m.cols() ? " " : "");
      out << "\n";
    }
  };
  out << "C\n";
  if (problem.C.size())
    dump_mat(problem.C);
  else
    dump_mat(MatC::Zero(problem.n, problem.n));
  for (std::size_t i = 0; i < problem.inequalities.size(); ++i) {
    out << "A " << i << " b " << problem.inequalities[i].b << "\n";
    dump_mat(problem.inequalities[i].A);
  }
}

SdpProblem load_problem(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "risleak-sdp" || version != 1)
    throw std::invalid_argument("sdp: unrecognized problem dump header");
  SdpProblem p;
  std::string tok, mode;
  std::size_t ineq = 0;
  in >> tok >> p.n >> tok >> mode >> tok >> ineq;
  p.mode = mode == "objective" ? Mode::MaximizeObjective : Mode::MaximizeSlack;
  auto read_mat = [&](MatC& m) {
    m.resize(p.n, p.n);
    for (int r = 0; r < p.n; ++r)
      for (int c = 0; c < p.n; ++c) {
        double re = 0, im = 0;
        in >> re >> im;
        m(r, c) = {re, im};
      }
  };
  in >> tok;  // "C"
  read_mat(p.C);
  for (std::size_t i = 0; i < ineq; ++i) {
    Inequality iq;
    std::size_t idx;
    in >> tok >> idx >> tok >> iq.b;
    read_mat(iq.A);
    p.inequalities.push_back(std::move(iq));
  }
  if (!in) throw std::invalid_argument("sdp: truncated problem dump");
  return p;
}

}  // namespace risleak::sdp
