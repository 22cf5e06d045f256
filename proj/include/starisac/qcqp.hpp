#pragma once

#include <Eigen/Cholesky>
#include <algorithm>
#include <limits>
#include <vector>

#include "starisac/types.hpp"

namespace starisac {

// ---------------------------------------------------------------------------
// Real core: maximize -x'Px/2 + q'x  s.t.  x'A_i x/2 + b_i'x <= c_i,
// P and every A_i PSD. Solved by a log-barrier Newton method with a
// phase-1 slack problem when no strictly feasible start is known.
// ---------------------------------------------------------------------------

struct RealQuadConstraint {
  MatR a;  // PSD, may be zero (affine constraint)
  VecR b;
  double c = 0.0;

  double eval(const VecR& x) const {
    double v = b.dot(x) - c;
    if (a.size() > 0) v += 0.5 * x.dot(a * x);
    return v;  // feasible iff <= 0
  }
  VecR grad(const VecR& x) const {
    if (a.size() > 0) return a * x + b;
    return b;
  }
};

struct RealQcqp {
  int dim = 0;
  MatR p;  // PSD (may be zero)
  VecR q;
  std::vector<RealQuadConstraint> ineqs;
};

struct RealQcqpResult {
  VecR x;
  Status status = Status::NumericalError;
  double objective = 0.0;
  double kkt_residual = std::numeric_limits<double>::infinity();
  std::vector<double> multipliers;
};

namespace detail_qcqp {

inline double objective(const RealQcqp& p, const VecR& x) {
  double v = p.q.dot(x);
  if (p.p.size() > 0) v -= 0.5 * x.dot(p.p * x);
  return v;
}

// Newton descent on  f(x) = (x'Px/2 - q'x) - (1/t) sum log(-g_i(x)).
// Returns false if a step cannot make progress (numerical trouble).
inline bool newton_center(const RealQcqp& p, double t, VecR& x, int max_newton = 60) {
  const int n = p.dim;
  const int m = static_cast<int>(p.ineqs.size());
  for (int it = 0; it < max_newton; ++it) {
    VecR grad = -p.q;
    if (p.p.size() > 0) grad += p.p * x;
    MatR hess = p.p.size() > 0 ? MatR(p.p) : MatR::Zero(n, n);
    for (int i = 0; i < m; ++i) {
      double s = -p.ineqs[i].eval(x);
      if (s <= 0.0) return false;
      VecR gi = p.ineqs[i].grad(x);
      grad += gi / (t * s);
      hess += gi * gi.transpose() / (t * s * s);
      if (p.ineqs[i].a.size() > 0) hess += p.ineqs[i].a / (t * s);
    }
    double reg = 1e-12 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
    hess.diagonal().array() += reg;
    Eigen::LDLT<MatR> ldlt(hess);
    if (ldlt.info() != Eigen::Success) return false;
    VecR dx = ldlt.solve(-grad);
    double lambda2 = -grad.dot(dx);
    if (lambda2 < 1e-18) return true;  // centered
    // backtracking: stay strictly feasible, require decrease
    double f0 = 0.5 * (p.p.size() > 0 ? x.dot(p.p * x) : 0.0) - p.q.dot(x);
    for (int i = 0; i < m; ++i) f0 -= std::log(-p.ineqs[i].eval(x)) / t;
    double alpha = 1.0;
    bool stepped = false;
    for (int ls = 0; ls < 60; ++ls) {
      VecR xn = x + alpha * dx;
      bool ok = true;
      for (int i = 0; i < m; ++i)
        if (p.ineqs[i].eval(xn) >= 0.0) { ok = false; break; }
      if (ok) {
        double fn = 0.5 * (p.p.size() > 0 ? xn.dot(p.p * xn) : 0.0) - p.q.dot(xn);
        for (int i = 0; i < m; ++i) fn -= std::log(-p.ineqs[i].eval(xn)) / t;
        if (fn <= f0 - 1e-4 * alpha * lambda2 || fn < f0) {
          x = xn;
          stepped = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!stepped) return true;  // stuck at machine precision; accept iterate
  }
  return true;
}

}  // namespace detail_qcqp

// Interior-point solve. `x0` may be empty; a phase-1 problem then finds a
// strictly feasible start or declares infeasibility.
inline RealQcqpResult solve_qcqp_real(const RealQcqp& prob, double tol, VecR x0 = VecR()) {
  using namespace detail_qcqp;
  RealQcqpResult res;
  const int n = prob.dim;
  const int m = static_cast<int>(prob.ineqs.size());

  // Scale objective to O(1); the feasible set is untouched, so the argmax
  // is invariant and we can report the objective in original units.
  double scale = 1.0;
  if (prob.p.size() > 0) scale = std::max(scale, prob.p.cwiseAbs().maxCoeff());
  if (prob.q.size() > 0) scale = std::max(scale, prob.q.cwiseAbs().maxCoeff());
  RealQcqp p = prob;
  if (p.p.size() > 0) p.p /= scale;
  p.q /= scale;

  if (m == 0) {
    // Unconstrained quadratic: one linear solve.
    if (p.p.size() == 0 || p.p.norm() == 0.0) {
      res.status = p.q.norm() == 0.0 ? Status::Optimal : Status::NumericalError;
      res.x = VecR::Zero(n);
      res.objective = 0.0;
      res.kkt_residual = p.q.norm();
      return res;
    }
    MatR preg = p.p;
    preg.diagonal().array() += 1e-14 * std::max(1.0, p.p.diagonal().maxCoeff());
    Eigen::LDLT<MatR> ldlt(preg);
    res.x = ldlt.solve(p.q);
    res.kkt_residual = (p.p * res.x - p.q).norm();
    res.status = res.kkt_residual <= std::max(tol, 1e-10) * (1.0 + p.q.norm())
                     ? Status::Optimal
                     : Status::NumericalError;
    res.objective = scale * objective(p, res.x);
    return res;
  }

  // Strictly feasible start.
  VecR x = x0.size() == n ? x0 : VecR::Zero(n);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& g : prob.ineqs) worst = std::max(worst, g.eval(x));
  if (worst >= 0.0) {
    // Phase 1: maximize margin s over (x, s): g_i(x) - s <= 0.
    RealQcqp ph;
    ph.dim = n + 1;
    ph.p = MatR::Zero(n + 1, n + 1);
    ph.q = VecR::Zero(n + 1);
    ph.q(n) = -1.0;  // maximize -s
    for (const auto& g : prob.ineqs) {
      RealQuadConstraint gg;
      if (g.a.size() > 0) {
        gg.a = MatR::Zero(n + 1, n + 1);
        gg.a.topLeftCorner(n, n) = g.a;
      }
      gg.b = VecR::Zero(n + 1);
      gg.b.head(n) = g.b;
      gg.b(n) = -1.0;
      gg.c = g.c;
      ph.ineqs.push_back(std::move(gg));
    }
    // Keep phase 1 bounded.
    RealQuadConstraint cap;
    cap.b = VecR::Zero(n + 1);
    cap.b(n) = -1.0;
    cap.c = std::abs(worst) + 10.0;
    ph.ineqs.push_back(cap);
    VecR xs(n + 1);
    xs.head(n) = x;
    xs(n) = worst + 1.0;
    double t = 1.0;
    for (int round = 0; round < 60 && xs(n) > -1e-6; ++round) {
      if (!newton_center(ph, t, xs)) break;
      t *= 10.0;
      if (static_cast<double>(ph.ineqs.size()) / t < 1e-10) break;
    }
    if (xs(n) >= 0.0) {
      res.status = Status::Infeasible;
      res.x = xs.head(n);
      res.objective = scale * objective(p, res.x);
      return res;
    }
    x = xs.head(n);
  }

  // Phase 2: barrier path following.
  double t = 1.0;
  for (int round = 0; round < 80; ++round) {
    if (!newton_center(p, t, x)) {
      res.status = Status::NumericalError;
      break;
    }
    if (static_cast<double>(m) / t < 0.1 * tol) {
      res.status = Status::Optimal;
      break;
    }
    t *= 20.0;
  }
  if (res.status == Status::NumericalError && static_cast<double>(m) / t < 1e-4)
    res.status = Status::MaxIter;

  res.x = x;
  res.objective = scale * objective(p, x);

  // Polish the dual estimate: least-squares multipliers over the active set
  // give the true first-order residual at x (barrier multipliers 1/(t s)
  // inherit the centering error and overstate it).
  res.multipliers.assign(m, 0.0);
  VecR stat_grad = p.p.size() > 0 ? VecR(p.p * x - p.q) : VecR(-p.q);
  std::vector<int> active;
  for (int i = 0; i < m; ++i) {
    double s = -p.ineqs[i].eval(x);
    double act_tol = std::sqrt(static_cast<double>(m) / t) * (1.0 + std::abs(p.ineqs[i].c));
    if (s <= act_tol) active.push_back(i);
  }
  for (int round = 0; round < m + 1 && !active.empty(); ++round) {
    MatR j(n, static_cast<int>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) j.col(static_cast<int>(k)) = p.ineqs[active[k]].grad(x);
    VecR lam = j.colPivHouseholderQr().solve(-stat_grad);
    int worst = -1;
    for (int k = 0; k < lam.size(); ++k)
      if (lam(k) < 0.0 && (worst < 0 || lam(k) < lam(worst))) worst = k;
    if (worst < 0) {
      for (int k = 0; k < lam.size(); ++k) res.multipliers[active[k]] = scale * lam(k);
      stat_grad += j * lam;
      break;
    }
    active.erase(active.begin() + worst);
  }
  res.kkt_residual = stat_grad.norm() / (1.0 + p.q.norm());
  return res;
}

// ---------------------------------------------------------------------------
// Complex carrier: concave quadratic objective over a complex vector plus
// optional trailing real variables, convex quadratic/affine constraints.
//   maximize  w^H Q w + 2 Re{a^H w} + f' y
//   s.t.      w^H S_j w + 2 Re{g_j^H w} + h_j' y <= c_j
// with Q negative semidefinite and each S_j PSD. Internally mapped onto the
// real core via x = [Re w; Im w; y].
// ---------------------------------------------------------------------------

struct QcqpConstraint {
  MatC s;   // PSD or empty
  VecC g;   // may be empty
  VecR h;   // may be empty
  double c = 0.0;
};

struct QcqpProblem {
  int complex_dim = 0;
  int real_dim = 0;
  MatC q_quad;  // NSD or empty
  VecC q_lin;   // may be empty
  VecR q_real;  // may be empty
  std::vector<QcqpConstraint> constraints;

  void validate() const {
    if (q_quad.size() > 0) {
      require_hermitian(q_quad, 1e-9, "qcqp objective");
      Eigen::SelfAdjointEigenSolver<MatC> es(symmetrize(q_quad), Eigen::EigenvaluesOnly);
      if (es.eigenvalues().maxCoeff() > 1e-8 * std::max(1.0, q_quad.norm()))
        throw std::invalid_argument("qcqp: objective Hessian not negative semidefinite");
    }
    for (const auto& con : constraints) {
      if (con.s.size() > 0) {
        require_hermitian(con.s, 1e-9, "qcqp constraint");
        Eigen::SelfAdjointEigenSolver<MatC> es(symmetrize(con.s), Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-8 * std::max(1.0, con.s.norm()))
          throw std::invalid_argument("qcqp: constraint quadratic form not PSD");
      }
    }
  }
};

struct QcqpResult {
  VecC w;
  VecR y;
  Status status = Status::NumericalError;
  double objective = 0.0;
  double kkt_residual = std::numeric_limits<double>::infinity();
};

namespace detail_qcqp {

// [[Re S, -Im S], [Im S, Re S]] -- the real form of w -> S w.
inline MatR real_embed(const MatC& s) {
  const int n = static_cast<int>(s.rows());
  MatR t(2 * n, 2 * n);
  t.topLeftCorner(n, n) = s.real();
  t.topRightCorner(n, n) = -s.imag();
  t.bottomLeftCorner(n, n) = s.imag();
  t.bottomRightCorner(n, n) = s.real();
  return t;
}

inline VecR real_embed(const VecC& v) {
  const int n = static_cast<int>(v.size());
  VecR r(2 * n);
  r.head(n) = v.real();
  r.tail(n) = v.imag();
  return r;
}

}  // namespace detail_qcqp

inline QcqpResult solve_qcqp(const QcqpProblem& prob, double tol, const VecC& w0 = VecC(),
                             const VecR& y0 = VecR()) {
  prob.validate();
  const int n = prob.complex_dim;
  const int r = prob.real_dim;
  const int dim = 2 * n + r;

  RealQcqp p;
  p.dim = dim;
  p.p = MatR::Zero(dim, dim);
  if (prob.q_quad.size() > 0) p.p.topLeftCorner(2 * n, 2 * n) = -2.0 * detail_qcqp::real_embed(prob.q_quad);
  p.q = VecR::Zero(dim);
  if (prob.q_lin.size() > 0) p.q.head(2 * n) = 2.0 * detail_qcqp::real_embed(prob.q_lin);
  if (prob.q_real.size() > 0) p.q.tail(r) = prob.q_real;
  for (const auto& con : prob.constraints) {
    RealQuadConstraint g;
    if (con.s.size() > 0) {
      g.a = MatR::Zero(dim, dim);
      g.a.topLeftCorner(2 * n, 2 * n) = 2.0 * detail_qcqp::real_embed(con.s);
    }
    g.b = VecR::Zero(dim);
    if (con.g.size() > 0) g.b.head(2 * n) = 2.0 * detail_qcqp::real_embed(con.g);
    if (con.h.size() > 0) g.b.tail(r) = con.h;
    g.c = con.c;
    p.ineqs.push_back(std::move(g));
  }

  VecR x0;
  if (w0.size() == n && (r == 0 || y0.size() == r)) {
    x0 = VecR::Zero(dim);
    x0.head(2 * n) = detail_qcqp::real_embed(w0);
    if (r > 0) x0.tail(r) = y0;
  }
  RealQcqpResult rr = solve_qcqp_real(p, tol, x0);

  QcqpResult out;
  out.status = rr.status;
  out.objective = rr.objective;
  out.kkt_residual = rr.kkt_residual;
  out.w.resize(n);
  for (int i = 0; i < n; ++i) out.w(i) = cxd(rr.x(i), rr.x(n + i));
  out.y = rr.x.tail(r);
  return out;
}

}  // namespace starisac
