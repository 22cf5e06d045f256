#pragma once

#include <vector>

#include "starisac/fp.hpp"
#include "starisac/linalg.hpp"
#include "starisac/qcqp.hpp"
#include "starisac/types.hpp"

namespace starisac {

// Sensing constraint data for the preparation-stage beamformer:
// f_k(W) = sum_h w_h^H P_k w_h >= rhs_k with
// P_k = H1^H {Phi_R^p}^* R_sense,k Phi_R^p H1 and
// rhs_k = delta_sens N_s sigma_ns^2 / |alpha_k|^2.
struct SensingConstraintData {
  std::vector<MatC> p;
  std::vector<double> rhs;

  int count() const { return static_cast<int>(p.size()); }
};

inline SensingConstraintData make_sensing_constraints(const std::vector<MatC>& r_sense,
                                                      const VecC& phi_r, const MatC& h1,
                                                      double delta_sens, int ns, double noise_s,
                                                      double alpha_sq) {
  SensingConstraintData d;
  for (const auto& rs : r_sense) {
    d.p.push_back(effective_gram(rs, phi_r, h1));
    d.rhs.push_back(delta_sens * ns * noise_s / alpha_sq);
  }
  return d;
}

inline double sensing_value(const SensingConstraintData& sc, int k, const MatC& w) {
  double f = 0.0;
  for (int h = 0; h < w.cols(); ++h)
    f += std::max((w.col(h).adjoint() * sc.p[k] * w.col(h))(0).real(), 0.0);
  return f;
}

struct BeamformResult {
  MatC w;
  Status status = Status::NumericalError;
  double objective = 0.0;  // objective_q at the returned beamformer
  int iterations = 0;
  double kkt_residual = 0.0;           // max over the inner QCQP solves
  std::vector<double> sensing_values;  // f_k at the returned beamformer (diagnostics)
};

// Principal-eigenvector start scaled to the power budget.
inline MatC matched_filter_start(const StageRateData& d, double pmax) {
  const int k_total = static_cast<int>(d.gram.size());
  const int m = static_cast<int>(d.gram[0].rows());
  MatC w(m, k_total);
  for (int k = 0; k < k_total; ++k) {
    EigResult e = eig_hermitian(d.gram[k]);
    w.col(k) = e.eigenvectors.col(0) * std::sqrt(pmax / k_total);
  }
  return w;
}

namespace detail_bf {

inline VecC stack(const MatC& w) {
  VecC v(w.size());
  for (int k = 0; k < w.cols(); ++k) v.segment(k * w.rows(), w.rows()) = w.col(k);
  return v;
}

inline MatC unstack(const VecC& v, int m, int k_total) {
  MatC w(m, k_total);
  for (int k = 0; k < k_total; ++k) w.col(k) = v.segment(k * m, m);
  return w;
}

// One convex QCQP: maximize the minorant at w0 subject to the power ball,
// the sensing constraints linearized at w0, and optional per-user
// minimum-SINR constraints linearized at w0 (surrogate-level).
inline QcqpResult solve_inner(const StageRateData& d, const VecR& tau, const VecR& rho,
                              const MatC& w0, double pmax, const SensingConstraintData* sc,
                              double min_rate_gamma, double qcqp_tol) {
  const int m = static_cast<int>(w0.rows());
  const int k_total = static_cast<int>(w0.cols());
  const int dim = m * k_total;
  BeamformSurrogate s = beamform_surrogate(d, tau, rho, w0);

  QcqpProblem prob;
  prob.complex_dim = dim;
  prob.q_quad = MatC::Zero(dim, dim);
  prob.q_lin = VecC::Zero(dim);
  for (int k = 0; k < k_total; ++k) {
    prob.q_quad.block(k * m, k * m, m, m) = -s.quad;
    prob.q_lin.segment(k * m, m) = s.lin[k];
  }

  QcqpConstraint ball;
  ball.s = MatC::Identity(dim, dim);
  ball.c = pmax;
  prob.constraints.push_back(ball);

  if (sc) {
    for (int k = 0; k < sc->count(); ++k) {
      if (sc->rhs[k] <= 0.0) continue;
      QcqpConstraint con;
      con.g = VecC::Zero(dim);
      double c0 = 0.0;
      for (int h = 0; h < k_total; ++h) {
        VecC ph = sc->p[k] * w0.col(h);
        con.g.segment(h * m, m) = -ph;
        c0 += (w0.col(h).adjoint() * sc->p[k] * w0.col(h))(0).real();
      }
      con.c = -(sc->rhs[k] + c0);
      prob.constraints.push_back(con);
    }
  }

  if (min_rate_gamma > 0.0) {
    for (int k = 0; k < k_total; ++k) {
      // gamma_k >= g:  g*(interference + noise) - affine lower bound of the
      // signal quadratic <= 0
      QcqpConstraint con;
      con.s = MatC::Zero(dim, dim);
      for (int h = 0; h < k_total; ++h)
        if (h != k) con.s.block(h * m, h * m, m, m) = min_rate_gamma * d.gram[k];
      con.g = VecC::Zero(dim);
      con.g.segment(k * m, m) = -(d.gram[k] * w0.col(k));
      double s0 = (w0.col(k).adjoint() * d.gram[k] * w0.col(k))(0).real();
      con.c = s0 - min_rate_gamma * d.noise;
      prob.constraints.push_back(con);
    }
  }

  // keep the warm start strictly inside the ball
  MatC ws = w0;
  double p0 = ws.squaredNorm();
  if (p0 >= pmax) ws *= std::sqrt(std::max(pmax, 0.0) / p0) * (1.0 - 1e-9);
  return solve_qcqp(prob, qcqp_tol, stack(ws));
}

}  // namespace detail_bf

// Communication-stage beamforming: maximize the quadratic-transform
// surrogate under the sum power constraint alone, by successive
// tangent-minorant QCQPs (monotone in objective_q, tight at each iterate).
inline BeamformResult beamform_comm(const StageRateData& d, const VecR& tau, const VecR& rho,
                                    double pmax, const MatC& w0, int max_iters, double tol,
                                    double qcqp_tol, double min_rate_gamma = 0.0) {
  BeamformResult res;
  const int m = static_cast<int>(d.gram[0].rows());
  const int k_total = static_cast<int>(d.gram.size());
  if (pmax <= 0.0) {
    res.w = MatC::Zero(m, k_total);
    res.status = Status::Optimal;
    res.objective = objective_q(d, res.w, tau, rho);
    return res;
  }
  MatC w = w0;
  double best = objective_q(d, w, tau, rho);
  res.w = w;
  res.objective = best;
  for (int it = 0; it < max_iters; ++it) {
    res.iterations = it + 1;
    QcqpResult q = detail_bf::solve_inner(d, tau, rho, w, pmax, nullptr, min_rate_gamma, qcqp_tol);
    if (q.status != Status::Optimal && q.status != Status::MaxIter) {
      res.status = q.status;
      return res;
    }
    res.kkt_residual = std::max(res.kkt_residual, q.kkt_residual);
    MatC cand = detail_bf::unstack(q.w, m, k_total);
    double val = objective_q(d, cand, tau, rho);
    if (val >= best) {
      best = val;
      res.w = cand;
      res.objective = val;
    }
    double prev = objective_q(d, w, tau, rho);
    w = cand;
    if (std::abs(val - prev) <= tol * (1.0 + std::abs(val))) break;
  }
  res.status = Status::Optimal;
  return res;
}

// Preparation-stage beamforming with the sensing constraint under SCA.
// A warm start violating the constraint first goes through a
// max-min-slack restoration phase driven by the same linearization.
inline BeamformResult beamform_prep_sca(const StageRateData& d, const VecR& tau, const VecR& rho,
                                        const SensingConstraintData& sc, double pmax, const MatC& w0,
                                        int max_iters, double tol, double qcqp_tol) {
  BeamformResult res;
  const int m = static_cast<int>(d.gram[0].rows());
  const int k_total = static_cast<int>(d.gram.size());
  if (pmax <= 0.0) {
    res.w = MatC::Zero(m, k_total);
    bool need = false;
    for (int k = 0; k < sc.count(); ++k) need = need || sc.rhs[k] > 0.0;
    res.status = need ? Status::Infeasible : Status::Optimal;
    res.objective = objective_q(d, res.w, tau, rho);
    return res;
  }

  bool active = false;
  for (int k = 0; k < sc.count(); ++k) active = active || sc.rhs[k] > 0.0;
  if (!active) return beamform_comm(d, tau, rho, pmax, w0, max_iters, tol, qcqp_tol);

  MatC w = w0;
  auto min_ratio = [&](const MatC& wm) {
    double r = std::numeric_limits<double>::infinity();
    for (int k = 0; k < sc.count(); ++k)
      if (sc.rhs[k] > 0.0) r = std::min(r, sensing_value(sc, k, wm) / sc.rhs[k]);
    return r;
  };

  // Restoration: maximize t with affine_k(W; W_i) >= t * rhs_k, power cap.
  if (min_ratio(w) < 1.0) {
    const int dim = m * k_total;
    for (int it = 0; it < max_iters && min_ratio(w) < 1.0; ++it) {
      QcqpProblem prob;
      prob.complex_dim = dim;
      prob.real_dim = 1;
      prob.q_real = VecR::Constant(1, 1.0);
      QcqpConstraint ball;
      ball.s = MatC::Identity(dim, dim);
      ball.c = pmax;
      prob.constraints.push_back(ball);
      for (int k = 0; k < sc.count(); ++k) {
        if (sc.rhs[k] <= 0.0) continue;
        QcqpConstraint con;
        con.g = VecC::Zero(dim);
        double c0 = 0.0;
        for (int h = 0; h < k_total; ++h) {
          con.g.segment(h * m, m) = -(sc.p[k] * w.col(h));
          c0 += (w.col(h).adjoint() * sc.p[k] * w.col(h))(0).real();
        }
        con.h = VecR::Constant(1, sc.rhs[k]);
        con.c = c0;  // -2Re{..} + t*rhs <= c0  <=>  affine >= t*rhs
        prob.constraints.push_back(con);
      }
      // cap t to keep the problem bounded
      QcqpConstraint tcap;
      tcap.h = VecR::Constant(1, 1.0);
      tcap.c = 10.0;
      prob.constraints.push_back(tcap);

      MatC ws = w;
      double p0 = ws.squaredNorm();
      if (p0 >= pmax) ws *= std::sqrt(pmax / p0) * (1.0 - 1e-9);
      QcqpResult q = solve_qcqp(prob, qcqp_tol, detail_bf::stack(ws), VecR::Zero(1));
      if (q.status != Status::Optimal && q.status != Status::MaxIter) break;
      MatC cand = detail_bf::unstack(q.w, m, k_total);
      if (min_ratio(cand) <= min_ratio(w) * (1.0 + 1e-9) && it > 0) {
        w = min_ratio(cand) > min_ratio(w) ? cand : w;
        break;  // stalled
      }
      w = cand;
    }
    if (min_ratio(w) < 1.0 - 1e-6) {
      res.status = Status::Infeasible;
      res.w = w;
      res.objective = objective_q(d, w, tau, rho);
      for (int k = 0; k < sc.count(); ++k) res.sensing_values.push_back(sensing_value(sc, k, w));
      return res;
    }
  }

  // Rate maximization keeping every iterate feasible (affine inner set).
  double best = objective_q(d, w, tau, rho);
  res.w = w;
  res.objective = best;
  for (int it = 0; it < max_iters; ++it) {
    res.iterations = it + 1;
    QcqpResult q = detail_bf::solve_inner(d, tau, rho, w, pmax, &sc, 0.0, qcqp_tol);
    if (q.status != Status::Optimal && q.status != Status::MaxIter) break;
    res.kkt_residual = std::max(res.kkt_residual, q.kkt_residual);
    MatC cand = detail_bf::unstack(q.w, m, k_total);
    if (min_ratio(cand) < 1.0 - 1e-9) break;  // numerical slip; keep last feasible
    double val = objective_q(d, cand, tau, rho);
    double prev = objective_q(d, w, tau, rho);
    if (val >= best) {
      best = val;
      res.w = cand;
      res.objective = val;
    }
    w = cand;
    if (std::abs(val - prev) <= tol * (1.0 + std::abs(val))) break;
  }
  res.status = Status::Optimal;
  for (int k = 0; k < sc.count(); ++k) res.sensing_values.push_back(sensing_value(sc, k, res.w));
  return res;
}

}  // namespace starisac
