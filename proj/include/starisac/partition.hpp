#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "starisac/qcqp.hpp"
#include "starisac/types.hpp"

namespace starisac {

// The preparation-stage surrogate as a function of the (relaxed) partition
// vector b. Only outdoor users depend on b; indoor terms enter as a constant.
// Through phi_R = b o phi_tilde the quadratic forms become b' S b with
// S[k][h](i,j) = Re{ conj(phi_i) E_{k,h}(i,j) phi_j }, real symmetric PSD.
struct PartitionRateModel {
  std::vector<std::vector<MatR>> s;  // per outdoor user: row over all beams h
  VecR tau, rho;                     // outdoor users' auxiliaries
  double noise = 0.0;
  double constant = 0.0;             // indoor + tau-only terms, in bit/s/Hz

  int dim() const { return s.empty() ? 0 : static_cast<int>(s[0][0].rows()); }

  double value(const VecR& b) const {
    double v = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      double num = std::max(b.dot(s[k][k] * b), 0.0);
      double den = noise;
      for (const auto& skh : s[k]) den += std::max(b.dot(skh * b), 0.0);
      v += std::log1p(tau(k)) - tau(k) + 2.0 * rho(k) * std::sqrt((1.0 + tau(k)) * num) -
           rho(k) * rho(k) * den;
    }
    return constant + v / 0.6931471805599453;
  }
};

inline MatR hadamard_real_form(const MatC& e, const VecC& phi) {
  const int n = static_cast<int>(e.rows());
  MatR s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s(i, j) = std::real(std::conj(phi(i)) * e(i, j) * phi(j));
  return 0.5 * (s + s.transpose());
}

// Binarity penalty chi(b) = sum_n (b_n - b_n^2); zero exactly on binary b.
inline double binarity_penalty(const VecR& b) {
  double v = 0.0;
  for (int i = 0; i < b.size(); ++i) v += b(i) - b(i) * b(i);
  return v;
}

// Affine majorant of chi at b0 (the concave part -b^2 linearized).
inline double binarity_penalty_linearized(const VecR& b, const VecR& b0) {
  double v = 0.0;
  for (int i = 0; i < b.size(); ++i) v += b(i) - b0(i) * b0(i) - 2.0 * b0(i) * (b(i) - b0(i));
  return v;
}

struct PartitionResult {
  VecR b;
  Status status = Status::Optimal;
  int iterations = 0;
  double penalized_objective = 0.0;
};

// SCA on the penalized relaxation: square roots minorized by tangents,
// penalty majorized by its linearization, each subproblem a concave QP
// over the box [0,1]^N.
inline PartitionResult partition_sca(const PartitionRateModel& model, double kappa, const VecR& b0,
                                     int max_iters, double tol, double qcqp_tol = 1e-9) {
  const int n = model.dim() > 0 ? model.dim() : static_cast<int>(b0.size());
  if (b0.size() != n) throw std::invalid_argument("partition_sca: start vector dimension mismatch");
  if (kappa < 0.0) throw std::invalid_argument("partition_sca: penalty weight must be >= 0");
  const double ln2 = 0.6931471805599453;

  PartitionResult res;
  VecR b = b0.cwiseMax(0.0).cwiseMin(1.0);
  auto penalized = [&](const VecR& x) { return model.value(x) - kappa * binarity_penalty(x); };
  double best = penalized(b);
  res.b = b;
  res.penalized_objective = best;

  for (int it = 0; it < max_iters; ++it) {
    res.iterations = it + 1;
    // concave quadratic surrogate at b
    MatR quad = MatR::Zero(n, n);
    VecR lin = VecR::Zero(n);
    for (std::size_t k = 0; k < model.s.size(); ++k) {
      double p = std::max(b.dot(model.s[k][k] * b), 0.0);
      if (p > 0.0 && model.rho(k) > 0.0)
        lin += 2.0 * model.rho(k) * std::sqrt(1.0 + model.tau(k)) / std::sqrt(p) *
               (model.s[k][k] * b) / ln2;
      for (const auto& skh : model.s[k]) quad += model.rho(k) * model.rho(k) * skh / ln2;
    }
    for (int i = 0; i < n; ++i) lin(i) -= kappa * (1.0 - 2.0 * b(i));

    RealQcqp qp;
    qp.dim = n;
    qp.p = quad + quad.transpose();  // maximize -x'Px/2 + q'x with P = 2*quad
    qp.q = lin;
    for (int i = 0; i < n; ++i) {
      RealQuadConstraint up;
      up.b = VecR::Zero(n);
      up.b(i) = 1.0;
      up.c = 1.0;
      qp.ineqs.push_back(up);
      RealQuadConstraint lo;
      lo.b = VecR::Zero(n);
      lo.b(i) = -1.0;
      lo.c = 0.0;
      qp.ineqs.push_back(lo);
    }
    VecR start = b.cwiseMax(1e-6).cwiseMin(1.0 - 1e-6);
    RealQcqpResult qr = solve_qcqp_real(qp, qcqp_tol, start);
    if (qr.status != Status::Optimal && qr.status != Status::MaxIter) {
      res.status = qr.status;
      return res;
    }
    VecR cand = qr.x.cwiseMax(0.0).cwiseMin(1.0);
    double val = penalized(cand);
    double prev = penalized(b);
    if (val >= best) {
      best = val;
      res.b = cand;
      res.penalized_objective = val;
    }
    b = cand;
    if (std::abs(val - prev) <= tol * (1.0 + std::abs(val))) break;
  }
  return res;
}

// Cardinality-constrained binarization: ones at the n_part largest entries
// (lowest index wins ties), the Euclidean projection onto the binary set
// with fixed L1 norm.
inline VecR project_topk(const VecR& b_relaxed, int n_part) {
  const int n = static_cast<int>(b_relaxed.size());
  if (n_part < 0 || n_part > n) throw std::invalid_argument("project_topk: cardinality out of range");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int c) { return b_relaxed(a) > b_relaxed(c); });
  VecR b = VecR::Zero(n);
  for (int i = 0; i < n_part; ++i) b(idx[i]) = 1.0;
  return b;
}

}  // namespace starisac
