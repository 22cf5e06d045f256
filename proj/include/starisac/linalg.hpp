#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>
#include <vector>

#include "starisac/types.hpp"

namespace starisac {

struct EigResult {
  VecR eigenvalues;  // sorted descending
  MatC eigenvectors; // unitary columns, column i pairs with eigenvalues(i)
};

// Hermitian eigendecomposition: Householder tridiagonalization + implicit
// QL/QR sweeps (Eigen's SelfAdjointEigenSolver), re-ordered descending.
// Equal eigenvalues keep the stable order of the underlying sweep.
inline EigResult eig_hermitian(const MatC& a, double herm_tol = 1e-10) {
  require_hermitian(a, herm_tol, "eig_hermitian");
  Eigen::SelfAdjointEigenSolver<MatC> es(symmetrize(a));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eig_hermitian: decomposition failed to converge");
  const int n = static_cast<int>(a.rows());
  EigResult r;
  r.eigenvalues.resize(n);
  r.eigenvectors.resize(n, n);
  // Eigen returns ascending; reverse to descending.
  for (int i = 0; i < n; ++i) {
    r.eigenvalues(i) = es.eigenvalues()(n - 1 - i);
    r.eigenvectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return r;
}

inline double min_eigenvalue(const MatC& a) {
  Eigen::SelfAdjointEigenSolver<MatC> es(symmetrize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Projection onto the PSD cone (eigenvalue clipping).
inline MatC psd_project(const MatC& a) {
  Eigen::SelfAdjointEigenSolver<MatC> es(symmetrize(a));
  VecR lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

// Hermitian square root of a PSD matrix; small negative eigenvalues from
// round-off are clipped to zero.
inline MatC herm_sqrt(const MatC& a) {
  Eigen::SelfAdjointEigenSolver<MatC> es(symmetrize(a));
  VecR lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace starisac
