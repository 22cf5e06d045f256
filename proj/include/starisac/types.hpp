#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace starisac {

using cxd = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using MatR = Eigen::MatrixXd;
using VecR = Eigen::VectorXd;
using VecI = Eigen::VectorXi;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cxd kJ{0.0, 1.0};

// Solver / pipeline outcome shared by all iterative routines.
enum class Status { Optimal, MaxIter, Infeasible, NumericalError };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::MaxIter: return "max_iter";
    case Status::Infeasible: return "infeasible";
    case Status::NumericalError: return "numerical_error";
  }
  return "unknown";
}

// dB <-> linear conversions (power quantities).
inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin_to_db(double lin) { return 10.0 * std::log10(lin); }
// dBm -> watts.
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Real inner product on the space of complex matrices, <A,B> = Re tr(A^H B).
inline double herm_inner(const MatC& a, const MatC& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

// Frobenius-relative deviation from conjugate symmetry.
inline double hermiticity_error(const MatC& a) {
  double n = a.norm();
  if (n == 0.0) return 0.0;
  return (a - a.adjoint()).norm() / n;
}

inline void require_hermitian(const MatC& a, double tol, const std::string& who) {
  if (a.rows() != a.cols()) throw std::invalid_argument(who + ": matrix not square");
  if (hermiticity_error(a) > tol)
    throw std::invalid_argument(who + ": matrix not Hermitian within tolerance");
}

// (A + A^H)/2, used to clean up accumulated round-off.
inline MatC symmetrize(const MatC& a) { return 0.5 * (a + a.adjoint()); }

}  // namespace starisac
