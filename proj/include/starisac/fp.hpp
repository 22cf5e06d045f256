#pragma once

#include <cmath>
#include <vector>

#include "starisac/expectation.hpp"
#include "starisac/metrics.hpp"
#include "starisac/types.hpp"

namespace starisac {

// Auxiliary variables of the Lagrangian dual (tau) and quadratic (rho)
// transforms, one entry per user, per stage.
struct FpState {
  VecR tau;
  VecR rho;
};

// Per-stage rate data: the gram G_k = H1^H Phi(k)^* R^v(k) Phi(k) H1 through
// which the surrogate sees the beamformer, plus the user noise power.
struct StageRateData {
  std::vector<MatC> gram;
  double noise = 0.0;
};

inline StageRateData make_stage_rate_data(const std::vector<MatC>& r, const VecC& phi_t,
                                          const VecC& phi_r, const MatC& h1, int users_indoor,
                                          double noise) {
  StageRateData d;
  d.noise = noise;
  d.gram.reserve(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) {
    const VecC& phi = static_cast<int>(k) < users_indoor ? phi_t : phi_r;
    d.gram.push_back(effective_gram(r[k], phi, h1));
  }
  return d;
}

namespace detail_fp {

constexpr double kLn2 = 0.6931471805599453;

inline double quad(const MatC& g, const VecC& w) {
  return std::max((w.adjoint() * g * w)(0).real(), 0.0);
}

// num_k = w_k^H G_k w_k and den_k = sum_h w_h^H G_k w_h + noise.
inline void ratio_parts(const StageRateData& d, const MatC& w, VecR& num, VecR& den) {
  const int k_total = static_cast<int>(d.gram.size());
  num.resize(k_total);
  den.resize(k_total);
  for (int k = 0; k < k_total; ++k) {
    double total = 0.0;
    for (int h = 0; h < w.cols(); ++h) {
      double p = quad(d.gram[k], w.col(h));
      if (h == k) num(k) = p;
      total += p;
    }
    den(k) = total + d.noise;
  }
}

}  // namespace detail_fp

// tau_k = gamma_k: the (average) SINR at the current point; the stationary
// point of the dual-transform objective in tau.
inline VecR update_tau(const StageRateData& d, const MatC& w) {
  VecR num, den;
  detail_fp::ratio_parts(d, w, num, den);
  VecR tau(num.size());
  for (int k = 0; k < num.size(); ++k) {
    double interf = den(k) - num(k);
    tau(k) = (num(k) > 0.0 && interf > 0.0) ? num(k) / interf : 0.0;
  }
  return tau;
}

// rho_k = sqrt((1 + tau_k) num_k) / den_k: the stationary point of the
// quadratic-transform surrogate in rho.
inline VecR update_rho(const StageRateData& d, const MatC& w, const VecR& tau) {
  VecR num, den;
  detail_fp::ratio_parts(d, w, num, den);
  VecR rho(num.size());
  for (int k = 0; k < num.size(); ++k)
    rho(k) = den(k) > 0.0 ? std::sqrt((1.0 + tau(k)) * num(k)) / den(k) : 0.0;
  return rho;
}

// Lagrangian-dual objective (sum-of-ratio form), in bit/s/Hz.
inline double objective_fp(const StageRateData& d, const MatC& w, const VecR& tau) {
  VecR num, den;
  detail_fp::ratio_parts(d, w, num, den);
  double v = 0.0;
  for (int k = 0; k < num.size(); ++k) {
    double ratio = den(k) > 0.0 ? (1.0 + tau(k)) * num(k) / den(k) : 0.0;
    v += std::log1p(tau(k)) - tau(k) + ratio;
  }
  return v / detail_fp::kLn2;
}

// Quadratic-transform surrogate (w-form), in bit/s/Hz.
inline double objective_q(const StageRateData& d, const MatC& w, const VecR& tau, const VecR& rho) {
  VecR num, den;
  detail_fp::ratio_parts(d, w, num, den);
  double v = 0.0;
  for (int k = 0; k < num.size(); ++k) {
    v += std::log1p(tau(k)) - tau(k) + 2.0 * rho(k) * std::sqrt((1.0 + tau(k)) * num(k)) -
         rho(k) * rho(k) * den(k);
  }
  return v / detail_fp::kLn2;
}

// The same surrogate evaluated in the phi-quadratic form through the
// Hadamard matrices E_{k,h}; agrees with objective_q at matching inputs.
inline double objective_q_phi(const std::vector<std::vector<MatC>>& e, const VecC& phi_t,
                              const VecC& phi_r, int users_indoor, double noise, const VecR& tau,
                              const VecR& rho) {
  const int k_total = static_cast<int>(e.size());
  double v = 0.0;
  for (int k = 0; k < k_total; ++k) {
    const VecC& phi = k < users_indoor ? phi_t : phi_r;
    double num = std::max((phi.adjoint() * e[k][k] * phi)(0).real(), 0.0);
    double den = noise;
    for (int h = 0; h < k_total; ++h)
      den += std::max((phi.adjoint() * e[k][h] * phi)(0).real(), 0.0);
    v += std::log1p(tau(k)) - tau(k) + 2.0 * rho(k) * std::sqrt((1.0 + tau(k)) * num) -
         rho(k) * rho(k) * den;
  }
  return v / detail_fp::kLn2;
}

// Jensen-style stage bound at the current point: sum_k log2(1 + gamma_k).
inline double bound_rate_value(const StageRateData& d, const MatC& w) {
  VecR tau = update_tau(d, w);
  double v = 0.0;
  for (int k = 0; k < tau.size(); ++k) v += std::log1p(tau(k));
  return v / detail_fp::kLn2;
}

// Concave-quadratic minorant of the surrogate for the beamformer update:
//   objective_q(W) >= const + sum_k 2 Re{lin_k^H w_k} - sum_k w_k^H quad w_k
// with equality at the expansion point. The square-root signal terms are
// minorized by their tangent planes; a user with zero signal power drops out.
struct BeamformSurrogate {
  std::vector<VecC> lin;  // per user k
  MatC quad;              // shared across columns: sum_k rho_k^2 G_k
};

inline BeamformSurrogate beamform_surrogate(const StageRateData& d, const VecR& tau,
                                            const VecR& rho, const MatC& w0) {
  BeamformSurrogate s;
  const int k_total = static_cast<int>(d.gram.size());
  const int m = static_cast<int>(w0.rows());
  s.quad = MatC::Zero(m, m);
  for (int k = 0; k < k_total; ++k) s.quad += rho(k) * rho(k) * d.gram[k];
  s.quad = symmetrize(s.quad);
  s.lin.resize(k_total);
  for (int k = 0; k < k_total; ++k) {
    double p = detail_fp::quad(d.gram[k], w0.col(k));
    if (p > 0.0 && rho(k) > 0.0) {
      s.lin[k] = rho(k) * std::sqrt(1.0 + tau(k)) / std::sqrt(p) * (d.gram[k] * w0.col(k));
    } else {
      s.lin[k] = VecC::Zero(m);
    }
  }
  return s;
}

// Value of the minorant at W (without the tau-only constant), in the same
// normalization as objective_q.
inline double beamform_surrogate_value(const BeamformSurrogate& s, const StageRateData& d,
                                       const VecR& tau, const VecR& rho, const MatC& w) {
  double v = 0.0;
  for (std::size_t k = 0; k < s.lin.size(); ++k) {
    v += std::log1p(tau(static_cast<int>(k))) - tau(static_cast<int>(k));
    v += 2.0 * (s.lin[k].adjoint() * w.col(static_cast<int>(k)))(0).real();
    v -= (w.col(static_cast<int>(k)).adjoint() * s.quad * w.col(static_cast<int>(k)))(0).real();
    v -= rho(static_cast<int>(k)) * rho(static_cast<int>(k)) * d.noise;
  }
  return v / detail_fp::kLn2;
}

}  // namespace starisac
