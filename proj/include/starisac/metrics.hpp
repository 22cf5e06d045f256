#pragma once

#include <cmath>
#include <vector>

#include "starisac/channel.hpp"
#include "starisac/expectation.hpp"
#include "starisac/types.hpp"

namespace starisac {

// G = H1^H diag(phi)^* R diag(phi) H1, the M x M gram through which every
// rate expression sees the beamformer. R rank-one (exact channel) and R from
// the expectation module share this path.
inline MatC effective_gram(const MatC& r, const VecC& phi, const MatC& h1) {
  MatC rp = phi.conjugate().asDiagonal() * r * phi.asDiagonal() * h1;
  return symmetrize(h1.adjoint() * rp);
}

// Exact SINR (9): |h2^H Phi H1 w_k|^2 / (sum_{h != k} |h2^H Phi H1 w_h|^2 + noise).
inline double sinr(int k, const MatC& w, const VecC& phi, const MatC& h1, const VecC& h2,
                   double noise) {
  Eigen::RowVectorXcd row = h2.adjoint() * phi.asDiagonal() * h1;
  double num = 0.0, interf = 0.0;
  for (int h = 0; h < w.cols(); ++h) {
    double p = std::norm((row * w.col(h))(0));
    if (h == k)
      num = p;
    else
      interf += p;
  }
  double den = interf + noise;
  if (den == 0.0) throw std::invalid_argument("sinr: zero noise and zero interference");
  return num / den;
}

// First-order average SINR (ave-9): ratio of expectations through R^v(k).
inline double avg_sinr_approx(int k, const MatC& w, const VecC& phi, const MatC& r,
                              const MatC& h1, double noise) {
  MatC g = effective_gram(r, phi, h1);
  double num = 0.0, interf = 0.0;
  for (int h = 0; h < w.cols(); ++h) {
    double p = (w.col(h).adjoint() * g * w.col(h))(0).real();
    if (h == k)
      num = std::max(p, 0.0);
    else
      interf += std::max(p, 0.0);
  }
  double den = interf + noise;
  if (den == 0.0) throw std::invalid_argument("avg_sinr_approx: zero noise and zero interference");
  return num / den;
}

inline double sum_rate(const std::vector<double>& gammas) {
  double r = 0.0;
  for (double g : gammas) r += std::log2(1.0 + g);
  return r;
}

// R = eta * R_prep + (1 - eta) * R_comm.
inline double total_rate(double eta, double rate_prep, double rate_comm) {
  return eta * rate_prep + (1.0 - eta) * rate_comm;
}

// Average sensing SNR in trace form (ave-11).
inline double assnr_trace(const MatC& r_sense, const VecC& phi_r, const MatC& h1, const MatC& w,
                          double alpha_sq, int ns, double noise_s) {
  MatC g = effective_gram(r_sense, phi_r, h1);
  double tr = (w.adjoint() * g * w).trace().real();
  return alpha_sq / (ns * noise_s) * tr;
}

// Same quantity through the Hadamard matrix D_k (ave-11-Hadamard).
inline double assnr_quadratic(const MatC& d, const VecC& phi_r, double alpha_sq, int ns,
                              double noise_s) {
  double q = (phi_r.adjoint() * d * phi_r)(0).real();
  return alpha_sq / (ns * noise_s) * q;
}

// tr(W W^H) = sum_k ||w_k||^2.
inline double transmit_power(const MatC& w) { return w.squaredNorm(); }

// ---------------------------------------------------------------------------
// Monte-Carlo evaluation under the true angle-error distribution: the
// realized average rate E[sum_k log2(1 + gamma_k(eps))] with indoor users
// exact and outdoor rows redrawn as c_los a(mean+eps) + c_nlos h_nlos.
// ---------------------------------------------------------------------------

struct TrueRateResult {
  double mean_rate = 0.0;
  std::vector<double> per_user;  // mean per-user rate
};

inline TrueRateResult evaluate_true_rate(const SystemConfig& cfg, const ChannelSet& cs,
                                         const AngleStats& stats, const MatC& w, const VecC& phi_t,
                                         const VecC& phi_r, int draws, std::uint64_t seed,
                                         std::uint64_t substream_tag) {
  stats.validate();
  const int k_total = cs.users_total();
  const double noise = cfg.noise_user_watt();
  TrueRateResult out;
  out.per_user.assign(k_total, 0.0);

  // indoor users are deterministic; compute once
  for (int k = 0; k < cs.users_indoor; ++k)
    out.per_user[k] = std::log2(1.0 + sinr(k, w, phi_t, cs.h1, cs.h2(k), noise));

  if (cs.users_indoor < k_total) {
    std::vector<VecC> h2_draw(k_total);
    for (int d = 0; d < draws; ++d) {
      for (int k = cs.users_indoor; k < k_total; ++k) {
        CounterRng rng(seed, CounterRng::substream(stream::kEvaluation, k, substream_tag));
        double e = stats.elev_mean[k] + stats.elev_sigma[k] * rng.normal(2 * d);
        double a = stats.azim_mean[k] + stats.azim_sigma[k] * rng.normal(2 * d + 1);
        double c_los = 0.0, c_nlos = 0.0;
        cs.out_mixing(k, cfg.rice_h2_out, c_los, c_nlos);
        h2_draw[k] = c_los * steering_star(e, a, cfg.star_nx, cfg.star_nz) +
                     c_nlos * cs.h2_nlos_row(k);
      }
      for (int k = cs.users_indoor; k < k_total; ++k) {
        // interference rows use each user's own channel draw
        Eigen::RowVectorXcd row = h2_draw[k].adjoint() * phi_r.asDiagonal() * cs.h1;
        double num = 0.0, interf = 0.0;
        for (int h = 0; h < w.cols(); ++h) {
          double p = std::norm((row * w.col(h))(0));
          if (h == k)
            num = p;
          else
            interf += p;
        }
        out.per_user[k] += std::log2(1.0 + num / (interf + noise)) / draws;
      }
    }
  }
  for (double r : out.per_user) out.mean_rate += r;
  return out;
}

// Monte-Carlo evaluation of the average sensing SNR (ave-11) for one outdoor
// user, used by the feasibility audits.
inline double evaluate_true_assnr(const SystemConfig& cfg, const ChannelSet& cs,
                                  const AngleStats& stats, int k, const MatC& w, const VecC& phi_r,
                                  int draws, std::uint64_t seed) {
  stats.validate();
  CounterRng rng(seed, CounterRng::substream(stream::kEvaluation, k, 77));
  const double alpha_sq = cfg.alpha_sq();
  const double ns = cfg.sensor_elements;
  const double noise_s = cfg.noise_sensor_watt();
  double acc = 0.0;
  for (int d = 0; d < draws; ++d) {
    double e = stats.elev_mean[k] + stats.elev_sigma[k] * rng.normal(2 * d);
    double a = stats.azim_mean[k] + stats.azim_sigma[k] * rng.normal(2 * d + 1);
    VecC a_star = steering_star(e, a, cfg.star_nx, cfg.star_nz);
    VecC a_s = steering_sensor(e, a, cfg.sensor_elements);
    MatC echo = a_s * (a_star.adjoint() * phi_r.asDiagonal() * cs.h1 * w);
    acc += alpha_sq * echo.squaredNorm() / (ns * noise_s);
  }
  return acc / draws;
}

}  // namespace starisac
