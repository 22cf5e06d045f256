#pragma once

#include <vector>

#include "starisac/channel.hpp"
#include "starisac/geometry.hpp"
#include "starisac/rng.hpp"
#include "starisac/types.hpp"

namespace starisac {

enum class Stage { Preparation, Communication };

inline const char* to_string(Stage s) { return s == Stage::Preparation ? "prep" : "comm"; }

// Angle knowledge for one stage: per user (indoor first) the mean direction
// used by the optimizer and the Gaussian error std. Indoor entries carry the
// exact directions with zero sigma.
struct AngleStats {
  std::vector<double> elev_mean, azim_mean;   // radians
  std::vector<double> elev_sigma, azim_sigma; // radians, >= 0

  int num_users() const { return static_cast<int>(elev_mean.size()); }

  void validate() const {
    std::size_t n = elev_mean.size();
    if (azim_mean.size() != n || elev_sigma.size() != n || azim_sigma.size() != n)
      throw std::invalid_argument("angle stats: ragged arrays");
    for (std::size_t i = 0; i < n; ++i)
      if (elev_sigma[i] < 0.0 || azim_sigma[i] < 0.0)
        throw std::invalid_argument("angle stats: negative sigma");
  }
};

struct SteeringMoments {
  MatC second;   // E[a a^H]
  VecC first;    // E[a]
  long samples = 0;
  long rejected = 0;
};

namespace detail_exp {

// Monte-Carlo moments of the STAR steering vector under Gaussian angle
// errors, truncated to elev in [0, pi], azim in [-pi/2, pi/2] by rejection.
// Sample count is raised adaptively (doubling up to `cap`) until the
// split-half Frobenius distance of E[a a^H] falls below `split_tol`.
inline SteeringMoments steering_moments(double elev_mean, double azim_mean, double elev_sigma,
                                        double azim_sigma, int nx, int nz, int base, int cap,
                                        double split_tol, const CounterRng& rng) {
  const int n = nx * nz;
  SteeringMoments out;
  if (elev_sigma == 0.0 && azim_sigma == 0.0) {
    VecC a = steering_star(elev_mean, azim_mean, nx, nz);
    out.second = a * a.adjoint();
    out.first = a;
    return out;
  }
  MatC m2_even = MatC::Zero(n, n), m2_odd = MatC::Zero(n, n);
  VecC m1 = VecC::Zero(n);
  long accepted = 0, attempts = 0;
  int target = std::max(base, 2);
  const long attempt_cap = 1000LL * cap;
  while (true) {
    while (accepted < target) {
      if (attempts >= attempt_cap)
        throw std::runtime_error("steering_moments: rejection rate too high; check angle ranges");
      double e = elev_mean + elev_sigma * rng.normal(2 * attempts);
      double a = azim_mean + azim_sigma * rng.normal(2 * attempts + 1);
      ++attempts;
      if (e < 0.0 || e > kPi || a < -kPi / 2 || a > kPi / 2) {
        ++out.rejected;
        continue;
      }
      VecC sv = steering_star(e, a, nx, nz);
      if (accepted % 2 == 0)
        m2_even.noalias() += sv * sv.adjoint();
      else
        m2_odd.noalias() += sv * sv.adjoint();
      m1 += sv;
      ++accepted;
    }
    MatC mean_even = m2_even / ((accepted + 1) / 2);
    MatC mean_odd = m2_odd / (accepted / 2);
    MatC mean_all = (m2_even + m2_odd) / accepted;
    double split = (mean_even - mean_odd).norm();
    if (split <= split_tol * mean_all.norm() || target >= cap) break;
    target = std::min(2 * target, cap);
  }
  out.second = symmetrize((m2_even + m2_odd) / accepted);
  out.first = m1 / static_cast<double>(accepted);
  out.samples = accepted;
  return out;
}

}  // namespace detail_exp

// E[h_{2,k} h_{2,k}^H] for an outdoor user: Monte-Carlo over angle errors
// with the NLoS part held fixed. Indoor users bypass the expectation and
// return the exact rank-one outer product.
inline MatC estimate_user_correlation(int k, const AngleStats& stats, const ChannelSet& cs,
                                      const SystemConfig& cfg, int samples, std::uint64_t seed,
                                      SteeringMoments* moments_out = nullptr) {
  if (samples < 1) throw std::invalid_argument("estimate_user_correlation: sample count must be >= 1");
  stats.validate();
  if (!cs.is_outdoor(k)) {
    VecC h = cs.h2(k);
    return h * h.adjoint();
  }
  CounterRng rng(seed, CounterRng::substream(stream::kExpectation, k, 1));
  SteeringMoments mom = detail_exp::steering_moments(
      stats.elev_mean[k], stats.azim_mean[k], stats.elev_sigma[k], stats.azim_sigma[k], cfg.star_nx,
      cfg.star_nz, samples, std::max(samples, cfg.mc_samples_max), cfg.mc_split_tol, rng);
  double c_los = 0.0, c_nlos = 0.0;
  cs.out_mixing(k, cfg.rice_h2_out, c_los, c_nlos);
  VecC hn = cs.h2_nlos_row(k) * c_nlos;
  MatC r = c_los * c_los * mom.second;
  r.noalias() += (c_los * mom.first) * hn.adjoint();
  r.noalias() += hn * (c_los * mom.first).adjoint();
  r.noalias() += hn * hn.adjoint();
  if (moments_out) *moments_out = mom;
  return symmetrize(r);
}

// E[ ||a_S||^2 a_STAR a_STAR^H ]. The sensor steering vector has unit-modulus
// entries, so ||a_S||^2 = N_s identically and the result is N_s * E[a a^H].
inline MatC estimate_sensing_correlation(int k, const AngleStats& stats, const SystemConfig& cfg,
                                         int samples, std::uint64_t seed,
                                         SteeringMoments* moments_out = nullptr) {
  if (samples < 1) throw std::invalid_argument("estimate_sensing_correlation: sample count must be >= 1");
  stats.validate();
  CounterRng rng(seed, CounterRng::substream(stream::kExpectation, k, 2));
  SteeringMoments mom = detail_exp::steering_moments(
      stats.elev_mean[k], stats.azim_mean[k], stats.elev_sigma[k], stats.azim_sigma[k], cfg.star_nx,
      cfg.star_nz, samples, std::max(samples, cfg.mc_samples_max), cfg.mc_split_tol, rng);
  if (moments_out) *moments_out = mom;
  return symmetrize(static_cast<double>(cfg.sensor_elements) * mom.second);
}

// Cached per-slot/per-stage expectation matrices. The Hadamard-derived
// E/D/C matrices depend on the beamformer and are rebuilt per iteration
// from these via the builders below.
struct ExpectationSet {
  std::vector<MatC> r;        // R^v(k), all users
  std::vector<MatC> r_sense;  // per outdoor user (index k - K_T), preparation only
  long mc_samples = 0;
  long mc_rejected = 0;
};

inline ExpectationSet build_expectation_set(const SystemConfig& cfg, const ChannelSet& cs,
                                            const AngleStats& stats, bool with_sensing,
                                            std::uint64_t seed) {
  ExpectationSet set;
  const int k_total = cs.users_total();
  set.r.reserve(k_total);
  for (int k = 0; k < k_total; ++k) {
    SteeringMoments mom;
    set.r.push_back(estimate_user_correlation(k, stats, cs, cfg, cfg.mc_samples, seed, &mom));
    set.mc_samples += mom.samples;
    set.mc_rejected += mom.rejected;
  }
  if (with_sensing) {
    for (int k = cs.users_indoor; k < k_total; ++k) {
      SteeringMoments mom;
      set.r_sense.push_back(estimate_sensing_correlation(k, stats, cfg, cfg.mc_samples, seed, &mom));
      set.mc_samples += mom.samples;
      set.mc_rejected += mom.rejected;
    }
  }
  return set;
}

// E_{k,h} = R^v(k) o (H1 w_h w_h^H H1^H)^T  (o = element-wise product);
// satisfies phi^H E phi = w^H H1^H Phi^* R Phi H1 w for Phi = diag(phi).
inline MatC build_e(const MatC& r_k, const MatC& h1, const VecC& w_h) {
  if (r_k.rows() != h1.rows() || h1.cols() != w_h.size())
    throw std::invalid_argument("build_e: dimension mismatch");
  VecC g = h1 * w_h;
  return r_k.cwiseProduct((g * g.adjoint()).transpose());
}

// D_k = R_sense(k) o (H1 W W^H H1^H)^T.
inline MatC build_d(const MatC& r_sense, const MatC& h1, const MatC& w) {
  if (r_sense.rows() != h1.rows() || h1.cols() != w.rows())
    throw std::invalid_argument("build_d: dimension mismatch");
  MatC g = h1 * w;
  return r_sense.cwiseProduct((g * g.adjoint()).transpose());
}

// C_k = rho_k^2 sum_h E_{k,h}.
inline MatC build_c(double rho_k, const std::vector<MatC>& e_row) {
  if (e_row.empty()) throw std::invalid_argument("build_c: empty E row");
  MatC sum = MatC::Zero(e_row[0].rows(), e_row[0].cols());
  for (const auto& e : e_row) {
    if (e.rows() != sum.rows() || e.cols() != sum.cols())
      throw std::invalid_argument("build_c: dimension mismatch");
    sum += e;
  }
  return rho_k * rho_k * sum;
}

}  // namespace starisac
