#pragma once

#include <functional>
#include <vector>

#include "starisac/fp.hpp"
#include "starisac/linalg.hpp"
#include "starisac/rng.hpp"
#include "starisac/sdp.hpp"
#include "starisac/types.hpp"

namespace starisac {

enum class ElementMode { EnergySplit, TransmitOnly, ReflectOnly };

// Element coefficients of one stage. beta_r/theta_r describe the tilde
// reflection coefficients; the effective reflection vector carries the
// partition weights b.
struct StarState {
  VecR beta_t, beta_r;
  VecR theta_t, theta_r;
  VecR b;  // ones in the communication stage

  int elements() const { return static_cast<int>(beta_t.size()); }

  VecC phi_t() const {
    VecC v(elements());
    for (int i = 0; i < elements(); ++i) v(i) = std::polar(beta_t(i), theta_t(i));
    return v;
  }
  VecC phi_r_tilde() const {
    VecC v(elements());
    for (int i = 0; i < elements(); ++i) v(i) = std::polar(beta_r(i), theta_r(i));
    return v;
  }
  VecC phi_r() const { return b.cast<cxd>().asDiagonal() * phi_r_tilde(); }
};

inline std::vector<ElementMode> modes_from_partition(const VecR& b) {
  std::vector<ElementMode> m(b.size());
  for (int i = 0; i < b.size(); ++i)
    m[i] = b(i) <= 1e-9 ? ElementMode::TransmitOnly : ElementMode::EnergySplit;
  return m;
}

// Max violation of the per-element physical constraints.
inline double feasibility_residual(const StarState& s, const std::vector<ElementMode>& modes) {
  double r = 0.0;
  for (int i = 0; i < s.elements(); ++i) {
    switch (modes[i]) {
      case ElementMode::EnergySplit: {
        double e = s.beta_r(i) * s.beta_r(i) + s.beta_t(i) * s.beta_t(i) - 1.0;
        r = std::max(r, std::abs(e));
        r = std::max(r, std::abs(std::cos(s.theta_r(i) - s.theta_t(i))));
        break;
      }
      case ElementMode::TransmitOnly:
        r = std::max(r, std::abs(s.beta_r(i) * s.b(i)));
        r = std::max(r, std::abs(s.beta_t(i) - 1.0));
        break;
      case ElementMode::ReflectOnly:
        r = std::max(r, std::abs(s.beta_r(i) - 1.0));
        r = std::max(r, std::abs(s.beta_t(i)));
        break;
    }
  }
  return r;
}

// ------------------------------ SDR (P4) -----------------------------------

struct SdrInputs {
  Stage stage = Stage::Communication;
  std::vector<std::vector<MatC>> e;  // E_{k,h}, unmasked, all users x beams
  std::vector<MatC> d;               // D_k per outdoor user (preparation)
  VecR tau, rho;
  VecR b;                            // partition weights, size N
  std::vector<ElementMode> modes;
  int users_indoor = 0;
  double noise = 0.0;
  std::vector<double> sensing_rhs;   // delta N_s sigma_ns^2/|alpha_k|^2, per outdoor user
};

struct SdrSolution {
  MatC v_t, v_r;
  VecR z;  // per user: z_{T,k} for indoor, z_{R,k} for outdoor
  Status status = Status::NumericalError;
  double objective = 0.0;      // full surrogate value in bit/s/Hz
  double rel_gap = 0.0;
  double rank_ratio_t = 0.0;   // lambda2/lambda1
  double rank_ratio_r = 0.0;
  std::vector<double> sensing_trace;  // tr(D_k^b V_R) diagnostics
};

namespace detail_star {

inline MatC mask(const MatC& a, const VecR& b) {
  return b.cast<cxd>().asDiagonal() * a * b.cast<cxd>().asDiagonal();
}

inline double rank_ratio(const MatC& v) {
  if (v.rows() <= 1) return 0.0;
  EigResult e = eig_hermitian(symmetrize(v), 1e-6);
  if (e.eigenvalues(0) <= 0.0) return 0.0;
  return std::max(e.eigenvalues(1), 0.0) / e.eigenvalues(0);
}

inline MatC submatrix(const MatC& a, const std::vector<int>& idx) {
  MatC s(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) s(i, j) = a(idx[i], idx[j]);
  return s;
}

inline MatC embed(const MatC& s, const std::vector<int>& idx, int n) {
  MatC a = MatC::Zero(n, n);
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) a(idx[i], idx[j]) = s(i, j);
  return a;
}

}  // namespace detail_star

// The lifted coefficient problem: maximize the z/V form of the surrogate
// subject to PSD, per-element energy, rotated-SOC (as 2x2 LMIs) and the
// preparation sensing trace constraints. Elements whose mode forces a zero
// coefficient are eliminated structurally (keeps a strict interior) and
// re-embedded as zero rows/columns afterwards.
inline SdrSolution solve_star_sdr(const SdrInputs& in, const SdpOptions& opts = SdpOptions()) {
  const int k_total = static_cast<int>(in.e.size());
  const int n = static_cast<int>(in.b.size());
  const double ln2 = 0.6931471805599453;

  std::vector<int> t_idx, r_idx;  // transmission- / reflection-active elements
  for (int i = 0; i < n; ++i) {
    if (in.modes[i] != ElementMode::ReflectOnly) t_idx.push_back(i);
    if (in.modes[i] != ElementMode::TransmitOnly) r_idx.push_back(i);
  }
  const int nt = static_cast<int>(t_idx.size());
  const int nr = static_cast<int>(r_idx.size());
  if (nt == 0 || nr == 0) throw std::invalid_argument("solve_star_sdr: empty element set");

  SdpProblem p;
  p.var_dims = {nt, nr};
  for (int k = 0; k < k_total; ++k) p.var_dims.push_back(1);  // z_k
  const int zvar0 = 2;

  // objective: sum_k 2 rho sqrt(1+tau) z_k - tr(C_T V_T) - tr(C_R^b V_R)
  MatC c_t = MatC::Zero(n, n), c_r = MatC::Zero(n, n);
  std::vector<MatC> e_own(k_total);  // per-user E_kk on the active subspace
  for (int k = 0; k < k_total; ++k) {
    bool indoor = k < in.users_indoor;
    MatC csum = MatC::Zero(n, n);
    for (int h = 0; h < k_total; ++h) csum += in.e[k][h];
    csum *= in.rho(k) * in.rho(k);
    if (indoor) {
      c_t += csum;
      e_own[k] = symmetrize(detail_star::submatrix(in.e[k][k], t_idx));
    } else {
      c_r += detail_star::mask(csum, in.b);
      e_own[k] = symmetrize(detail_star::submatrix(detail_star::mask(in.e[k][k], in.b), r_idx));
    }
    p.objective.add(zvar0 + k, MatC::Constant(1, 1, 2.0 * in.rho(k) * std::sqrt(1.0 + in.tau(k))));
  }
  p.objective.add(0, -symmetrize(detail_star::submatrix(c_t, t_idx)));
  p.objective.add(1, -symmetrize(detail_star::submatrix(c_r, r_idx)));

  // per-element amplitude constraints
  std::vector<int> t_pos(n, -1), r_pos(n, -1);
  for (int i = 0; i < nt; ++i) t_pos[t_idx[i]] = i;
  for (int i = 0; i < nr; ++i) r_pos[r_idx[i]] = i;
  for (int i = 0; i < n; ++i) {
    SdpLinFun f;
    if (t_pos[i] >= 0) {
      MatC ei = MatC::Zero(nt, nt);
      ei(t_pos[i], t_pos[i]) = 1.0;
      f.add(0, ei);
    }
    if (r_pos[i] >= 0) {
      MatC ei = MatC::Zero(nr, nr);
      ei(r_pos[i], r_pos[i]) = 1.0;
      f.add(1, ei);
    }
    p.affine.push_back({f, Rel::Le, 1.0});
  }

  // rotated SOC constraints z_k^2 <= tr(E_kk V_a) as Schur-complement LMIs
  for (int k = 0; k < k_total; ++k) {
    int vvar = k < in.users_indoor ? 0 : 1;
    SdpLmi lmi;
    lmi.dim = 2;
    SdpLmiEntry e00;
    e00.p = 0;
    e00.q = 0;
    e00.re.add(vvar, e_own[k]);
    SdpLmiEntry e01;
    e01.p = 0;
    e01.q = 1;
    e01.re.add(zvar0 + k, MatC::Constant(1, 1, 1.0));
    SdpLmiEntry e11;
    e11.p = 1;
    e11.q = 1;
    e11.c0 = 1.0;
    lmi.entries = {e00, e01, e11};
    p.lmis.push_back(lmi);
  }

  // preparation-stage sensing constraints
  if (in.stage == Stage::Preparation && !in.sensing_rhs.empty()) {
    for (std::size_t j = 0; j < in.d.size(); ++j) {
      if (in.sensing_rhs[j] <= 0.0) continue;
      MatC dj = symmetrize(detail_star::submatrix(detail_star::mask(in.d[j], in.b), r_idx));
      p.affine.push_back({SdpLinFun{}.add(1, dj), Rel::Ge, in.sensing_rhs[j]});
    }
  }

  SdpSolution sol = solve_sdp(p, opts);
  SdrSolution out;
  out.status = sol.status;
  out.rel_gap = sol.rel_gap;
  if (sol.x.size() >= 2) {
    out.v_t = detail_star::embed(sol.x[0], t_idx, n);
    out.v_r = detail_star::embed(sol.x[1], r_idx, n);
    out.z.resize(k_total);
    for (int k = 0; k < k_total; ++k) out.z(k) = sol.x[zvar0 + k](0, 0).real();
    out.rank_ratio_t = detail_star::rank_ratio(sol.x[0]);
    out.rank_ratio_r = detail_star::rank_ratio(sol.x[1]);
    for (std::size_t j = 0; j < in.d.size(); ++j)
      out.sensing_trace.push_back(
          herm_inner(symmetrize(detail_star::mask(in.d[j], in.b)), out.v_r));
    // full surrogate value (constant tau terms + noise terms included)
    double v = sol.objective;
    for (int k = 0; k < k_total; ++k)
      v += std::log1p(in.tau(k)) - in.tau(k) - in.rho(k) * in.rho(k) * in.noise;
    out.objective = v / ln2;
  }
  return out;
}

// Per-user maximum of tr(D_k^b V_R) over the relaxed element constraints
// (diag(V_R) <= 1). A user whose maximum falls below its rhs certifies that
// the sensing demand is unreachable; the values double as the diagnostic
// "max achievable trace" attached to infeasibility reports.
inline std::vector<double> sensing_capacity_probe(const SdrInputs& in,
                                                  const SdpOptions& opts = SdpOptions()) {
  const int n = static_cast<int>(in.b.size());
  std::vector<double> capacity;
  for (std::size_t j = 0; j < in.d.size(); ++j) {
    SdpProblem p;
    p.var_dims = {n};
    p.objective.add(0, symmetrize(detail_star::mask(in.d[j], in.b)));
    for (int i = 0; i < n; ++i) {
      MatC ei = MatC::Zero(n, n);
      ei(i, i) = 1.0;
      p.affine.push_back({SdpLinFun{}.add(0, ei), Rel::Le, 1.0});
    }
    SdpSolution sol = solve_sdp(p, opts);
    capacity.push_back(sol.status == Status::Optimal ? sol.objective : 0.0);
  }
  return capacity;
}

// ------------------------- rank-one recovery -------------------------------

struct RecoveredVectors {
  VecC phi_t, phi_r;  // amplitudes clipped to [0,1]; phi_r is the tilde vector
  bool tight_t = false, tight_r = false;
  int chosen_candidate = 0;  // 0 = principal eigenvector pair
};

namespace detail_star {

inline VecC clip_amplitudes(const VecC& v) {
  VecC out(v.size());
  for (int i = 0; i < v.size(); ++i) {
    double a = std::abs(v(i));
    out(i) = a > 1.0 ? v(i) / a : v(i);
  }
  return out;
}

inline VecC principal_component(const MatC& v) {
  EigResult e = eig_hermitian(symmetrize(v), 1e-6);
  double lam = std::max(e.eigenvalues(0), 0.0);
  return std::sqrt(lam) * e.eigenvectors.col(0);
}

inline VecC gaussian_sample(const MatC& v, const CounterRng& rng, std::uint64_t base) {
  EigResult e = eig_hermitian(symmetrize(v), 1e-6);
  const int n = static_cast<int>(v.rows());
  VecC g(n);
  for (int i = 0; i < n; ++i) g(i) = rng.cnormal(base + i);
  return e.eigenvectors * e.eigenvalues.cwiseMax(0.0).cwiseSqrt().asDiagonal() * g;
}

}  // namespace detail_star

// Principal-eigenvector recovery when the relaxation is tight
// (lambda2/lambda1 <= 1e-6), otherwise Gaussian randomization with the
// candidates ranked by `objective_after_projection`.
inline RecoveredVectors recover_rank_one(
    const SdrSolution& sdr, int randomization_count,
    const std::function<double(const VecC&, const VecC&)>& objective_after_projection,
    std::uint64_t seed) {
  RecoveredVectors out;
  out.tight_t = sdr.rank_ratio_t <= 1e-6;
  out.tight_r = sdr.rank_ratio_r <= 1e-6;
  VecC pe_t = detail_star::clip_amplitudes(detail_star::principal_component(sdr.v_t));
  VecC pe_r = detail_star::clip_amplitudes(detail_star::principal_component(sdr.v_r));
  if (out.tight_t && out.tight_r) {
    out.phi_t = pe_t;
    out.phi_r = pe_r;
    return out;
  }
  CounterRng rng(seed, stream::kRandomization);
  double best = objective_after_projection(pe_t, pe_r);
  out.phi_t = pe_t;
  out.phi_r = pe_r;
  const int n = static_cast<int>(sdr.v_t.rows());
  for (int s = 0; s < randomization_count; ++s) {
    VecC cand_t = out.tight_t
                      ? pe_t
                      : detail_star::clip_amplitudes(detail_star::gaussian_sample(sdr.v_t, rng, 2 * n * s));
    VecC cand_r = out.tight_r
                      ? pe_r
                      : detail_star::clip_amplitudes(
                            detail_star::gaussian_sample(sdr.v_r, rng, 2 * n * s + n));
    double val = objective_after_projection(cand_t, cand_r);
    if (val > best) {
      best = val;
      out.phi_t = cand_t;
      out.phi_r = cand_r;
      out.chosen_candidate = s + 1;
    }
  }
  return out;
}

// --------------------- feasibility projection (P5) -------------------------

// Snap a phase pair onto cos(theta_R - theta_T) = 0 minimizing
// |e^{j thR*} - e^{j thR}|^2 + |e^{j thT*} - e^{j thT}|^2; the stationarity
// system reduces to c1 mu^2 - c2 mu + c1 = 0 with c2 = 2 for unit-modulus
// references.
inline void project_phases(double theta_r_star, double theta_t_star, double& theta_r_hat,
                           double& theta_t_hat) {
  auto wrap = [](double t) {
    t = std::fmod(t, 2.0 * kPi);
    return t < 0.0 ? t + 2.0 * kPi : t;
  };
  const cxd u_r = std::polar(1.0, theta_r_star);
  const cxd u_t = std::polar(1.0, theta_t_star);
  double c1 = std::cos(theta_r_star - theta_t_star);
  if (std::abs(c1) < 1e-14) {  // already orthogonal
    theta_r_hat = wrap(theta_r_star);
    theta_t_hat = wrap(theta_t_star);
    return;
  }
  if (std::abs(c1) > 1.0 - 1e-12) {  // parallel/antiparallel: symmetric split
    theta_r_hat = wrap(theta_r_star + kPi / 4.0);
    theta_t_hat = wrap(theta_t_star - kPi / 4.0);
    return;
  }
  double disc = std::sqrt(std::max(1.0 - c1 * c1, 0.0));
  double best_cost = std::numeric_limits<double>::infinity();
  for (double mu : {(1.0 + disc) / c1, (1.0 - disc) / c1}) {
    cxd vr = u_r - mu * u_t;
    cxd vt = u_t - mu * u_r;
    if (std::abs(vr) < 1e-14 || std::abs(vt) < 1e-14) continue;
    double tr = std::arg(vr);
    // snap exactly onto the orthogonal pair nearest the raw solution
    double tt_raw = std::arg(vt);
    double tt = tr - kPi / 2.0;
    if (std::abs(std::remainder(tt_raw - tt, 2.0 * kPi)) >
        std::abs(std::remainder(tt_raw - (tr + kPi / 2.0), 2.0 * kPi)))
      tt = tr + kPi / 2.0;
    double cost = std::norm(u_r - std::polar(1.0, tr)) + std::norm(u_t - std::polar(1.0, tt));
    if (cost < best_cost) {
      best_cost = cost;
      theta_r_hat = wrap(tr);
      theta_t_hat = wrap(tt);
    }
  }
}

// Closed-form per-element amplitudes on the energy circle
// beta_R^2 + beta_T^2 = 1 maximizing chi_R beta_R + chi_T beta_T with
// chi_a = beta_a* cos(theta_a* - theta_a_hat).
inline void project_amplitudes(double beta_r_star, double beta_t_star, double theta_r_star,
                               double theta_t_star, double theta_r_hat, double theta_t_hat,
                               double& beta_r_out, double& beta_t_out) {
  double chi_r = beta_r_star * std::cos(theta_r_star - theta_r_hat);
  double chi_t = beta_t_star * std::cos(theta_t_star - theta_t_hat);
  if (chi_r >= 0.0 && chi_t >= 0.0) {
    double h = std::hypot(chi_r, chi_t);
    if (h == 0.0) {  // objective-indifferent convention
      beta_r_out = beta_t_out = 1.0 / std::sqrt(2.0);
      return;
    }
    beta_r_out = chi_r / h;
    beta_t_out = chi_t / h;
  } else if (chi_r >= 0.0 && chi_t < 0.0) {
    beta_r_out = 1.0;
    beta_t_out = 0.0;
  } else if (chi_r < 0.0 && chi_t >= 0.0) {
    beta_r_out = 0.0;
    beta_t_out = 1.0;
  } else {
    if (chi_t >= chi_r) {
      beta_r_out = 0.0;
      beta_t_out = 1.0;
    } else {
      beta_r_out = 1.0;
      beta_t_out = 0.0;
    }
  }
}

// Element-wise restoration of full feasibility: phase pass then amplitude
// pass for coupled elements, forced coefficients for TO/RO modes. A second
// alternation runs only if the residual is above 1e-9. With couple_phases
// false (phase-independent baseline) phases stay put and only the energy
// circle is enforced.
inline StarState restore_feasibility(const VecC& raw_phi_t, const VecC& raw_phi_r_tilde,
                                     const VecR& b, const std::vector<ElementMode>& modes,
                                     bool couple_phases = true) {
  const int n = static_cast<int>(raw_phi_t.size());
  StarState s;
  s.beta_t.resize(n);
  s.beta_r.resize(n);
  s.theta_t.resize(n);
  s.theta_r.resize(n);
  s.b = b;
  auto wrap = [](double t) {
    t = std::fmod(t, 2.0 * kPi);
    return t < 0.0 ? t + 2.0 * kPi : t;
  };
  for (int pass = 0; pass < 2; ++pass) {
    for (int i = 0; i < n; ++i) {
      double bt_star = std::min(std::abs(raw_phi_t(i)), 1.0);
      double br_star = std::min(std::abs(raw_phi_r_tilde(i)), 1.0);
      double tt_star = wrap(std::arg(raw_phi_t(i)));
      double tr_star = wrap(std::arg(raw_phi_r_tilde(i)));
      switch (modes[i]) {
        case ElementMode::TransmitOnly:
          s.beta_r(i) = 0.0;
          s.beta_t(i) = 1.0;
          s.theta_t(i) = tt_star;
          s.theta_r(i) = tr_star;
          break;
        case ElementMode::ReflectOnly:
          s.beta_r(i) = 1.0;
          s.beta_t(i) = 0.0;
          s.theta_r(i) = tr_star;
          s.theta_t(i) = tt_star;
          break;
        case ElementMode::EnergySplit: {
          double tr_hat = tr_star, tt_hat = tt_star;
          if (couple_phases) {
            // A side with (near) zero reference amplitude has a free phase in
            // the amplitude-weighted P5 distance; pin the active side and
            // park the free one orthogonally instead of dragging both.
            if (br_star < 1e-6 || bt_star < 1e-6) {
              if (br_star >= bt_star) {
                tr_hat = tr_star;
                tt_hat = std::remainder(tt_star - tr_star, 2.0 * kPi) >= 0.0 ? tr_star + kPi / 2.0
                                                                             : tr_star - kPi / 2.0;
              } else {
                tt_hat = tt_star;
                tr_hat = std::remainder(tr_star - tt_star, 2.0 * kPi) >= 0.0 ? tt_star + kPi / 2.0
                                                                             : tt_star - kPi / 2.0;
              }
              tr_hat = wrap(tr_hat);
              tt_hat = wrap(tt_hat);
            } else {
              project_phases(tr_star, tt_star, tr_hat, tt_hat);
            }
          }
          double br = 0.0, bt = 0.0;
          project_amplitudes(br_star, bt_star, tr_star, tt_star, tr_hat, tt_hat, br, bt);
          s.theta_r(i) = tr_hat;
          s.theta_t(i) = tt_hat;
          s.beta_r(i) = br;
          s.beta_t(i) = bt;
          break;
        }
      }
    }
    if (!couple_phases || feasibility_residual(s, modes) <= 1e-9) break;
  }
  return s;
}

}  // namespace starisac
