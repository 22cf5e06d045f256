#pragma once

#include <optional>
#include <string>
#include <vector>

#include "starisac/beamforming.hpp"
#include "starisac/channel.hpp"
#include "starisac/expectation.hpp"
#include "starisac/fp.hpp"
#include "starisac/metrics.hpp"
#include "starisac/partition.hpp"
#include "starisac/star_coeffs.hpp"

namespace starisac {

// How one stage runs; scheme variants are expressed purely as deltas here.
struct StageOptions {
  Stage stage = Stage::Communication;
  bool sensing_active = false;     // preparation sensing-SNR constraint
  bool optimize_partition = false; // penalized relaxation + top-k binarization
  bool phase_coupling = true;      // IPS-STAR switches this off
  double min_rate_gamma = 0.0;     // per-user SINR floor (IPS-STAR)
  std::vector<ElementMode> fixed_modes;  // Fixed-STAR manifold; empty = free
};

struct StageResult {
  MatC w;
  StarState star;
  FpState fp;
  Status status = Status::NumericalError;
  bool converged = false;
  int iterations = 0;
  std::vector<double> objective_trace;  // bound rate per outer iteration
  double bound_rate = 0.0;              // final value (after binarization, if any)
  double objective_pre_binarization = 0.0;
  double objective_post_binarization = 0.0;
  std::vector<ElementMode> modes;
  double max_sdp_rel_gap = 0.0;  // worst self-reported duality gap over SDR solves
  double max_qcqp_kkt = 0.0;     // worst KKT residual over beamformer solves
  std::string diagnostics;
};

namespace detail_protocol {

inline StarState default_star(int n, const VecR& b) {
  StarState s;
  s.beta_t = VecR::Constant(n, 1.0 / std::sqrt(2.0));
  s.beta_r = VecR::Constant(n, 1.0 / std::sqrt(2.0));
  s.theta_t = VecR::Zero(n);
  s.theta_r = VecR::Constant(n, kPi / 2.0);
  s.b = b;
  return s;
}

struct StageWork {
  const SystemConfig& cfg;
  const ChannelSet& cs;
  const ExpectationSet& exp;
  const StageOptions& opts;

  StageRateData rate_data(const MatC&, const StarState& star) const {
    return make_stage_rate_data(exp.r, star.phi_t(), star.phi_r(), cs.h1, cs.users_indoor,
                                cfg.noise_user_watt());
  }

  // Acceptance metric for the coefficient/partition blocks. The raw
  // quadratic-transform surrogate is a difference of huge near-cancelling
  // terms at high SINR, so blocks are compared by the bound rate itself
  // (which is also the recorded trace, making monotonicity structural).
  double stage_metric(const StarState& star, const MatC& w) const {
    StageRateData d = make_stage_rate_data(exp.r, star.phi_t(), star.phi_r(), cs.h1,
                                           cs.users_indoor, cfg.noise_user_watt());
    return bound_rate_value(d, w);
  }

  std::vector<std::vector<MatC>> build_e(const MatC& w) const {
    const int k_total = cs.users_total();
    std::vector<std::vector<MatC>> e(k_total);
    for (int k = 0; k < k_total; ++k)
      for (int h = 0; h < k_total; ++h) e[k].push_back(starisac::build_e(exp.r[k], cs.h1, w.col(h)));
    return e;
  }
};

}  // namespace detail_protocol

struct StageWarmStart {
  MatC w;          // empty or near-zero falls back to the matched-filter start
  StarState star;  // empty falls back to the default split state
};

// One stage of the protocol: the block-coordinate loop over
// (tau, rho) -> W -> [partition ->] STAR coefficients -> projection, with
// per-block acceptance so the recorded bound-rate trace never decreases.
inline StageResult run_stage(const SystemConfig& cfg, const ChannelSet& cs,
                             const ExpectationSet& exp, const StageOptions& opts,
                             std::uint64_t seed, const StageWarmStart* warm = nullptr) {
  const int n = cfg.star_elements();
  const int k_total = cs.users_total();
  const double noise = cfg.noise_user_watt();
  const double pmax = cfg.pmax_watt();
  detail_protocol::StageWork work{cfg, cs, exp, opts};

  StageResult res;
  // A full-cardinality (or empty) partition is a singleton feasible set;
  // the relaxation only runs for a genuine split.
  const bool partition_active =
      opts.stage == Stage::Preparation && opts.optimize_partition && cfg.n_part > 0 && cfg.n_part < n;
  VecR b = partition_active ? VecR::Constant(n, static_cast<double>(cfg.n_part) / n) : VecR::Ones(n);
  if (opts.stage == Stage::Preparation && opts.optimize_partition && cfg.n_part == 0)
    b = VecR::Zero(n);
  StarState star = detail_protocol::default_star(n, b);
  if (warm && warm->star.elements() == n) {
    star = warm->star;
    star.b = b;
  }
  res.modes = opts.fixed_modes.empty() ? std::vector<ElementMode>(n, ElementMode::EnergySplit)
                                       : opts.fixed_modes;
  if (!opts.fixed_modes.empty()) star = restore_feasibility(star.phi_t(), star.phi_r_tilde(), b, res.modes);

  std::vector<double> sensing_rhs;
  if (opts.sensing_active)
    for (int j = 0; j < cfg.users_outdoor; ++j)
      sensing_rhs.push_back(cfg.sens_threshold() * cfg.sensor_elements * cfg.noise_sensor_watt() /
                            cfg.alpha_sq());

  MatC w;
  if (warm && warm->w.size() > 0 && transmit_power(warm->w) > 1e-18 * std::max(pmax, 1e-300)) {
    w = warm->w;
  } else {
    StageRateData d0 = work.rate_data(w, star);
    w = matched_filter_start(d0, pmax);
  }

  double kappa = 0.0;
  double prev_obj = -std::numeric_limits<double>::infinity();
  int small_changes = 0;
  VecR tau, rho;

  for (int it = 0; it < cfg.bcd_max_iter; ++it) {
    res.iterations = it + 1;
    // (1) closed-form auxiliaries
    StageRateData data = work.rate_data(w, star);
    tau = update_tau(data, w);
    rho = update_rho(data, w, tau);

    // (2) beamformer
    BeamformResult bf;
    if (opts.sensing_active) {
      SensingConstraintData sc =
          make_sensing_constraints(exp.r_sense, star.phi_r(), cs.h1, cfg.sens_threshold(),
                                   cfg.sensor_elements, cfg.noise_sensor_watt(), cfg.alpha_sq());
      bf = beamform_prep_sca(data, tau, rho, sc, pmax, w, cfg.sca_max_iter, cfg.sca_tol,
                             cfg.qcqp_tol);
    } else {
      bf = beamform_comm(data, tau, rho, pmax, w, cfg.sca_max_iter, cfg.sca_tol, cfg.qcqp_tol,
                         opts.min_rate_gamma);
    }
    if (bf.status == Status::Infeasible) {
      res.status = Status::Infeasible;
      res.w = bf.w;
      res.star = star;
      res.diagnostics = "sensing constraint unreachable at beamforming step";
      return res;
    }
    res.max_qcqp_kkt = std::max(res.max_qcqp_kkt, bf.kkt_residual);
    w = bf.w;

    // (3) partition relaxation with penalty continuation
    std::vector<std::vector<MatC>> e = work.build_e(w);
    double current = work.stage_metric(star, w);
    if (partition_active) {
      PartitionRateModel model;
      model.noise = noise;
      const int kt = cs.users_indoor;
      model.tau = tau.segment(kt, k_total - kt);
      model.rho = rho.segment(kt, k_total - kt);
      VecC phi_tilde = star.phi_r_tilde();
      for (int k = kt; k < k_total; ++k) {
        std::vector<MatR> row;
        for (int h = 0; h < k_total; ++h) row.push_back(hadamard_real_form(e[k][h], phi_tilde));
        model.s.push_back(std::move(row));
      }
      if (kappa == 0.0) kappa = 0.1 * std::abs(model.value(star.b)) + 1e-6;
      PartitionResult pr = partition_sca(model, kappa, star.b, cfg.sca_max_iter, cfg.sca_tol);
      // continuation: double kappa until the mean binarity gap is small
      double gap = 0.0;
      for (int i = 0; i < n; ++i) gap += std::min(pr.b(i), 1.0 - pr.b(i)) / n;
      if (gap >= 0.05) kappa *= 2.0;
      // candidate accepted below together with the coefficient update
      b = pr.b;
    }

    // (4)-(5) STAR coefficients through SDR + rank-one recovery + projection
    auto coefficient_update = [&](const VecR& bvec) -> std::optional<StarState> {
      SdrInputs in;
      in.stage = opts.stage;
      in.e = e;
      in.tau = tau;
      in.rho = rho;
      in.b = bvec;
      in.modes = opts.fixed_modes.empty() ? modes_from_partition(bvec) : opts.fixed_modes;
      in.users_indoor = cs.users_indoor;
      in.noise = noise;
      if (opts.sensing_active) {
        in.sensing_rhs = sensing_rhs;
        for (int j = 0; j < cfg.users_outdoor; ++j) in.d.push_back(build_d(exp.r_sense[j], cs.h1, w));
      }
      SdpOptions sopts;
      sopts.tol = cfg.sdp_tol;
      sopts.max_iter = cfg.sdp_max_iter;
      sopts.admm_max_iter = cfg.admm_max_iter;
      SdrSolution sdr = solve_star_sdr(in, sopts);
      res.max_sdp_rel_gap = std::max(res.max_sdp_rel_gap, sdr.rel_gap);
      if (sdr.status != Status::Optimal && sdr.status != Status::MaxIter) return std::nullopt;
      auto objective = [&](const VecC& pt, const VecC& pr) {
        StarState st = restore_feasibility(pt, pr, bvec, in.modes, opts.phase_coupling);
        st.b = bvec;
        return work.stage_metric(st, w);
      };
      RecoveredVectors rec = recover_rank_one(sdr, cfg.randomization_count, objective,
                                              CounterRng::substream(seed, it, 9));
      StarState out = restore_feasibility(rec.phi_t, rec.phi_r, bvec, in.modes, opts.phase_coupling);
      out.b = bvec;
      return out;
    };

    std::optional<StarState> cand = coefficient_update(b);
    bool accepted = false;
    if (cand) {
      double val = work.stage_metric(*cand, w);
      if (val >= current - 1e-12 * (1.0 + std::abs(current))) {
        star = *cand;
        current = val;
        accepted = true;
      }
    }
    if (!accepted && partition_active && (b - star.b).norm() > 0.0) {
      // the new partition hurt: retry the coefficient step at the old one
      b = star.b;
      std::optional<StarState> cand2 = coefficient_update(b);
      if (cand2) {
        double val = work.stage_metric(*cand2, w);
        if (val >= current - 1e-12 * (1.0 + std::abs(current))) {
          star = *cand2;
          current = val;
        }
      }
    }
    b = star.b;

    // record the Jensen-bound stage rate at the end of the iteration
    StageRateData data_end = work.rate_data(w, star);
    double obj = bound_rate_value(data_end, w);
    res.objective_trace.push_back(obj);
    if (it > 0 && std::abs(obj - prev_obj) <= cfg.bcd_tol * (1.0 + std::abs(obj)))
      ++small_changes;
    else
      small_changes = 0;
    prev_obj = obj;
    if (small_changes >= 2) {
      res.converged = true;
      break;
    }
  }

  res.objective_pre_binarization = prev_obj;
  res.objective_post_binarization = prev_obj;

  // terminal binarization + one repair round
  if (partition_active) {
    VecR b_bin = project_topk(star.b, cfg.n_part);
    star.b = b_bin;
    std::vector<ElementMode> modes = modes_from_partition(b_bin);
    star = restore_feasibility(star.phi_t(), star.phi_r_tilde(), b_bin, modes, opts.phase_coupling);
    res.modes = modes;

    StageRateData data = work.rate_data(w, star);
    tau = update_tau(data, w);
    rho = update_rho(data, w, tau);
    BeamformResult bf;
    if (opts.sensing_active) {
      SensingConstraintData sc =
          make_sensing_constraints(exp.r_sense, star.phi_r(), cs.h1, cfg.sens_threshold(),
                                   cfg.sensor_elements, cfg.noise_sensor_watt(), cfg.alpha_sq());
      bf = beamform_prep_sca(data, tau, rho, sc, pmax, w, cfg.sca_max_iter, cfg.sca_tol,
                             cfg.qcqp_tol);
    } else {
      bf = beamform_comm(data, tau, rho, pmax, w, cfg.sca_max_iter, cfg.sca_tol, cfg.qcqp_tol,
                         opts.min_rate_gamma);
    }
    if (bf.status == Status::Infeasible) {
      res.status = Status::Infeasible;
      res.w = w;
      res.star = star;
      res.diagnostics = "sensing constraint unreachable after binarization";
      return res;
    }
    res.max_qcqp_kkt = std::max(res.max_qcqp_kkt, bf.kkt_residual);
    w = bf.w;
    // refresh coefficients at the binary partition
    {
      std::vector<std::vector<MatC>> e = work.build_e(w);
      SdrInputs in;
      in.stage = opts.stage;
      in.e = e;
      in.tau = tau;
      in.rho = rho;
      in.b = star.b;
      in.modes = modes;
      in.users_indoor = cs.users_indoor;
      in.noise = noise;
      if (opts.sensing_active) {
        in.sensing_rhs = sensing_rhs;
        for (int j = 0; j < cfg.users_outdoor; ++j) in.d.push_back(build_d(exp.r_sense[j], cs.h1, w));
      }
      SdpOptions sopts;
      sopts.tol = cfg.sdp_tol;
      sopts.max_iter = cfg.sdp_max_iter;
      SdrSolution sdr = solve_star_sdr(in, sopts);
      res.max_sdp_rel_gap = std::max(res.max_sdp_rel_gap, sdr.rel_gap);
      if (sdr.status == Status::Optimal || sdr.status == Status::MaxIter) {
        VecR b_bin_copy = star.b;
        auto objective = [&](const VecC& pt, const VecC& pr) {
          StarState st = restore_feasibility(pt, pr, b_bin_copy, modes, opts.phase_coupling);
          st.b = b_bin_copy;
          return work.stage_metric(st, w);
        };
        RecoveredVectors rec = recover_rank_one(sdr, cfg.randomization_count, objective,
                                                CounterRng::substream(seed, 777, 9));
        StarState cand = restore_feasibility(rec.phi_t, rec.phi_r, star.b, modes, opts.phase_coupling);
        cand.b = b_bin_copy;
        double cur = work.stage_metric(star, w);
        if (work.stage_metric(cand, w) >= cur - 1e-12 * (1.0 + std::abs(cur))) star = cand;
      }
    }
    StageRateData data_end = work.rate_data(w, star);
    res.objective_post_binarization = bound_rate_value(data_end, w);
  }

  res.w = w;
  res.star = star;
  res.fp.tau = tau;
  res.fp.rho = rho;
  res.bound_rate = res.objective_post_binarization;
  res.status = Status::Optimal;
  return res;
}

// ---------------------------------------------------------------------------
// Slot orchestration.
// ---------------------------------------------------------------------------

// Angle knowledge of one slot: optimizer-side statistics (zeroed when the
// scheme ignores them) and evaluation-side statistics (always the true
// error model). Preparation means come from the previous slot's estimates,
// communication means from the current slot's.
struct SlotAngles {
  AngleStats prep_opt, comm_opt;
  AngleStats prep_eval, comm_eval;
};

inline SlotAngles make_slot_angles(const SystemConfig& cfg, const Geometry& geom,
                                   std::uint64_t seed, bool optimizer_uses_stats) {
  SlotAngles a;
  const int k_total = cfg.num_users();
  auto fill = [&](AngleStats& st, int stage_tag, double sig_e, double sig_a, bool with_sigma) {
    st.elev_mean.resize(k_total);
    st.azim_mean.resize(k_total);
    st.elev_sigma.assign(k_total, 0.0);
    st.azim_sigma.assign(k_total, 0.0);
    for (int k = 0; k < k_total; ++k) {
      bool outdoor = k >= cfg.users_indoor;
      double elev = geom.users[k].elev;
      double azim = geom.users[k].azim;
      if (outdoor) {
        CounterRng rng(seed, CounterRng::substream(stream::kEstimate, k, stage_tag));
        elev = std::clamp(elev + sig_e * rng.normal(0), 0.0, kPi);
        azim = std::clamp(azim + sig_a * rng.normal(1), -kPi / 2, kPi / 2);
        if (with_sigma) {
          st.elev_sigma[k] = sig_e;
          st.azim_sigma[k] = sig_a;
        }
      }
      st.elev_mean[k] = elev;
      st.azim_mean[k] = azim;
    }
  };
  double sp_e = deg_to_rad(cfg.sigma_elev_prep_deg), sp_a = deg_to_rad(cfg.sigma_azim_prep_deg);
  double sc_e = deg_to_rad(cfg.sigma_elev_comm_deg), sc_a = deg_to_rad(cfg.sigma_azim_comm_deg);
  fill(a.prep_opt, 0, sp_e, sp_a, optimizer_uses_stats);
  fill(a.comm_opt, 1, sc_e, sc_a, optimizer_uses_stats);
  fill(a.prep_eval, 0, sp_e, sp_a, true);
  fill(a.comm_eval, 1, sc_e, sc_a, true);
  return a;
}

struct SchemeTraits {
  bool dual_stage = true;
  bool sensing = true;
  bool partition = true;
  bool phase_coupling = true;
  bool expectation_statistics = true;
  double min_rate_gamma = 0.0;
  std::vector<ElementMode> fixed_modes;  // empty = free manifold
};

inline SchemeTraits scheme_traits(const SystemConfig& cfg) {
  SchemeTraits t;
  switch (cfg.scheme) {
    case Scheme::Proposed:
      break;
    case Scheme::CpsStar:
      t.dual_stage = false;
      t.sensing = false;
      t.partition = false;
      t.expectation_statistics = false;
      break;
    case Scheme::IpsStar:
      t.dual_stage = false;
      t.sensing = false;
      t.partition = false;
      t.phase_coupling = false;
      t.expectation_statistics = false;
      t.min_rate_gamma = std::pow(2.0, cfg.min_rate) - 1.0;
      break;
    case Scheme::NoStatStar:
      t.expectation_statistics = false;
      break;
    case Scheme::FixedStar: {
      t.partition = false;
      const int n = cfg.star_elements();
      t.fixed_modes.assign(n, ElementMode::ReflectOnly);
      for (int i = 0; i < n / 2; ++i) t.fixed_modes[i] = ElementMode::TransmitOnly;
      break;
    }
  }
  if (!cfg.use_error_statistics) t.expectation_statistics = false;
  return t;
}

struct SlotResult {
  StageResult prep, comm;
  bool dual_stage = true;
  bool converged = false;
  int iterations = 0;
  Status status = Status::NumericalError;
  double rate_prep = 0.0;   // MC-evaluated average stage rates (true error model)
  double rate_comm = 0.0;
  double rate_total = 0.0;  // eta * prep + (1 - eta) * comm
  std::vector<double> assnr;  // per outdoor user, preparation coefficients
  double power_prep = 0.0, power_comm = 0.0;
  bool feasible = false;
  std::string feasibility_report;
  long mc_samples = 0;
};

namespace detail_protocol {

inline bool audit_stage(const SystemConfig& cfg, const StageResult& st, bool check_coupling,
                        std::string& report, const char* tag) {
  bool ok = true;
  double pw = transmit_power(st.w);
  if (pw > cfg.pmax_watt() * (1.0 + 1e-8)) {
    ok = false;
    report += std::string(tag) + ": power budget exceeded; ";
  }
  for (int i = 0; i < st.star.elements(); ++i) {
    if (st.modes[i] == ElementMode::EnergySplit) {
      double e = st.star.beta_r(i) * st.star.beta_r(i) + st.star.beta_t(i) * st.star.beta_t(i);
      if (std::abs(e - 1.0) > 1e-9) {
        ok = false;
        report += std::string(tag) + ": energy conservation violated; ";
        break;
      }
      if (check_coupling &&
          std::abs(std::cos(st.star.theta_r(i) - st.star.theta_t(i))) > 1e-9) {
        ok = false;
        report += std::string(tag) + ": phase coupling violated; ";
        break;
      }
    }
  }
  return ok;
}

}  // namespace detail_protocol

// Convenience wrappers for the two stages of the proposed protocol.
inline StageResult run_preparation_stage(const SystemConfig& cfg, const ChannelSet& cs,
                                         const ExpectationSet& exp, std::uint64_t seed) {
  StageOptions opts;
  opts.stage = Stage::Preparation;
  opts.sensing_active = cfg.sens_threshold_db > -300.0 && cfg.sens_threshold() > 0.0;
  opts.optimize_partition = true;
  return run_stage(cfg, cs, exp, opts, seed);
}

inline StageResult run_communication_stage(const SystemConfig& cfg, const ChannelSet& cs,
                                           const ExpectationSet& exp, std::uint64_t seed) {
  StageOptions opts;
  opts.stage = Stage::Communication;
  return run_stage(cfg, cs, exp, opts, seed);
}

// One slot end to end: channels, expectation caches, both stages (or the
// single design of a one-stage baseline), true-error evaluation and the
// feasibility audit.
inline SlotResult run_slot(const SystemConfig& cfg, const Geometry& geom, std::uint64_t seed) {
  cfg.validate();
  SchemeTraits traits = scheme_traits(cfg);
  ChannelSet cs = sample_channels(cfg, geom, seed);
  SlotAngles angles = make_slot_angles(cfg, geom, seed, traits.expectation_statistics);

  SlotResult slot;
  slot.dual_stage = traits.dual_stage;

  StageOptions prep_opts;
  prep_opts.stage = Stage::Preparation;
  prep_opts.sensing_active = traits.sensing && cfg.sens_threshold() > 0.0;
  prep_opts.optimize_partition = traits.partition;
  prep_opts.phase_coupling = traits.phase_coupling;
  prep_opts.min_rate_gamma = traits.min_rate_gamma;
  prep_opts.fixed_modes = traits.fixed_modes;

  ExpectationSet prep_exp =
      build_expectation_set(cfg, cs, angles.prep_opt, prep_opts.sensing_active, seed);
  slot.mc_samples += prep_exp.mc_samples;
  slot.prep = run_stage(cfg, cs, prep_exp, prep_opts, seed);
  if (slot.prep.status == Status::Infeasible) {
    slot.status = Status::Infeasible;
    slot.feasibility_report = slot.prep.diagnostics;
    return slot;
  }

  if (traits.dual_stage) {
    StageOptions comm_opts;
    comm_opts.stage = Stage::Communication;
    comm_opts.phase_coupling = traits.phase_coupling;
    comm_opts.min_rate_gamma = traits.min_rate_gamma;
    comm_opts.fixed_modes = traits.fixed_modes;
    ExpectationSet comm_exp = build_expectation_set(cfg, cs, angles.comm_opt, false, seed);
    slot.mc_samples += comm_exp.mc_samples;
    slot.comm = run_stage(cfg, cs, comm_exp, comm_opts, seed);
    if (slot.comm.status == Status::Infeasible) {
      slot.status = Status::Infeasible;
      slot.feasibility_report = slot.comm.diagnostics;
      return slot;
    }
  } else {
    slot.comm = slot.prep;  // one design serves the whole slot
  }

  slot.converged = slot.prep.converged && slot.comm.converged;
  slot.iterations = std::max(slot.prep.iterations, slot.comm.iterations);
  slot.power_prep = transmit_power(slot.prep.w);
  slot.power_comm = transmit_power(slot.comm.w);

  // true-error evaluation
  TrueRateResult rp = evaluate_true_rate(cfg, cs, angles.prep_eval, slot.prep.w,
                                         slot.prep.star.phi_t(), slot.prep.star.phi_r(),
                                         cfg.eval_draws, seed, 1);
  const AngleStats& comm_stats = traits.dual_stage ? angles.comm_eval : angles.prep_eval;
  TrueRateResult rc = evaluate_true_rate(cfg, cs, comm_stats, slot.comm.w,
                                         slot.comm.star.phi_t(), slot.comm.star.phi_r(),
                                         cfg.eval_draws, seed, 2);
  slot.rate_prep = rp.mean_rate;
  slot.rate_comm = rc.mean_rate;
  slot.rate_total = total_rate(cfg.eta, slot.rate_prep, slot.rate_comm);

  for (int k = cfg.users_indoor; k < cfg.num_users(); ++k)
    slot.assnr.push_back(evaluate_true_assnr(cfg, cs, angles.prep_eval, k, slot.prep.w,
                                             slot.prep.star.phi_r(), cfg.eval_draws, seed));

  // feasibility audit appropriate to the scheme
  bool ok = detail_protocol::audit_stage(cfg, slot.prep, traits.phase_coupling,
                                         slot.feasibility_report, "prep");
  if (traits.dual_stage)
    ok = detail_protocol::audit_stage(cfg, slot.comm, traits.phase_coupling,
                                      slot.feasibility_report, "comm") && ok;
  if (prep_opts.sensing_active) {
    for (std::size_t j = 0; j < slot.assnr.size(); ++j)
      if (slot.assnr[j] < cfg.sens_threshold() * (1.0 - 1e-3)) {
        ok = false;
        slot.feasibility_report += "prep: evaluated ASSNR below threshold; ";
      }
  }
  slot.feasible = ok;
  slot.status = Status::Optimal;
  return slot;
}

}  // namespace starisac
