#include <gtest/gtest.h>

#include "oracles.hpp"
#include "starisac/fp.hpp"

using namespace starisac;

namespace {

// Synthetic stage data with O(1) magnitudes.
StageRateData make_data(int k_users, int m, std::uint64_t seed, double noise = 0.5) {
  StageRateData d;
  d.noise = noise;
  for (int k = 0; k < k_users; ++k) d.gram.push_back(oracles::random_psd(m, seed + 10 * k));
  return d;
}

MatC make_w(int m, int k_users, std::uint64_t seed) {
  CounterRng rng(seed, 3);
  MatC w(m, k_users);
  std::uint64_t ctr = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k_users; ++j) w(i, j) = rng.cnormal(ctr++);
  return w;
}

}  // namespace

TEST(UpdateTau, ZeroBeamformerGivesZero) {
  StageRateData d = make_data(3, 4, 100);
  VecR tau = update_tau(d, MatC::Zero(4, 3));
  EXPECT_EQ(tau.norm(), 0.0);
}

TEST(UpdateTau, SingleUserNoInterference) {
  StageRateData d = make_data(1, 4, 101, 0.25);
  MatC w = make_w(4, 1, 101);
  VecR tau = update_tau(d, w);
  double signal = (w.col(0).adjoint() * d.gram[0] * w.col(0))(0).real();
  EXPECT_NEAR(tau(0), signal / 0.25, 1e-12 * tau(0));
}

TEST(UpdateTau, FiniteDifferenceStationarity) {
  StageRateData d = make_data(3, 4, 102);
  MatC w = make_w(4, 3, 102);
  VecR tau = update_tau(d, w);
  for (int k = 0; k < 3; ++k) {
    double h = 1e-4 * (1.0 + tau(k));
    VecR tp = tau, tm = tau;
    tp(k) += h;
    tm(k) -= h;
    double fd = (objective_fp(d, w, tp) - objective_fp(d, w, tm)) / (2.0 * h);
    EXPECT_LE(std::abs(fd), 1e-6);
  }
}

TEST(UpdateRho, ZeroSignalGivesZero) {
  StageRateData d = make_data(2, 4, 103);
  MatC w = make_w(4, 2, 103);
  w.col(0).setZero();
  VecR tau = update_tau(d, w);
  VecR rho = update_rho(d, w, tau);
  EXPECT_EQ(rho(0), 0.0);
  EXPECT_GT(rho(1), 0.0);
}

TEST(UpdateRho, ScalarQuadraticTransformIdentity) {
  // rho = sqrt((1+tau) s^2) / den and 2 rho sqrt((1+tau) s^2) - rho^2 den = (1+tau) s^2 / den
  double s2 = 1.7, den = 2.3, tau = 0.9;
  double rho = std::sqrt((1.0 + tau) * s2) / den;
  double lhs = 2.0 * rho * std::sqrt((1.0 + tau) * s2) - rho * rho * den;
  EXPECT_NEAR(lhs, (1.0 + tau) * s2 / den, 1e-12);
}

TEST(UpdateRho, TransformEquivalenceAtOptimum) {
  StageRateData d = make_data(3, 5, 104);
  MatC w = make_w(5, 3, 104);
  VecR tau = update_tau(d, w);
  VecR rho = update_rho(d, w, tau);
  EXPECT_NEAR(objective_q(d, w, tau, rho), objective_fp(d, w, tau), 1e-9);
}

TEST(ObjectiveQ, ZeroAuxiliariesGiveZero) {
  StageRateData d = make_data(2, 3, 105);
  MatC w = make_w(3, 2, 105);
  EXPECT_NEAR(objective_q(d, w, VecR::Zero(2), VecR::Zero(2)), 0.0, 1e-15);
}

TEST(ObjectiveQ, RecoversBoundRateAtJointOptimum) {
  StageRateData d = make_data(4, 5, 106);
  MatC w = make_w(5, 4, 106);
  VecR tau = update_tau(d, w);
  VecR rho = update_rho(d, w, tau);
  EXPECT_NEAR(objective_q(d, w, tau, rho), bound_rate_value(d, w), 1e-8);
}

TEST(ObjectiveQ, StrictConcavityInRho) {
  StageRateData d = make_data(3, 4, 107);
  MatC w = make_w(4, 3, 107);
  VecR tau = update_tau(d, w);
  VecR rho = update_rho(d, w, tau);
  EXPECT_LT(objective_q(d, w, tau, 2.0 * rho), objective_q(d, w, tau, rho) - 1e-12);
  // second difference along a random direction
  CounterRng rng(107, 9);
  VecR dir(3);
  for (int i = 0; i < 3; ++i) dir(i) = rng.normal(i);
  double h = 0.1;
  double f0 = objective_q(d, w, tau, rho);
  double fp = objective_q(d, w, tau, rho + h * dir);
  double fm = objective_q(d, w, tau, rho - h * dir);
  EXPECT_LE(fp + fm - 2.0 * f0, 1e-10);
}

TEST(ObjectiveQ, AlternatingUpdatesMonotone) {
  StageRateData d = make_data(4, 4, 108);
  MatC w = make_w(4, 4, 108);
  VecR tau = VecR::Constant(4, 0.1);
  VecR rho = VecR::Constant(4, 0.1);
  double prev = objective_q(d, w, tau, rho);
  for (int it = 0; it < 6; ++it) {
    tau = update_tau(d, w);
    rho = update_rho(d, w, tau);
    double cur = objective_q(d, w, tau, rho);
    EXPECT_GE(cur, prev - 1e-10);
    prev = cur;
  }
}

TEST(ObjectiveQ, WFormAndPhiFormAgree) {
  // build a consistent little system and compare both evaluations
  SystemConfig cfg;
  cfg.bs_antennas = 3;
  cfg.star_nx = 2;
  cfg.star_nz = 2;
  cfg.users_indoor = 1;
  cfg.users_outdoor = 1;
  cfg.n_part = 2;
  cfg.noise_user_dbm = -20.0;
  Geometry g = sample_geometry(cfg, 200);
  ChannelSet cs = sample_channels(cfg, g, 200);
  const int n = cfg.star_elements(), k_total = 2;
  CounterRng rng(200, 5);
  VecC phi_t(n), phi_r(n);
  for (int i = 0; i < n; ++i) {
    phi_t(i) = std::polar(std::sqrt(0.5), 2 * kPi * rng.uniform(i));
    phi_r(i) = std::polar(std::sqrt(0.5), 2 * kPi * rng.uniform(100 + i));
  }
  MatC w = make_w(3, 2, 201);
  std::vector<MatC> r;
  for (int k = 0; k < k_total; ++k) {
    VecC h2 = cs.h2(k);
    r.push_back(MatC(h2 * h2.adjoint()));
  }
  StageRateData d = make_stage_rate_data(r, phi_t, phi_r, cs.h1, 1, cfg.noise_user_watt());
  VecR tau = update_tau(d, w);
  VecR rho = update_rho(d, w, tau);

  std::vector<std::vector<MatC>> e(k_total);
  for (int k = 0; k < k_total; ++k)
    for (int h = 0; h < k_total; ++h) e[k].push_back(build_e(r[k], cs.h1, w.col(h)));
  double w_form = objective_q(d, w, tau, rho);
  double phi_form = objective_q_phi(e, phi_t, phi_r, 1, cfg.noise_user_watt(), tau, rho);
  EXPECT_NEAR(w_form, phi_form, 1e-10 * (1.0 + std::abs(w_form)));
}

TEST(BeamformSurrogate, TightMinorantAtExpansionPoint) {
  StageRateData d = make_data(3, 4, 109);
  MatC w0 = make_w(4, 3, 109);
  VecR tau = update_tau(d, w0);
  VecR rho = update_rho(d, w0, tau);
  BeamformSurrogate s = beamform_surrogate(d, tau, rho, w0);
  EXPECT_NEAR(beamform_surrogate_value(s, d, tau, rho, w0), objective_q(d, w0, tau, rho), 1e-10);
  // global minorant on random points
  for (int t = 0; t < 10; ++t) {
    MatC w = make_w(4, 3, 300 + t);
    EXPECT_LE(beamform_surrogate_value(s, d, tau, rho, w), objective_q(d, w, tau, rho) + 1e-10);
  }
}
