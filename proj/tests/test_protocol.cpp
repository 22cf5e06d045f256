#include <gtest/gtest.h>

#include "starisac/protocol.hpp"

using namespace starisac;

namespace {

// desk-scale scenario used by most protocol tests
SystemConfig small_cfg() {
  SystemConfig cfg;
  cfg.bs_antennas = 4;
  cfg.sensor_elements = 4;
  cfg.star_nx = 3;
  cfg.star_nz = 2;
  cfg.users_indoor = 1;
  cfg.users_outdoor = 1;
  cfg.n_part = 3;
  cfg.mc_samples = 3000;
  cfg.mc_samples_max = 12000;
  cfg.eval_draws = 200;
  cfg.randomization_count = 50;
  cfg.bcd_max_iter = 12;
  return cfg;
}

}  // namespace

TEST(RunStage, PreparationWithInactiveConstraintsMatchesCommunication) {
  SystemConfig cfg = small_cfg();
  cfg.sens_threshold_db = -400.0;  // delta -> 0
  cfg.n_part = cfg.star_elements();
  Geometry g = sample_geometry(cfg, 40);
  ChannelSet cs = sample_channels(cfg, g, 40);
  SlotAngles angles = make_slot_angles(cfg, g, 40, true);
  ExpectationSet exp = build_expectation_set(cfg, cs, angles.prep_opt, false, 40);

  StageOptions prep;
  prep.stage = Stage::Preparation;
  prep.sensing_active = false;
  prep.optimize_partition = true;
  StageResult a = run_stage(cfg, cs, exp, prep, 40);

  StageOptions comm;
  comm.stage = Stage::Communication;
  StageResult b = run_stage(cfg, cs, exp, comm, 40);

  ASSERT_EQ(a.status, Status::Optimal);
  ASSERT_EQ(b.status, Status::Optimal);
  EXPECT_NEAR(a.bound_rate, b.bound_rate, 1e-6 * (1.0 + std::abs(b.bound_rate)));
}

TEST(RunStage, MonotoneTraceAndConvergence) {
  SystemConfig cfg = small_cfg();
  Geometry g = sample_geometry(cfg, 41);
  ChannelSet cs = sample_channels(cfg, g, 41);
  SlotAngles angles = make_slot_angles(cfg, g, 41, true);
  ExpectationSet exp = build_expectation_set(cfg, cs, angles.prep_opt, true, 41);
  StageResult r = run_preparation_stage(cfg, cs, exp, 41);
  ASSERT_EQ(r.status, Status::Optimal);
  for (std::size_t i = 1; i < r.objective_trace.size(); ++i)
    EXPECT_GE(r.objective_trace[i], r.objective_trace[i - 1] - 1e-6) << "iteration " << i;
  EXPECT_TRUE(r.converged);
}

TEST(RunStage, ObjectiveBelowCrudeUpperBound) {
  SystemConfig cfg = small_cfg();
  Geometry g = sample_geometry(cfg, 42);
  ChannelSet cs = sample_channels(cfg, g, 42);
  SlotAngles angles = make_slot_angles(cfg, g, 42, true);
  ExpectationSet exp = build_expectation_set(cfg, cs, angles.comm_opt, false, 42);
  StageResult r = run_communication_stage(cfg, cs, exp, 42);
  ASSERT_EQ(r.status, Status::Optimal);
  // chain gain bound: ||R(k)|| * N * ||H1||^2 through any |phi| <= 1
  double worst = 0.0;
  for (const auto& rk : exp.r) worst = std::max(worst, rk.operatorNorm());
  double bound = cfg.num_users() *
                 std::log2(1.0 + cfg.pmax_watt() * worst * cfg.star_elements() *
                                     cs.h1.operatorNorm() * cs.h1.operatorNorm() /
                                     cfg.noise_user_watt());
  EXPECT_LE(r.bound_rate, bound);
}

TEST(RunStage, ZeroWarmStartMatchesMatchedFilterStart) {
  SystemConfig cfg = small_cfg();
  Geometry g = sample_geometry(cfg, 43);
  ChannelSet cs = sample_channels(cfg, g, 43);
  SlotAngles angles = make_slot_angles(cfg, g, 43, true);
  ExpectationSet exp = build_expectation_set(cfg, cs, angles.comm_opt, false, 43);
  StageOptions comm;
  comm.stage = Stage::Communication;
  StageWarmStart zero;
  zero.w = MatC::Zero(cfg.bs_antennas, cfg.num_users());
  StageResult a = run_stage(cfg, cs, exp, comm, 43, &zero);
  StageResult b = run_stage(cfg, cs, exp, comm, 43);
  ASSERT_EQ(a.status, Status::Optimal);
  EXPECT_NEAR(a.bound_rate, b.bound_rate, 1e-4 * (1.0 + std::abs(b.bound_rate)));
}

TEST(RunStage, SingleUserPureLosNearGridBound) {
  SystemConfig cfg;
  cfg.bs_antennas = 2;
  cfg.sensor_elements = 2;
  cfg.star_nx = 2;
  cfg.star_nz = 1;
  cfg.users_indoor = 1;
  cfg.users_outdoor = 0;
  cfg.n_part = 2;
  cfg.rice_h1 = 1e12;
  cfg.rice_h2_in = 1e12;
  cfg.mc_samples = 100;
  cfg.eval_draws = 10;
  cfg.bcd_max_iter = 20;
  Geometry g = sample_geometry(cfg, 44);
  ChannelSet cs = sample_channels(cfg, g, 44);
  SlotAngles angles = make_slot_angles(cfg, g, 44, true);
  ExpectationSet exp = build_expectation_set(cfg, cs, angles.comm_opt, false, 44);
  StageResult r = run_communication_stage(cfg, cs, exp, 44);
  ASSERT_EQ(r.status, Status::Optimal);

  // 1-degree grid over the two transmission phases, full amplitude
  VecC h2 = cs.h2(0);
  double best = 0.0;
  for (int d1 = 0; d1 < 360; ++d1)
    for (int d2 = 0; d2 < 360; ++d2) {
      VecC phi(2);
      phi << std::polar(1.0, deg_to_rad(d1)), std::polar(1.0, deg_to_rad(d2));
      double gain = (h2.adjoint() * phi.asDiagonal() * cs.h1).norm();
      best = std::max(best, std::log2(1.0 + cfg.pmax_watt() * gain * gain / cfg.noise_user_watt()));
    }
  EXPECT_GE(r.bound_rate, best * 0.98);
  EXPECT_LE(r.bound_rate, best * 1.02);
}

TEST(RunStage, ZeroPowerGivesZeroRate) {
  SystemConfig cfg = small_cfg();
  cfg.pmax_dbm = -400.0;
  Geometry g = sample_geometry(cfg, 45);
  ChannelSet cs = sample_channels(cfg, g, 45);
  SlotAngles angles = make_slot_angles(cfg, g, 45, true);
  ExpectationSet exp = build_expectation_set(cfg, cs, angles.comm_opt, false, 45);
  StageResult r = run_communication_stage(cfg, cs, exp, 45);
  ASSERT_EQ(r.status, Status::Optimal);
  EXPECT_LT(r.bound_rate, 1e-6);
}

TEST(RunSlot, EtaEndpointsBlend) {
  SystemConfig cfg = small_cfg();
  Geometry g = sample_geometry(cfg, 46);
  cfg.eta = 1.0;
  SlotResult a = run_slot(cfg, g, 46);
  ASSERT_EQ(a.status, Status::Optimal);
  EXPECT_DOUBLE_EQ(a.rate_total, a.rate_prep);
  cfg.eta = 0.0;
  SlotResult b = run_slot(cfg, g, 46);
  EXPECT_DOUBLE_EQ(b.rate_total, b.rate_comm);
}

TEST(RunSlot, BitExactReproducibility) {
  SystemConfig cfg = small_cfg();
  Geometry g = sample_geometry(cfg, 47);
  SlotResult a = run_slot(cfg, g, 47);
  SlotResult b = run_slot(cfg, g, 47);
  ASSERT_EQ(a.status, Status::Optimal);
  EXPECT_EQ(a.rate_total, b.rate_total);
  EXPECT_EQ(a.rate_prep, b.rate_prep);
  EXPECT_EQ(a.rate_comm, b.rate_comm);
  ASSERT_EQ(a.assnr.size(), b.assnr.size());
  for (std::size_t i = 0; i < a.assnr.size(); ++i) EXPECT_EQ(a.assnr[i], b.assnr[i]);
  EXPECT_TRUE(a.prep.w == b.prep.w);
  EXPECT_GT(a.rate_total, 0.0);
}

TEST(RunSlot, CommunicationStageIsolatedFromSensingKnobs) {
  SystemConfig cfg = small_cfg();
  Geometry g = sample_geometry(cfg, 48);
  SlotResult a = run_slot(cfg, g, 48);
  cfg.sens_threshold_db = 3.0;
  cfg.n_part = 2;
  SlotResult b = run_slot(cfg, g, 48);
  ASSERT_EQ(a.status, Status::Optimal);
  ASSERT_EQ(b.status, Status::Optimal);
  EXPECT_EQ(a.comm.bound_rate, b.comm.bound_rate);
  EXPECT_TRUE(a.comm.w == b.comm.w);
}

TEST(RunSlot, FeasibilityAuditPasses) {
  SystemConfig cfg = small_cfg();
  Geometry g = sample_geometry(cfg, 49);
  SlotResult s = run_slot(cfg, g, 49);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_TRUE(s.feasible) << s.feasibility_report;
  EXPECT_LE(s.power_prep, cfg.pmax_watt() * (1.0 + 1e-8));
  EXPECT_LE(s.power_comm, cfg.pmax_watt() * (1.0 + 1e-8));
  // final partition binary with the right cardinality
  double ones = 0.0;
  for (int i = 0; i < s.prep.star.b.size(); ++i) {
    EXPECT_TRUE(s.prep.star.b(i) == 0.0 || s.prep.star.b(i) == 1.0);
    ones += s.prep.star.b(i);
  }
  EXPECT_DOUBLE_EQ(ones, static_cast<double>(cfg.n_part));
}

TEST(RunSlot, BinarizationObjectivesLogged) {
  SystemConfig cfg = small_cfg();
  Geometry g = sample_geometry(cfg, 50);
  SlotResult s = run_slot(cfg, g, 50);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_GT(s.prep.objective_pre_binarization, 0.0);
  EXPECT_GT(s.prep.objective_post_binarization, 0.0);
}
