#include <gtest/gtest.h>

#include <sstream>

#include "starisac/config.hpp"

using namespace starisac;

TEST(Config, BaselineDefaults) {
  SystemConfig cfg;
  EXPECT_EQ(cfg.bs_antennas, 8);
  EXPECT_EQ(cfg.sensor_elements, 8);
  EXPECT_EQ(cfg.num_users(), 4);
  EXPECT_EQ(cfg.star_elements(), 20);
  EXPECT_DOUBLE_EQ(cfg.pmax_dbm, 20.0);
  EXPECT_DOUBLE_EQ(cfg.rice_h1, 2.0);
  EXPECT_DOUBLE_EQ(cfg.rice_h2_in, 2.0);
  EXPECT_DOUBLE_EQ(cfg.rice_h2_out, 2.0);
  EXPECT_DOUBLE_EQ(cfg.noise_user_dbm, -110.0);
  EXPECT_DOUBLE_EQ(cfg.noise_sensor_dbm, -110.0);
  EXPECT_DOUBLE_EQ(cfg.pathloss_ref_db, 30.0);
  EXPECT_DOUBLE_EQ(cfg.sens_threshold_db, 10.0);
  EXPECT_EQ(cfg.n_part, 10);
  EXPECT_DOUBLE_EQ(cfg.alpha_db, -10.0);
}

TEST(Config, UnitConversions) {
  SystemConfig cfg;
  EXPECT_NEAR(cfg.pmax_watt(), 0.1, 1e-15);
  EXPECT_NEAR(cfg.noise_user_watt(), 1e-14, 1e-25);
  EXPECT_NEAR(cfg.sens_threshold(), 10.0, 1e-12);
  EXPECT_NEAR(cfg.alpha_sq(), 0.1, 1e-12);
}

TEST(Config, ParseSectionsAndOverrides) {
  std::istringstream in(
      "# comment\n"
      "[scenario]\n"
      "bs_antennas = 4\n"
      "star_nx = 2  ; inline comment\n"
      "star_nz = 3\n"
      "n_part = 3\n"
      "[solver]\n"
      "bcd_max_iter = 12\n"
      "scheme = Fixed-STAR\n");
  SystemConfig cfg = parse_config(in);
  EXPECT_EQ(cfg.bs_antennas, 4);
  EXPECT_EQ(cfg.star_elements(), 6);
  EXPECT_EQ(cfg.bcd_max_iter, 12);
  EXPECT_EQ(cfg.scheme, Scheme::FixedStar);
}

TEST(Config, RejectsUnknownKeyAndBadValues) {
  std::istringstream bad_key("no_such_key = 1\n");
  EXPECT_THROW(parse_config(bad_key), std::invalid_argument);
  std::istringstream bad_val("bs_antennas = four\n");
  EXPECT_THROW(parse_config(bad_val), std::invalid_argument);
  std::istringstream bad_range("eta = 1.5\n");
  EXPECT_THROW(parse_config(bad_range), std::invalid_argument);
  std::istringstream bad_part("n_part = 25\n");
  EXPECT_THROW(parse_config(bad_part), std::invalid_argument);
}

TEST(Config, SchemeNames) {
  EXPECT_EQ(scheme_from_string("Proposed"), Scheme::Proposed);
  EXPECT_EQ(scheme_from_string("CPS-STAR"), Scheme::CpsStar);
  EXPECT_EQ(scheme_from_string("IPS-STAR"), Scheme::IpsStar);
  EXPECT_EQ(scheme_from_string("NoStat-STAR"), Scheme::NoStatStar);
  EXPECT_EQ(scheme_from_string("Fixed-STAR"), Scheme::FixedStar);
  EXPECT_THROW(scheme_from_string("bogus"), std::invalid_argument);
}
