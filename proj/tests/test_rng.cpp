#include <gtest/gtest.h>

#include <cmath>

#include "starisac/rng.hpp"

using namespace starisac;

TEST(CounterRng, DeterministicAndOrderFree) {
  CounterRng a(42, 7);
  CounterRng b(42, 7);
  // access in different orders, same values
  double x3 = a.uniform(3), x0 = a.uniform(0);
  EXPECT_EQ(b.uniform(0), x0);
  EXPECT_EQ(b.uniform(3), x3);
  EXPECT_EQ(a.normal(11), b.normal(11));
  EXPECT_EQ(a.cnormal(5), b.cnormal(5));
}

TEST(CounterRng, StreamsDiffer) {
  CounterRng a(42, 1), b(42, 2), c(43, 1);
  EXPECT_NE(a.bits(0), b.bits(0));
  EXPECT_NE(a.bits(0), c.bits(0));
}

TEST(CounterRng, UniformRange) {
  CounterRng rng(123, 0);
  for (int i = 0; i < 1000; ++i) {
    double u = rng.uniform(i);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    double up = rng.uniform_pos(i);
    EXPECT_GT(up, 0.0);
    EXPECT_LE(up, 1.0);
  }
}

TEST(CounterRng, NormalMoments) {
  CounterRng rng(7, 3);
  const int n = 200000;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    double x = rng.normal(i);
    s1 += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s1 / n, 0.0, 0.02);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(CounterRng, ComplexNormalVariance) {
  CounterRng rng(9, 4);
  const int n = 200000;
  double power = 0, re2 = 0;
  for (int i = 0; i < n; ++i) {
    cxd z = rng.cnormal(i);
    power += std::norm(z);
    re2 += z.real() * z.real();
  }
  EXPECT_NEAR(power / n, 1.0, 0.02);   // total variance 1
  EXPECT_NEAR(re2 / n, 0.5, 0.02);     // each part N(0, 1/2)
}
