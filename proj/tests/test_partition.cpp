#include <gtest/gtest.h>

#include "oracles.hpp"
#include "starisac/partition.hpp"

using namespace starisac;

namespace {

// small synthetic model: one outdoor user, hand-built S matrices
PartitionRateModel tiny_model(int n, std::uint64_t seed, int beams = 2) {
  PartitionRateModel m;
  m.noise = 0.4;
  m.tau = VecR::Constant(1, 1.3);
  m.rho = VecR::Constant(1, 0.6);
  std::vector<MatR> row;
  for (int h = 0; h < beams; ++h) {
    MatC p = oracles::random_psd(n, seed + h);
    row.push_back(p.real() + MatR::Identity(n, n) * 0.05);
  }
  m.s.push_back(row);
  return m;
}

}  // namespace

TEST(BinarityPenalty, NonNegativeZeroIffBinary) {
  CounterRng rng(700, 1);
  for (int t = 0; t < 50; ++t) {
    VecR b(6);
    for (int i = 0; i < 6; ++i) b(i) = rng.uniform(10 * t + i);
    EXPECT_GE(binarity_penalty(b), 0.0);
  }
  VecR binary(4);
  binary << 1, 0, 0, 1;
  EXPECT_DOUBLE_EQ(binarity_penalty(binary), 0.0);
  VecR half = VecR::Constant(4, 0.5);
  EXPECT_GT(binarity_penalty(half), 0.9);
}

TEST(BinarityPenalty, LinearizationExactAtPointAndUpperBound) {
  CounterRng rng(701, 2);
  for (int t = 0; t < 100; ++t) {
    VecR b(5), b0(5);
    for (int i = 0; i < 5; ++i) {
      b(i) = rng.uniform(10 * t + i);
      b0(i) = rng.uniform(1000 + 10 * t + i);
    }
    EXPECT_NEAR(binarity_penalty_linearized(b0, b0), binarity_penalty(b0), 1e-14);
    EXPECT_GE(binarity_penalty_linearized(b, b0), binarity_penalty(b) - 1e-12);
    // per-coordinate form
    for (int i = 0; i < 5; ++i) {
      double lhs = b(i) - b(i) * b(i);
      double rhs = b(i) - b0(i) * b0(i) - 2.0 * b0(i) * (b(i) - b0(i));
      EXPECT_LE(lhs, rhs + 1e-14);
    }
  }
}

TEST(PartitionSca, PenaltyDominantLimitBinarizes) {
  PartitionRateModel empty;  // rate term zeroed
  empty.tau = VecR();
  empty.rho = VecR();
  VecR b0(6);
  b0 << 0.3, 0.7, 0.2, 0.9, 0.45, 0.55;
  PartitionResult r = partition_sca(empty, 1e6, b0, 50, 1e-10);
  EXPECT_LE(binarity_penalty(r.b), 1e-6);
}

TEST(PartitionSca, MonotonePenalizedObjective) {
  PartitionRateModel m = tiny_model(5, 710);
  VecR b0 = VecR::Constant(5, 0.5);
  double kappa = 0.1 * std::abs(m.value(b0));
  double prev = m.value(b0) - kappa * binarity_penalty(b0);
  VecR b = b0;
  for (int it = 0; it < 6; ++it) {
    PartitionResult r = partition_sca(m, kappa, b, 1, 0.0);
    double cur = r.penalized_objective;
    EXPECT_GE(cur, prev - 1e-8);
    prev = cur;
    b = r.b;
  }
}

TEST(PartitionSca, MatchesGridOracleOnThreeElements) {
  PartitionRateModel m = tiny_model(3, 720);
  double kappa = 0.05;
  VecR b0 = VecR::Constant(3, 0.4);
  PartitionResult r = partition_sca(m, kappa, b0, 60, 1e-10);
  // exhaustive grid over [0,1]^3, step 0.01
  double best = -1e300;
  for (int i = 0; i <= 100; ++i)
    for (int j = 0; j <= 100; ++j)
      for (int k = 0; k <= 100; ++k) {
        VecR b(3);
        b << i / 100.0, j / 100.0, k / 100.0;
        best = std::max(best, m.value(b) - kappa * binarity_penalty(b));
      }
  EXPECT_NEAR(r.penalized_objective, best, 1e-2 * (1.0 + std::abs(best)));
}

TEST(ProjectTopk, SpecCases) {
  VecR b(3);
  b << 0.9, 0.2, 0.7;
  VecR p = project_topk(b, 2);
  EXPECT_DOUBLE_EQ(p(0), 1.0);
  EXPECT_DOUBLE_EQ(p(1), 0.0);
  EXPECT_DOUBLE_EQ(p(2), 1.0);

  VecR equal = VecR::Constant(4, 0.5);
  VecR q = project_topk(equal, 1);  // lowest-index tie break
  EXPECT_DOUBLE_EQ(q(0), 1.0);
  EXPECT_DOUBLE_EQ(q.sum(), 1.0);

  EXPECT_THROW(project_topk(b, 4), std::invalid_argument);
}

TEST(ProjectTopk, MatchesEnumerationOracle) {
  CounterRng rng(730, 3);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 8;
    const int n_part = 1 + trial % 7;
    VecR b(n);
    for (int i = 0; i < n; ++i) b(i) = rng.uniform(100 * trial + i);
    VecR got = project_topk(b, n_part);
    double got_dist = (got - b).squaredNorm();
    // enumerate all C(8, n_part) binary vectors
    double best = 1e300;
    for (int mask = 0; mask < (1 << n); ++mask) {
      if (__builtin_popcount(mask) != n_part) continue;
      VecR cand = VecR::Zero(n);
      for (int i = 0; i < n; ++i)
        if (mask & (1 << i)) cand(i) = 1.0;
      best = std::min(best, (cand - b).squaredNorm());
    }
    EXPECT_NEAR(got_dist, best, 1e-12);
    EXPECT_DOUBLE_EQ(got.sum(), static_cast<double>(n_part));
  }
}

TEST(ProjectTopk, EnumerationOracleUpToTwelve) {
  CounterRng rng(731, 4);
  const int n = 12, n_part = 5;
  VecR b(n);
  for (int i = 0; i < n; ++i) b(i) = rng.uniform(i);
  VecR got = project_topk(b, n_part);
  double best = 1e300;
  for (int mask = 0; mask < (1 << n); ++mask) {
    if (__builtin_popcount(mask) != n_part) continue;
    VecR cand = VecR::Zero(n);
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) cand(i) = 1.0;
    best = std::min(best, (cand - b).squaredNorm());
  }
  EXPECT_NEAR((got - b).squaredNorm(), best, 1e-12);
}

TEST(HadamardRealForm, QuadraticFormsAgree) {
  CounterRng rng(740, 5);
  const int n = 6;
  MatC e = oracles::random_psd(n, 740);
  VecC phi(n);
  for (int i = 0; i < n; ++i) phi(i) = std::polar(0.3 + 0.7 * rng.uniform(i), 2 * kPi * rng.uniform(50 + i));
  MatR s = hadamard_real_form(e, phi);
  for (int t = 0; t < 20; ++t) {
    VecR b(n);
    for (int i = 0; i < n; ++i) b(i) = rng.uniform(100 * t + i);
    VecC masked = b.cast<cxd>().asDiagonal() * phi;
    double expect = (masked.adjoint() * e * masked)(0).real();
    EXPECT_NEAR(b.dot(s * b), expect, 1e-10 * (1.0 + std::abs(expect)));
  }
}
