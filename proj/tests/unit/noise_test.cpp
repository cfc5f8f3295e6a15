#include "perisem/noise.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "perisem/errors.hpp"
#include "perisem/estimator.hpp"

namespace perisem {
namespace {

const NoiseParams kMixed(1.0, 1.0, 1.0, JumpLaw::kRademacher);

TEST(NoiseTest, SigmaStarExamples) {
  EXPECT_DOUBLE_EQ(sigma_star(NoiseParams(1, 0, 1, JumpLaw::kRademacher)), 1.0);
  EXPECT_DOUBLE_EQ(sigma_star(NoiseParams(0, 1, 2, JumpLaw::kRademacher)), 2.0);
  EXPECT_DOUBLE_EQ(sigma_star(NoiseParams(0.5, 0.5, 4, JumpLaw::kRademacher)), 1.25);
}

TEST(NoiseTest, InvalidParamsRejected) {
  EXPECT_THROW(NoiseParams(0, 0, 1, JumpLaw::kRademacher), Error);
  EXPECT_THROW(NoiseParams(1, 1, 0, JumpLaw::kRademacher), Error);
  EXPECT_THROW(NoiseParams(1, 1, -2, JumpLaw::kStandardGaussian), Error);
}

TEST(NoiseTest, FourthMoments) {
  EXPECT_EQ(NoiseParams(0, 1, 1, JumpLaw::kRademacher).m4(), 1.0);
  EXPECT_EQ(NoiseParams(0, 1, 1, JumpLaw::kStandardGaussian).m4(), 3.0);
}

TEST(NoiseTest, JumpCountHasPoissonMean) {
  const NoiseParams p(0, 1, 3.0, JumpLaw::kRademacher);
  const std::size_t n = 2;
  const int draws = 10000;
  Engine rng(2024);
  double total = 0.0;
  for (int i = 0; i < draws; ++i) total += static_cast<double>(sample_jumps(p, n, rng).size());
  const double lam_n = 3.0 * n;
  EXPECT_NEAR(total / draws, lam_n, 3.0 * std::sqrt(lam_n / draws));
}

TEST(NoiseTest, ArrivalsIncreasingInsideHorizon) {
  Engine rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto jumps = sample_jumps(kMixed, 7, rng);
    ASSERT_EQ(jumps.arrival_times.size(), jumps.marks.size());
    for (std::size_t k = 0; k < jumps.size(); ++k) {
      ASSERT_GT(jumps.arrival_times[k], 0.0);
      ASSERT_LE(jumps.arrival_times[k], 7.0);
      if (k > 0) ASSERT_GT(jumps.arrival_times[k], jumps.arrival_times[k - 1]);
      ASSERT_EQ(std::abs(jumps.marks[k]), 1.0);
    }
  }
}

TEST(NoiseTest, GaussianMarksAreStandard) {
  const NoiseParams p(0, 1, 50.0, JumpLaw::kStandardGaussian);
  Engine rng(9);
  std::vector<double> marks;
  while (marks.size() < 20000) {
    const auto j = sample_jumps(p, 10, rng);
    marks.insert(marks.end(), j.marks.begin(), j.marks.end());
  }
  const auto m = oracle::moments(marks);
  EXPECT_NEAR(m.mean, 0.0, 4 * m.se);
  EXPECT_NEAR(m.var, 1.0, 4 * m.var_se);
}

TEST(NoiseTest, BrownianOnlyCoefficientsHaveVarianceRho1Squared) {
  const NoiseParams p(1.5, 0.0, 1.0, JumpLaw::kRademacher);
  const int reps = 10000;
  std::vector<std::vector<double>> by_j(4);
  for (int r = 0; r < reps; ++r) {
    ReplicateRng rng = ReplicateRng::make(3, r);
    const auto xi = simulate_coefficient_noise(p, 10, 4, rng);
    for (std::size_t j = 0; j < 4; ++j) by_j[j].push_back(xi.xi[j]);
  }
  for (const auto& sample : by_j) {
    const auto m = oracle::moments(sample);
    EXPECT_NEAR(m.var, 2.25, 3 * m.var_se);
  }
}

TEST(NoiseTest, PureJumpWithoutArrivalsIsZero) {
  const NoiseParams p(0.0, 1.0, 1e-6, JumpLaw::kRademacher);
  int checked = 0;
  for (int r = 0; r < 50; ++r) {
    ReplicateRng rng = ReplicateRng::make(1, r);
    const auto xi = simulate_coefficient_noise(p, 3, 3, rng);
    if (xi.jumps.size() != 0) continue;
    ++checked;
    for (double v : xi.xi) EXPECT_EQ(v, 0.0);
  }
  EXPECT_GT(checked, 0);
}

TEST(NoiseTest, CoefficientSecondMomentEqualsSigmaStar) {
  const int reps = 10000;
  const std::size_t n = 30;
  const std::size_t j_max = 8;
  std::vector<std::vector<double>> sq(j_max);
  for (int r = 0; r < reps; ++r) {
    ReplicateRng rng = ReplicateRng::make(77, r);
    const auto xi = simulate_coefficient_noise(kMixed, n, j_max, rng);
    for (std::size_t j = 0; j < j_max; ++j) sq[j].push_back(xi.xi[j] * xi.xi[j]);
  }
  for (std::size_t j = 0; j < j_max; ++j) {
    const auto m = oracle::moments(sq[j]);
    EXPECT_NEAR(m.mean, 2.0, 3 * m.se) << "j=" << j + 1;
  }
}

TEST(NoiseTest, BudgetErrorWhenJMaxExceedsHorizon) {
  ReplicateRng rng = ReplicateRng::make(0, 0);
  try {
    simulate_coefficient_noise(kMixed, 5, 6, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kBudget);
  }
}

// Covariance identity: cov(I_n(phi_i), I_n(phi_j)) = sigma* n delta_ij,
// plus E I_n = 0 and E I_n^2 <= sigma* n.
TEST(NoiseTest, StochasticIntegralCovarianceIdentity) {
  const int reps = 10000;
  const std::size_t n = 20;
  const std::size_t j_max = 6;
  const double root_n = std::sqrt(static_cast<double>(n));
  std::vector<std::vector<double>> integrals(j_max);
  for (int r = 0; r < reps; ++r) {
    ReplicateRng rng = ReplicateRng::make(99, r);
    const auto xi = simulate_coefficient_noise(kMixed, n, j_max, rng);
    for (std::size_t j = 0; j < j_max; ++j) integrals[j].push_back(xi.xi[j] * root_n);
  }
  const double s_star = sigma_star(kMixed);
  for (std::size_t i = 0; i < j_max; ++i) {
    const auto mi = oracle::moments(integrals[i]);
    EXPECT_NEAR(mi.mean, 0.0, 4 * mi.se);
    for (std::size_t j = i; j < j_max; ++j) {
      std::vector<double> prod(reps);
      for (int r = 0; r < reps; ++r) prod[r] = integrals[i][r] * integrals[j][r];
      const auto m = oracle::moments(prod);
      const double target = i == j ? s_star * static_cast<double>(n) : 0.0;
      EXPECT_NEAR(m.mean, target, 4 * m.se) << "i=" << i + 1 << " j=" << j + 1;
      if (i == j) EXPECT_LE(m.mean, s_star * static_cast<double>(n) + 5 * m.se);
    }
  }
}

TEST(NoiseTest, PathIncrementSumHasVarianceSigmaStarN) {
  const int reps = 4000;
  const std::size_t n = 3;
  std::vector<double> sums;
  for (int r = 0; r < reps; ++r) {
    ReplicateRng rng = ReplicateRng::make(12, r);
    const auto path = simulate_path_increments(kMixed, n, 16, rng);
    double s = 0.0;
    for (double v : path.increments) s += v;
    sums.push_back(s);
  }
  const auto m = oracle::moments(sums);
  EXPECT_NEAR(m.var, sigma_star(kMixed) * n, 3 * m.var_se);
}

TEST(NoiseTest, PathNeedsEnoughSteps) {
  ReplicateRng rng = ReplicateRng::make(0, 0);
  EXPECT_THROW(simulate_path_increments(kMixed, 2, 7, rng), Error);
}

TEST(NoiseTest, BoundaryJumpBelongsToClosingCell) {
  EXPECT_EQ(cell_index(0.5, 8, 16), 3u);     // (3/8, 4/8]
  EXPECT_EQ(cell_index(0.5001, 8, 16), 4u);  // (4/8, 5/8]
  EXPECT_EQ(cell_index(2.0, 8, 16), 15u);    // last cell closes at n
  EXPECT_EQ(cell_index(1e-12, 8, 16), 0u);
}

// The exact spectral simulator and the discretized path must give estimates
// with the same law.
TEST(NoiseTest, SpectralAndPathSimulatorsAgreeInLaw) {
  const int reps = 10000;
  const std::size_t n = 4;
  const std::size_t steps = 1000;
  const std::size_t j_max = 4;
  const auto zero = *catalogue("zero");
  std::vector<std::vector<double>> spectral(j_max), path(j_max);
  for (int r = 0; r < reps; ++r) {
    ReplicateRng a = ReplicateRng::make(1001, r);
    const auto xi = simulate_coefficient_noise(kMixed, n, j_max, a);
    const auto est_a = estimate_coefficients_exact(std::vector<double>(j_max, 0.0), xi.xi, n);
    ReplicateRng b = ReplicateRng::make(2002, r);
    const auto sim = simulate_observation(zero, kMixed, n, steps, b);
    const auto est_b = estimate_coefficients_from_path(sim.observation, j_max);
    for (std::size_t j = 0; j < j_max; ++j) {
      spectral[j].push_back(est_a.values()[j]);
      path[j].push_back(est_b.values()[j]);
    }
  }
  for (std::size_t j = 0; j < j_max; ++j) {
    const auto ms = oracle::moments(spectral[j]);
    const auto mp = oracle::moments(path[j]);
    EXPECT_LT(std::abs(ms.mean - mp.mean), 5 * std::hypot(ms.se, mp.se)) << "j=" << j + 1;
    EXPECT_LT(std::abs(ms.var - mp.var), 5 * std::hypot(ms.var_se, mp.var_se)) << "j=" << j + 1;
  }
}

TEST(NoiseTest, SimulationIsDeterministicPerStream) {
  ReplicateRng a = ReplicateRng::make(42, 7);
  ReplicateRng b = ReplicateRng::make(42, 7);
  const auto xa = simulate_coefficient_noise(kMixed, 50, 50, a);
  const auto xb = simulate_coefficient_noise(kMixed, 50, 50, b);
  EXPECT_EQ(xa.xi, xb.xi);
  EXPECT_EQ(xa.jumps.arrival_times, xb.jumps.arrival_times);
  ReplicateRng c = ReplicateRng::make(42, 8);
  EXPECT_NE(simulate_coefficient_noise(kMixed, 50, 50, c).xi, xa.xi);
  EXPECT_NE(stream_seed(42, 7, Stream::kBrownian), stream_seed(42, 7, Stream::kJumps));
}

TEST(NoiseTest, JumpCsvRoundTrip) {
  Engine rng(3);
  const auto jumps = sample_jumps(NoiseParams(0, 1, 2, JumpLaw::kStandardGaussian), 10, rng);
  std::stringstream buf;
  write_jump_csv(buf, jumps);
  EXPECT_EQ(buf.str().substr(0, 10), "k,T_k,Y_k\n");
  const auto back = read_jump_csv(buf);
  EXPECT_EQ(back.arrival_times, jumps.arrival_times);
  EXPECT_EQ(back.marks, jumps.marks);
}

}  // namespace
}  // namespace perisem
