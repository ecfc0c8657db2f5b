#include "gausstree/simulate.hpp"

#include <gtest/gtest.h>

#include "gausstree/extremal.hpp"
#include "gausstree/rng.hpp"

namespace gausstree {
namespace {

TEST(Wilson, KnownValuesAndBounds) {
  auto iv = wilson_interval(0, 100);
  EXPECT_DOUBLE_EQ(iv.lo, 0.0);
  EXPECT_LT(iv.hi, 0.05);
  auto half = wilson_interval(50, 100);
  EXPECT_NEAR(0.5 * (half.lo + half.hi), 0.5, 1e-12);
  EXPECT_THROW(wilson_interval(0, 0), BadInput);
}

TEST(Wilson, CoverageOnCalibratedBinomials) {
  // known p, repeated binomial draws: the 95% interval covers p about 95%
  // of the time
  Rng rng(40, 0);
  for (double p : {0.1, 0.5}) {
    int cover = 0, reps = 400, n = 200;
    for (int r = 0; r < reps; ++r) {
      long k = 0;
      for (int i = 0; i < n; ++i) k += rng.uniform() < p;
      auto iv = wilson_interval(k, n);
      cover += (iv.lo <= p && p <= iv.hi);
    }
    EXPECT_GT(cover, reps * 0.91);
    EXPECT_LE(cover, reps);
  }
}

TEST(ErrorProbability, TwoNodeModelNeverErrs) {
  auto m = make_chain(2, {0.5});
  auto est = estimate_error_probability(m, 10, 200, 7);
  EXPECT_EQ(est.errors, 0);
}

TEST(ErrorProbability, ThreadCountDoesNotChangeCounts) {
  auto m = make_star(5, {0.5, 0.4, 0.3, 0.2});
  auto seq = estimate_error_probability(m, 100, 400, 12345, 1);
  auto par = estimate_error_probability(m, 100, 400, 12345, 8);
  EXPECT_EQ(seq.errors, par.errors);
}

TEST(ErrorProbability, DecaysWithSampleSize) {
  auto m = make_chain(4, {0.7, 0.6, 0.5});
  auto few = estimate_error_probability(m, 40, 800, 3, 2);
  auto many = estimate_error_probability(m, 400, 800, 4, 2);
  EXPECT_GT(few.p_hat(), many.p_hat());
}

TEST(ErrorCurve, FieldsAndZeroErrorFlag) {
  auto m = make_chain(3, {0.8, 0.6});
  auto curve = error_curve(m, {50, 100}, 50, 11, 2, /*with_exact=*/false);
  EXPECT_EQ(curve.points.size(), 2u);
  EXPECT_GT(curve.k_tilde, 0.0);
  EXPECT_FALSE(curve.k_exact.has_value());
  for (const auto& pt : curve.points) {
    if (pt.errors == 0) {
      EXPECT_TRUE(pt.exponent_is_lower_bound);
      EXPECT_NEAR(pt.sim_exponent, std::log(50.0) / pt.n, 1e-12);
    } else {
      EXPECT_NEAR(pt.sim_exponent, -std::log(pt.p_hat) / pt.n, 1e-12);
    }
  }
  EXPECT_THROW(error_curve(m, {100, 50}, 10, 1), BadInput);
}

TEST(SymmetricStar, CovarianceMatchesParameterization) {
  double g = 0.3;
  Eigen::MatrixXd sigma = symmetric_star_covariance(g);
  Eigen::MatrixXd k = sigma.inverse();
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(k(i, i), 1.0, 1e-12);
  for (int j = 1; j < 4; ++j) EXPECT_NEAR(k(0, j), g, 1e-12);
  EXPECT_NEAR(k(1, 2), 0.0, 1e-12);
  // the boundary: gamma = 0.57 is still inside the domain
  EXPECT_NO_THROW(symmetric_star_covariance(0.57));
  EXPECT_THROW(symmetric_star_covariance(0.58), GammaOutOfRange);
  EXPECT_THROW(symmetric_star_covariance(0.0), GammaOutOfRange);
}

TEST(Fig5, RatesGrowWithGammaAndApproximationSitsBelow) {
  SolverOptions opts;
  opts.starts = 4;
  auto rows = fig5_experiment({0.1, 0.2, 0.3}, opts, 2);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_GT(rows[i].exact_rate, 0.0);
    EXPECT_GT(rows[i].approx_rate, 0.0);
    EXPECT_LT(rows[i].approx_rate, rows[i].exact_rate);
    if (i) {
      EXPECT_GT(rows[i].exact_rate, rows[i - 1].exact_rate);
      EXPECT_GT(rows[i].mi_gap, rows[i - 1].mi_gap);
    }
  }
}

TEST(ErrorCurve, SimulatedExponentApproachesTruthFromBelow) {
  // a star with closely spaced correlations saturates P(A_n) near 1 at
  // small n, so the simulated exponent starts near zero and climbs toward
  // the exact exponent as n grows
  auto m = make_star(6, {0.6, 0.55, 0.5, 0.45, 0.4});
  SolverOptions opts;
  opts.starts = 4;
  auto curve = error_curve(m, {20, 80, 320}, 4000, 21, 2, /*with_exact=*/true, opts);
  ASSERT_TRUE(curve.k_exact.has_value());
  std::vector<double> exps;
  for (const auto& pt : curve.points)
    if (pt.errors > 0) exps.push_back(pt.sim_exponent);
  ASSERT_GE(exps.size(), 2u);
  EXPECT_GT(exps.back(), exps.front());
  // closer to the exact exponent at the end than at the start
  EXPECT_LT(std::abs(exps.back() - *curve.k_exact), std::abs(exps.front() - *curve.k_exact));
  // error probability itself is non-increasing across the grid
  for (std::size_t i = 1; i < curve.points.size(); ++i)
    EXPECT_LE(curve.points[i].p_hat, curve.points[i - 1].p_hat + 0.02);
}

}  // namespace
}  // namespace gausstree
