#include "gausstree/empirical.hpp"

#include <gtest/gtest.h>

#include "gausstree/extremal.hpp"

namespace gausstree {
namespace {

TEST(Sample, DeterministicGivenSeed) {
  auto m = make_chain(3, {0.5, 0.4});
  auto a = sample(m, 64, 99);
  auto b = sample(m, 64, 99);
  EXPECT_EQ(a.data, b.data);  // bit identical
  auto c = sample(m, 64, 100);
  EXPECT_NE(a.data, c.data);
}

TEST(Sample, SingleRowHasRankOneMoments) {
  auto m = make_chain(3, {0.5, 0.4});
  auto batch = sample(m, 1, 5);
  EXPECT_EQ(batch.n(), 1);
  auto mom = empirical_covariance(batch);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(mom.sigma_hat);
  EXPECT_EQ(lu.rank(), 1);
}

TEST(Sample, EmpiricalCorrelationConverges) {
  // d=2, rho=0.5, n=1e5: empirical rho within 0.01 (about 3 sigma)
  auto m = make_chain(2, {0.5});
  auto mom = empirical_covariance(sample(m, 100000, 31));
  EXPECT_NEAR(empirical_correlation(mom, 1, 2), 0.5, 0.01);
}

TEST(Sample, CovarianceConvergesEntrywise) {
  auto m = make_chain(3, {0.6, 0.5});
  auto mom = empirical_covariance(sample(m, 100000, 8));
  EXPECT_LT((mom.sigma_hat - m.covariance()).cwiseAbs().maxCoeff(), 0.02);
}

TEST(EmpiricalCovariance, ZeroAndOuterProduct) {
  SampleBatch batch;
  batch.data = Eigen::MatrixXd::Zero(4, 3);
  EXPECT_TRUE(empirical_covariance(batch).sigma_hat.isZero());

  SampleBatch one;
  one.data.resize(1, 2);
  one.data << 2.0, -1.0;
  auto mom = empirical_covariance(one);
  Eigen::MatrixXd expect(2, 2);
  expect << 4, -2, -2, 1;
  EXPECT_EQ(mom.sigma_hat, expect);
}

TEST(EmpiricalMi, ScalarValuesAndEvenness) {
  EmpiricalMoments mom;
  mom.n = 10;
  mom.sigma_hat = Eigen::MatrixXd::Identity(3, 3);
  for (int i = 1; i <= 3; ++i)
    for (int j = i + 1; j <= 3; ++j) EXPECT_DOUBLE_EQ(empirical_mi(mom, {i, j}), 0.0);

  mom.sigma_hat(0, 1) = mom.sigma_hat(1, 0) = 0.6;
  EXPECT_NEAR(empirical_mi(mom, {1, 2}), 0.22314355131420976, 1e-15);
  mom.sigma_hat(0, 1) = mom.sigma_hat(1, 0) = -0.6;
  EXPECT_NEAR(empirical_mi(mom, {1, 2}), 0.22314355131420976, 1e-15);
}

TEST(EmpiricalMi, DegenerateInputs) {
  EmpiricalMoments mom;
  mom.n = 10;
  mom.sigma_hat = Eigen::MatrixXd::Zero(2, 2);
  EXPECT_THROW(empirical_mi(mom, {1, 2}), DegenerateVariance);

  mom.sigma_hat << 1, 1, 1, 1;  // perfectly correlated
  bool saturated = false;
  double v = empirical_mi(mom, {1, 2}, &saturated);
  EXPECT_TRUE(saturated);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_GT(v, 10.0);
}

TEST(Sample, RowStreamsAreScheduleIndependent) {
  // generating rows independently must reproduce the batch
  auto m = make_star(4, {0.5, -0.4, 0.3});
  auto batch = sample(m, 32, 123);
  Eigen::MatrixXd l = detail::cholesky_factor(m.covariance());
  Eigen::VectorXd z(4), x(4);
  for (long k = 31; k >= 0; --k) {  // deliberately reversed order
    detail::sample_row(l, 123, static_cast<std::uint64_t>(k), z, x);
    EXPECT_EQ(batch.data.row(k), x.transpose());
  }
}

}  // namespace
}  // namespace gausstree
