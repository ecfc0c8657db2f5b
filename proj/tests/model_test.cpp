#include "gausstree/model.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "gausstree/rng.hpp"
#include "gausstree/extremal.hpp"

namespace gausstree {
namespace {

GaussianTreeModel chain_model(std::vector<double> rho) {
  return make_chain(static_cast<int>(rho.size()) + 1, rho);
}

TEST(MutualInformation, ScalarValues) {
  EXPECT_DOUBLE_EQ(mutual_information(0.0), 0.0);
  EXPECT_NEAR(mutual_information(0.5), 0.14384103622589045, 1e-15);
  EXPECT_DOUBLE_EQ(mutual_information(0.5), mutual_information(-0.5));
  EXPECT_THROW(mutual_information(1.0), CorrelationOutOfRange);
  EXPECT_THROW(mutual_information(-1.2), CorrelationOutOfRange);
}

TEST(MutualInformation, EvenAndIncreasingInMagnitude) {
  double prev = -1;
  for (double r = 0.0; r < 0.995; r += 0.01) {
    double v = mutual_information(r);
    EXPECT_DOUBLE_EQ(v, mutual_information(-r));
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(BuildModel, ChainPathProducts) {
  auto m = chain_model({0.5, 0.4});
  EXPECT_DOUBLE_EQ(m.covariance()(0, 2), 0.2);
  for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(m.covariance()(i, i), 1.0);
}

TEST(BuildModel, StarPathProducts) {
  auto m = make_star(4, {0.5, 0.4, 0.3});
  EXPECT_DOUBLE_EQ(m.pair_correlation(2, 3), 0.5 * 0.4);
  EXPECT_DOUBLE_EQ(m.pair_correlation(2, 4), 0.5 * 0.3);
  EXPECT_DOUBLE_EQ(m.pair_correlation(3, 4), 0.4 * 0.3);
}

TEST(BuildModel, StrongChainStaysPositiveDefinite) {
  auto m = chain_model({0.9, 0.9, 0.9});
  EXPECT_NEAR(m.covariance()(0, 3), 0.729, 1e-15);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.covariance());
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

TEST(BuildModel, RejectsDegenerateCorrelations) {
  EXPECT_THROW(chain_model({0.5, 1.0}), InvalidCorrelation);
  EXPECT_THROW(chain_model({0.5, -1.3}), InvalidCorrelation);
  EXPECT_THROW(chain_model({0.5, 0.0}), InvalidCorrelation);
  CorrelationAssignment corr;
  corr.set(1, 2, 0.5);
  EXPECT_THROW(GaussianTreeModel(TreeStructure(3, {{1, 2}, {2, 3}}), corr), InvalidCorrelation);
}

TEST(BuildModel, PathProductInvariantOnRandomTrees) {
  Rng rng(7, 0);
  for (int rep = 0; rep < 50; ++rep) {
    int d = 3 + static_cast<int>(rng.below(6));
    TreeEnumeration all(d);
    TreeStructure tree = all.tree(rng.below(all.count()));
    CorrelationAssignment corr;
    for (const auto& [i, j] : tree.edges())
      corr.set(i, j, rng.uniform(0.05, 0.95) * (rng.uniform() < 0.5 ? -1 : 1));
    GaussianTreeModel m(tree, corr);
    for (int i = 1; i <= d; ++i)
      for (int j = i + 1; j <= d; ++j) {
        double prod = 1;
        for (const Edge& e : tree.path({i, j})) prod *= m.rho(e);
        EXPECT_NEAR(m.pair_correlation(i, j), prod, 1e-14);
        // correlation decay along paths of length >= 2
        double cap = 1;
        for (const Edge& e : tree.path({i, j})) cap = std::min(cap, std::abs(m.rho(e)));
        if (tree.path({i, j}).size() >= 2)
          EXPECT_LT(std::abs(m.pair_correlation(i, j)), cap);
        else
          EXPECT_LE(std::abs(m.pair_correlation(i, j)), cap);
      }
  }
}

TEST(Marginalize, DegreeTwoContraction) {
  auto m = chain_model({0.5, 0.4});
  auto sub = marginalize(m, {1, 3});
  EXPECT_EQ(sub.node_count(), 2);
  EXPECT_DOUBLE_EQ(sub.rho(0), 0.2);
}

TEST(Marginalize, LeafDrop) {
  auto m = chain_model({0.5, 0.4, 0.3});
  auto sub = marginalize(m, {1, 2, 3});
  EXPECT_EQ(sub.node_count(), 3);
  EXPECT_DOUBLE_EQ(sub.rho(0), 0.5);
  EXPECT_DOUBLE_EQ(sub.rho(1), 0.4);
}

TEST(Marginalize, StarCenterIsNotRemovable) {
  auto m = make_star(5, {0.5, 0.4, 0.3, 0.2});
  EXPECT_THROW(marginalize(m, {2, 3, 4, 5}), NotTreeMarginalizable);
  // but any leaf is
  auto sub = marginalize(m, {1, 2, 3, 4});
  EXPECT_EQ(sub.node_count(), 4);
}

TEST(Marginalize, MatchesPrincipalSubmatrix) {
  Rng rng(21, 0);
  for (int rep = 0; rep < 30; ++rep) {
    int d = 4 + static_cast<int>(rng.below(5));
    TreeEnumeration all(d);
    TreeStructure tree = all.tree(rng.below(all.count()));
    CorrelationAssignment corr;
    for (const auto& [i, j] : tree.edges())
      corr.set(i, j, rng.uniform(0.1, 0.9) * (rng.uniform() < 0.5 ? -1 : 1));
    GaussianTreeModel m(tree, corr);
    // drop one removable node (leaf or degree two)
    std::vector<int> keep;
    int drop = -1;
    for (int v = 1; v <= d && drop < 0; ++v)
      if (tree.degree(v) <= 2) drop = v;
    for (int v = 1; v <= d; ++v)
      if (v != drop) keep.push_back(v);
    auto sub = marginalize(m, keep);
    for (std::size_t a = 0; a < keep.size(); ++a)
      for (std::size_t b = 0; b < keep.size(); ++b)
        EXPECT_NEAR(sub.covariance()(a, b), m.covariance()(keep[a] - 1, keep[b] - 1), 1e-14);
  }
}

}  // namespace
}  // namespace gausstree
