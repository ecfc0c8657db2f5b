#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <vector>

#include "gausstree/empirical.hpp"
#include "gausstree/errors.hpp"
#include "gausstree/tree.hpp"

namespace gausstree {

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int root(int i) {
    while (i != parent_[i]) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  bool unite(int a, int b) {
    int ra = root(a), rb = root(b);
    if (ra == rb) return false;
    if (size_[ra] < size_[rb]) std::swap(ra, rb);
    parent_[rb] = ra;
    size_[ra] += size_[rb];
    return true;
  }

 private:
  std::vector<int> parent_, size_;
};

}  // namespace detail

// Maximum-weight spanning tree of the complete graph on d nodes, Kruskal
// with union-find. Ties are broken by lexicographic edge order so the result
// is deterministic on file-driven input.
inline TreeStructure mwst_from_weights(const Eigen::MatrixXd& w) {
  const int d = static_cast<int>(w.rows());
  if (d < 2) throw BadInput("need at least 2 nodes");
  std::vector<Edge> pairs;
  pairs.reserve(d * (d - 1) / 2);
  for (int i = 1; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j) pairs.push_back({i, j});
  std::stable_sort(pairs.begin(), pairs.end(), [&](const Edge& a, const Edge& b) {
    double wa = w(a.first - 1, a.second - 1), wb = w(b.first - 1, b.second - 1);
    if (wa != wb) return wa > wb;
    return a < b;
  });
  detail::UnionFind uf(d + 1);
  std::vector<Edge> chosen;
  for (const auto& e : pairs) {
    if (uf.unite(e.first, e.second)) {
      chosen.push_back(e);
      if (static_cast<int>(chosen.size()) == d - 1) break;
    }
  }
  return TreeStructure(d, std::move(chosen));
}

// Chow-Liu structure estimate: MWST under empirical mutual information.
// rho_hat^2 is used as the edge weight; it is a strictly increasing
// transform of the empirical MI, so the argmax tree is unchanged and the
// log evaluations are avoided.
inline TreeStructure learn_structure(const EmpiricalMoments& m) {
  const int d = m.dim();
  if (d < 2) throw BadInput("need at least 2 nodes");
  for (int i = 1; i <= d; ++i)
    if (!(m.sigma_hat(i - 1, i - 1) > 0.0))
      throw DegenerateVariance("zero empirical variance");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      double r2 = m.sigma_hat(i, j) * m.sigma_hat(i, j) /
                  (m.sigma_hat(i, i) * m.sigma_hat(j, j));
      w(i, j) = w(j, i) = r2;
    }
  return mwst_from_weights(w);
}

// The error event compares edge sets exactly, not up to isomorphism.
inline bool structures_equal(const TreeStructure& a, const TreeStructure& b) {
  if (a.node_count() != b.node_count())
    throw DimensionMismatch("structures have different node counts");
  return a.edges() == b.edges();
}

}  // namespace gausstree
