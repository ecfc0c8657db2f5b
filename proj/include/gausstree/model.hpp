#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <optional>
#include <queue>
#include <vector>

#include "gausstree/errors.hpp"
#include "gausstree/tree.hpp"

namespace gausstree {

// Mutual information of a bivariate Gaussian with correlation rho, in nats.
inline double mutual_information(double rho) {
  if (!(std::abs(rho) < 1.0)) throw CorrelationOutOfRange("|rho| must be < 1");
  return -0.5 * std::log1p(-rho * rho);
}

// Edge -> correlation coefficient map. Every rho must lie in (-1,1)\{0}.
class CorrelationAssignment {
 public:
  CorrelationAssignment() = default;
  explicit CorrelationAssignment(std::map<Edge, double> rho) : rho_(std::move(rho)) {
    for (auto& [e, r] : rho_) validate(r);
  }

  void set(int i, int j, double r) {
    validate(r);
    rho_[make_edge(i, j)] = r;
  }

  double at(int i, int j) const {
    auto it = rho_.find(make_edge(i, j));
    if (it == rho_.end()) throw BadInput("no correlation assigned to this edge");
    return it->second;
  }

  const std::map<Edge, double>& map() const { return rho_; }
  std::size_t size() const { return rho_.size(); }

  static void validate(double r) {
    if (!(std::abs(r) < 1.0) || !std::isfinite(r))
      throw InvalidCorrelation("edge correlation must satisfy |rho| < 1");
    if (r == 0.0)
      throw InvalidCorrelation("zero edge correlation makes the model a forest");
  }

 private:
  std::map<Edge, double> rho_;
};

namespace detail {

// Cholesky with an explicit smallest-pivot report; Eigen's LLT does not
// expose the pivot that failed.
inline std::optional<double> min_cholesky_pivot(const Eigen::MatrixXd& a) {
  const auto n = a.rows();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  double min_pivot = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) {
    double s = a(j, j) - L.row(j).head(j).squaredNorm();
    if (!(s > 0.0)) return std::nullopt;
    min_pivot = std::min(min_pivot, s);
    L(j, j) = std::sqrt(s);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double v = a(i, j) - (L.row(i).head(j) * L.row(j).head(j).transpose()).value();
      L(i, j) = v / L(j, j);
    }
  }
  return min_pivot;
}

}  // namespace detail

// Zero-mean Gaussian Markov on a spanning tree, unit variances. The
// covariance entry of any node pair is the product of the edge correlations
// along the tree path between them.
class GaussianTreeModel {
 public:
  GaussianTreeModel(TreeStructure tree, const CorrelationAssignment& corr)
      : tree_(std::move(tree)), rho_(tree_.edges().size()) {
    const auto& E = tree_.edges();
    if (corr.size() != E.size())
      throw InvalidCorrelation("correlation map must cover exactly the tree edges");
    for (int k = 0; k < static_cast<int>(E.size()); ++k) rho_[k] = corr.at(E[k].first, E[k].second);
    build_covariance();
  }

  const TreeStructure& tree() const { return tree_; }
  int node_count() const { return tree_.node_count(); }
  const std::vector<double>& edge_correlations() const { return rho_; }
  double rho(int edge_index) const { return rho_[edge_index]; }
  double rho(Edge e) const { return rho_[require_edge(e)]; }
  const Eigen::MatrixXd& covariance() const { return sigma_; }

  std::vector<Edge> path(Edge pair) const { return tree_.path(pair); }

  // correlation of an arbitrary node pair (path product, = covariance entry)
  double pair_correlation(int i, int j) const {
    if (i < 1 || i > node_count() || j < 1 || j > node_count())
      throw NodeOutOfRange("node index outside 1..d");
    return sigma_(i - 1, j - 1);
  }

 private:
  int require_edge(Edge e) const {
    int k = tree_.edge_index(e.first, e.second);
    if (k < 0) throw BadInput("pair is not a tree edge");
    return k;
  }

  void build_covariance() {
    const int d = tree_.node_count();
    sigma_ = Eigen::MatrixXd::Identity(d, d);
    // one BFS per root; products stay exact, no inversion involved. Both
    // triangles are written from the same product so the matrix is
    // bit-symmetric.
    for (int root = 1; root <= d; ++root) {
      std::vector<char> seen(d + 1, 0);
      std::queue<std::pair<int, double>> q;
      q.push({root, 1.0});
      seen[root] = 1;
      while (!q.empty()) {
        auto [u, prod] = q.front();
        q.pop();
        for (auto [v, k] : tree_.neighbors(u))
          if (!seen[v]) {
            seen[v] = 1;
            double p = prod * rho_[k];
            if (v > root) {
              sigma_(root - 1, v - 1) = p;
              sigma_(v - 1, root - 1) = p;
            }
            q.push({v, p});
          }
      }
    }
    auto pivot = detail::min_cholesky_pivot(sigma_);
    if (!pivot || *pivot <= 1e-12)
      throw NotPositiveDefinite("model covariance is not numerically positive definite");
  }

  TreeStructure tree_;
  std::vector<double> rho_;
  Eigen::MatrixXd sigma_;
};

inline GaussianTreeModel build_model(const TreeStructure& tree, const CorrelationAssignment& corr) {
  return GaussianTreeModel(tree, corr);
}

// Marginal of the model onto `keep` (1-based node ids). Nodes are removed
// leaf-first / degree-2-contraction; a removed hub of degree >= 3 would not
// leave a tree, so it is rejected. Kept nodes are relabeled 1..d' in
// ascending order of their original ids.
inline GaussianTreeModel marginalize(const GaussianTreeModel& model, const std::vector<int>& keep) {
  const int d = model.node_count();
  std::vector<char> kept(d + 1, 0);
  for (int v : keep) {
    if (v < 1 || v > d) throw NodeOutOfRange("keep set contains node outside 1..d");
    kept[v] = 1;
  }
  int d2 = 0;
  for (int v = 1; v <= d; ++v) d2 += kept[v];
  if (d2 < 2) throw BadInput("marginal needs at least 2 nodes");

  // mutable adjacency: node -> (neighbor -> rho)
  std::vector<std::map<int, double>> adj(d + 1);
  for (int k = 0; k < static_cast<int>(model.tree().edges().size()); ++k) {
    auto [i, j] = model.tree().edges()[k];
    adj[i][j] = model.rho(k);
    adj[j][i] = model.rho(k);
  }
  std::queue<int> ready;
  for (int v = 1; v <= d; ++v)
    if (!kept[v] && adj[v].size() <= 2) ready.push(v);
  std::vector<char> gone(d + 1, 0);
  int removed = 0;
  while (!ready.empty()) {
    int v = ready.front();
    ready.pop();
    if (gone[v] || adj[v].size() > 2) continue;
    gone[v] = 1;
    ++removed;
    if (adj[v].size() == 1) {
      int u = adj[v].begin()->first;
      adj[u].erase(v);
      if (!kept[u] && !gone[u] && adj[u].size() <= 2) ready.push(u);
    } else if (adj[v].size() == 2) {
      auto it = adj[v].begin();
      auto [a, ra] = *it;
      auto [b, rb] = *std::next(it);
      adj[a].erase(v);
      adj[b].erase(v);
      adj[a][b] = ra * rb;
      adj[b][a] = ra * rb;
    }
    adj[v].clear();
  }
  if (removed != d - d2)
    throw NotTreeMarginalizable(
        "a removed node keeps degree >= 3 in every elimination order; the marginal is not a tree");

  std::vector<int> relabel(d + 1, 0);
  int next = 0;
  for (int v = 1; v <= d; ++v)
    if (kept[v]) relabel[v] = ++next;
  std::vector<Edge> edges;
  CorrelationAssignment corr;
  for (int v = 1; v <= d; ++v)
    if (kept[v])
      for (auto [u, r] : adj[v])
        if (v < u) {
          edges.push_back(make_edge(relabel[v], relabel[u]));
          corr.set(relabel[v], relabel[u], r);
        }
  return GaussianTreeModel(TreeStructure(d2, std::move(edges)), corr);
}

}  // namespace gausstree
