#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "gausstree/errors.hpp"
#include "gausstree/model.hpp"

namespace gausstree {

// KL divergence between zero-mean Gaussians N(0,q) and N(0,p), in nats.
inline double gaussian_kl(const Eigen::MatrixXd& q, const Eigen::MatrixXd& p) {
  if (q.rows() != p.rows() || q.rows() != q.cols() || p.rows() != p.cols())
    throw DimensionMismatch("covariances must be square and equally sized");
  const auto m = q.rows();
  Eigen::LLT<Eigen::MatrixXd> lp(p), lq(q);
  if (lp.info() != Eigen::Success || lq.info() != Eigen::Success)
    throw NotPositiveDefinite("gaussian_kl needs positive definite inputs");
  double logdet_p = 0, logdet_q = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    logdet_p += 2.0 * std::log(lp.matrixL()(i, i));
    logdet_q += 2.0 * std::log(lq.matrixL()(i, i));
  }
  double tr = lp.solve(q).trace();
  return 0.5 * (tr - static_cast<double>(m) - logdet_q + logdet_p);
}

// Joint description of two node pairs e, e' for a crossover-rate
// computation: the m x m covariance of the distinct nodes (m=3 when the
// pairs share a node, m=4 otherwise) plus which index pairs are e and e'.
// Indices are 0-based within sigma.
struct CrossoverProblem {
  Eigen::MatrixXd sigma;
  std::pair<int, int> e_idx;
  std::pair<int, int> ep_idx;

  int m() const { return static_cast<int>(sigma.rows()); }
  bool adjacent() const { return m() == 3; }

  double corr(std::pair<int, int> p) const {
    return sigma(p.first, p.second) / std::sqrt(sigma(p.first, p.first) * sigma(p.second, p.second));
  }
  double rho_e() const { return corr(e_idx); }
  double rho_ep() const { return corr(ep_idx); }

  void validate() const {
    const int mm = m();
    if (mm != 3 && mm != 4) throw DimensionMismatch("crossover problems have 3 or 4 nodes");
    auto in_range = [&](std::pair<int, int> p) {
      return p.first >= 0 && p.first < mm && p.second >= 0 && p.second < mm && p.first != p.second;
    };
    if (!in_range(e_idx) || !in_range(ep_idx)) throw NodeOutOfRange("pair index outside matrix");
    auto canon = [](std::pair<int, int> p) {
      return p.first < p.second ? p : std::pair{p.second, p.first};
    };
    if (canon(e_idx) == canon(ep_idx)) throw BadInput("e and e' must be distinct pairs");
    std::array<int, 4> ids{e_idx.first, e_idx.second, ep_idx.first, ep_idx.second};
    std::sort(ids.begin(), ids.end());
    int distinct = 1;
    for (int k = 1; k < 4; ++k) distinct += ids[k] != ids[k - 1];
    if (distinct != mm) throw DimensionMismatch("pair indices must cover all m nodes");
    double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * (1.0 + sigma.cwiseAbs().maxCoeff()))
      throw BadInput("sigma must be symmetric");
    if (Eigen::LLT<Eigen::MatrixXd>(sigma).info() != Eigen::Success)
      throw NotPositiveDefinite("sigma must be positive definite");
  }
};

// The crossover problem for an edge e and a distinct pair ep of the model:
// principal submatrix of the model covariance on the union of their nodes.
inline CrossoverProblem crossover_problem(const GaussianTreeModel& model, Edge e, Edge ep) {
  std::vector<int> nodes{e.first, e.second, ep.first, ep.second};
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  const int m = static_cast<int>(nodes.size());
  auto local = [&](int v) {
    return static_cast<int>(std::lower_bound(nodes.begin(), nodes.end(), v) - nodes.begin());
  };
  CrossoverProblem pr;
  pr.sigma.resize(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) pr.sigma(a, b) = model.covariance()(nodes[a] - 1, nodes[b] - 1);
  pr.e_idx = {local(e.first), local(e.second)};
  pr.ep_idx = {local(ep.first), local(ep.second)};
  pr.validate();
  return pr;
}

// Embed a bare (rho_e, rho_ep) pair as the 3-node model in which e is an
// edge and e' the non-edge completing the triangle, so rho_ep must be the
// path product rho_e * rho_mid with |rho_mid| < 1.
inline CrossoverProblem crossover_problem(double rho_e, double rho_ep) {
  CorrelationAssignment::validate(rho_e);
  if (!(std::abs(rho_ep) < std::abs(rho_e)))
    throw InvalidCorrelation(
        "3-node embedding needs |rho_ep| < |rho_e| (rho_ep is a path product through e)");
  double rho_mid = rho_ep / rho_e;
  CrossoverProblem pr;
  pr.sigma.resize(3, 3);
  pr.sigma << 1.0, rho_e, rho_mid,
              rho_e, 1.0, rho_ep,
              rho_mid, rho_ep, 1.0;
  pr.e_idx = {0, 1};
  pr.ep_idx = {1, 2};
  pr.validate();
  return pr;
}

}  // namespace gausstree
