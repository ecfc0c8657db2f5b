#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <cmath>

#include "gausstree/errors.hpp"
#include "gausstree/model.hpp"
#include "gausstree/rng.hpp"

namespace gausstree {

// A batch of i.i.d. samples, one row per draw.
struct SampleBatch {
  Eigen::MatrixXd data;  // n x d
  std::uint64_t seed = 0;
  long n() const { return data.rows(); }
};

// Empirical second moments sigma_hat = (1/n) sum_k x_k x_k^T. The model mean
// is known to be zero, so no centering.
struct EmpiricalMoments {
  Eigen::MatrixXd sigma_hat;
  long n = 0;
  int dim() const { return static_cast<int>(sigma_hat.rows()); }
};

namespace detail {

// row k of a batch, written into x: x = L z with z standard normal from the
// per-row stream (seed, k)
inline void sample_row(const Eigen::MatrixXd& chol_l, std::uint64_t seed, std::uint64_t row,
                       Eigen::VectorXd& z, Eigen::VectorXd& x) {
  Rng rng(seed, row);
  const auto d = chol_l.rows();
  for (Eigen::Index i = 0; i < d; ++i) z(i) = rng.normal();
  x.noalias() = chol_l.template triangularView<Eigen::Lower>() * z;
}

inline Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& sigma) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("covariance has no Cholesky factor");
  return llt.matrixL();
}

}  // namespace detail

// Draw n i.i.d. vectors from the model. Row k depends only on (seed, k), so
// generation may be split across threads by row blocks without changing the
// result.
inline SampleBatch sample(const GaussianTreeModel& model, long n, std::uint64_t seed) {
  if (n < 1) throw BadInput("sample count must be >= 1");
  const int d = model.node_count();
  Eigen::MatrixXd L = detail::cholesky_factor(model.covariance());
  SampleBatch batch;
  batch.seed = seed;
  batch.data.resize(n, d);
  Eigen::VectorXd z(d), x(d);
  for (long k = 0; k < n; ++k) {
    detail::sample_row(L, seed, static_cast<std::uint64_t>(k), z, x);
    batch.data.row(k) = x.transpose();
  }
  return batch;
}

inline EmpiricalMoments empirical_covariance(const SampleBatch& batch) {
  EmpiricalMoments m;
  m.n = batch.n();
  m.sigma_hat = batch.data.transpose() * batch.data / static_cast<double>(batch.n());
  return m;
}

inline double empirical_correlation(const EmpiricalMoments& m, int i, int j) {
  const auto& s = m.sigma_hat;
  if (i < 1 || j < 1 || i > m.dim() || j > m.dim())
    throw NodeOutOfRange("node index outside 1..d");
  double vi = s(i - 1, i - 1), vj = s(j - 1, j - 1);
  if (!(vi > 0.0) || !(vj > 0.0)) throw DegenerateVariance("zero empirical variance");
  return s(i - 1, j - 1) / std::sqrt(vi * vj);
}

// Empirical mutual information of a node pair in nats. An empirical
// correlation within 1e-12 of +-1 (possible only for degenerate input) is
// clamped and flagged through `saturated`.
inline double empirical_mi(const EmpiricalMoments& m, Edge pair, bool* saturated = nullptr) {
  double r = empirical_correlation(m, pair.first, pair.second);
  double one_minus = 1.0 - r * r;
  if (saturated) *saturated = false;
  if (one_minus < 1e-12) {
    if (saturated) *saturated = true;
    one_minus = 1e-12;
  }
  return -0.5 * std::log(one_minus);
}

}  // namespace gausstree
