#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "gausstree/chow_liu.hpp"
#include "gausstree/empirical.hpp"
#include "gausstree/errors.hpp"
#include "gausstree/exact_rate.hpp"
#include "gausstree/exponent.hpp"
#include "gausstree/model.hpp"
#include "gausstree/parallel.hpp"
#include "gausstree/rng.hpp"

namespace gausstree {

struct WilsonInterval {
  double lo = 0, hi = 1;
};

// 95% Wilson score interval for a binomial proportion.
inline WilsonInterval wilson_interval(long errors, long trials, double z = 1.959963984540054) {
  if (trials < 1) throw BadInput("trials must be >= 1");
  double n = static_cast<double>(trials);
  double p = static_cast<double>(errors) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2 * n)) / denom;
  double half = (z / denom) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  WilsonInterval iv{std::max(0.0, center - half), std::min(1.0, center + half)};
  if (errors == 0) iv.lo = 0.0;
  if (errors == trials) iv.hi = 1.0;
  return iv;
}

struct ErrorEstimate {
  long errors = 0;
  long trials = 0;
  WilsonInterval interval;
  double p_hat() const { return static_cast<double>(errors) / static_cast<double>(trials); }
};

namespace detail {

// One learning trial: draw n samples (trial-specific stream), accumulate
// the second-moment matrix on the fly, run the Chow-Liu estimator, and
// report whether the learned edge set differs from the truth.
inline bool trial_is_error(const Eigen::MatrixXd& chol_l, const TreeStructure& truth, long n,
                           std::uint64_t seed, std::uint64_t trial) {
  const int d = static_cast<int>(chol_l.rows());
  const std::uint64_t trial_seed = Rng::derive(seed, trial);
  Eigen::MatrixXd moment = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd z(d), x(d);
  for (long k = 0; k < n; ++k) {
    sample_row(chol_l, trial_seed, static_cast<std::uint64_t>(k), z, x);
    moment.selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0);
  }
  EmpiricalMoments m;
  m.n = n;
  m.sigma_hat = Eigen::MatrixXd(moment.selfadjointView<Eigen::Lower>()) / static_cast<double>(n);
  return !structures_equal(learn_structure(m), truth);
}

}  // namespace detail

// Estimate P(A_n): the probability that Chow-Liu on n samples returns the
// wrong edge set. Trials use independent (seed, trial) streams, so the
// counts do not depend on the thread count.
inline ErrorEstimate estimate_error_probability(const GaussianTreeModel& model, long n, long trials,
                                                std::uint64_t seed, int threads = 1) {
  if (trials < 1) throw BadInput("trials must be >= 1");
  if (n < 1) throw BadInput("sample count must be >= 1");
  Eigen::MatrixXd chol_l = detail::cholesky_factor(model.covariance());
  std::atomic<long> errors{0};
  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
    if (detail::trial_is_error(chol_l, model.tree(), n, seed, static_cast<std::uint64_t>(t)))
      errors.fetch_add(1, std::memory_order_relaxed);
  });
  ErrorEstimate est;
  est.errors = errors.load();
  est.trials = trials;
  est.interval = wilson_interval(est.errors, est.trials);
  return est;
}

struct ErrorCurvePoint {
  long n = 0;
  long trials = 0;
  long errors = 0;
  double p_hat = 0;
  WilsonInterval interval;
  // -(1/n) log p_hat; when no error was seen this is the lower bound
  // -(1/n) log(1/trials) and `exponent_is_lower_bound` is set.
  double sim_exponent = 0;
  bool exponent_is_lower_bound = false;
};

struct ErrorCurve {
  std::vector<ErrorCurvePoint> points;
  double k_tilde = 0;                  // approximate exponent of the model
  std::optional<double> k_exact;       // exact exponent (empty if skipped)
};

// Error-probability curve over an ascending n grid, with the exact and
// approximate exponents attached as reference values.
inline ErrorCurve error_curve(const GaussianTreeModel& model, const std::vector<long>& n_grid,
                              long trials, std::uint64_t seed, int threads = 1,
                              bool with_exact = true, const SolverOptions& opts = {}) {
  if (n_grid.empty()) throw BadInput("empty n grid");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1]) throw BadInput("n grid must be ascending");
  ErrorCurve curve;
  curve.k_tilde = approx_exponent_value(model.tree(), model.edge_correlations());
  if (with_exact) {
    auto rep = exact_error_exponent(model, opts, threads);
    if (rep.value) curve.k_exact = *rep.value;
  }
  for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
    long n = n_grid[gi];
    // distinct stream block per grid point
    auto est = estimate_error_probability(model, n, trials, Rng::derive(seed, 1000003 + gi), threads);
    ErrorCurvePoint pt;
    pt.n = n;
    pt.trials = est.trials;
    pt.errors = est.errors;
    pt.p_hat = est.p_hat();
    pt.interval = est.interval;
    if (est.errors == 0) {
      pt.exponent_is_lower_bound = true;
      pt.sim_exponent = std::log(static_cast<double>(trials)) / static_cast<double>(n);
    } else {
      pt.sim_exponent = -std::log(pt.p_hat) / static_cast<double>(n);
    }
    curve.points.push_back(pt);
  }
  return curve;
}

struct Fig5Row {
  double gamma = 0;
  double rho_e = 0, rho_ep = 0;
  double mi_gap = 0;        // I(p_e) - I(p_e')
  double exact_rate = 0;    // J
  double approx_rate = 0;   // J~ in SNR form
  double rel_gap = 0;       // |J - J~| / J
};

// Covariance of the 4-node symmetric star whose inverse has unit diagonal
// and gamma on the (1,j) entries, j = 2..4. Positive definite on
// gamma in (0, 1/sqrt(3)).
inline Eigen::MatrixXd symmetric_star_covariance(double gamma) {
  if (!(gamma > 0.0) || !(gamma < 1.0 / std::sqrt(3.0)))
    throw GammaOutOfRange("gamma must lie in (0, 1/sqrt(3))");
  Eigen::MatrixXd k = Eigen::MatrixXd::Identity(4, 4);
  for (int j = 1; j < 4; ++j) k(0, j) = k(j, 0) = gamma;
  Eigen::MatrixXd sigma = k.inverse();
  return 0.5 * (sigma + sigma.transpose());
}

// True-vs-approximate crossover comparison on the symmetric star, with
// e = (1,2) an edge and e' = (3,4) the disjoint non-edge.
inline std::vector<Fig5Row> fig5_experiment(const std::vector<double>& gammas,
                                            const SolverOptions& opts = {}, int threads = 1) {
  std::vector<Fig5Row> rows(gammas.size());
  parallel_for(gammas.size(), threads, [&](std::size_t i) {
    double g = gammas[i];
    CrossoverProblem pr;
    pr.sigma = symmetric_star_covariance(g);
    pr.e_idx = {0, 1};
    pr.ep_idx = {2, 3};
    pr.validate();
    Fig5Row row;
    row.gamma = g;
    row.rho_e = pr.rho_e();
    row.rho_ep = pr.rho_ep();
    row.mi_gap = mutual_information(row.rho_e) - mutual_information(row.rho_ep);
    row.exact_rate = solve_crossover_rate(pr, opts).rate;
    row.approx_rate = approx_rate_snr(pr);
    row.rel_gap = std::abs(row.exact_rate - row.approx_rate) / row.exact_rate;
    rows[i] = row;
  });
  return rows;
}

}  // namespace gausstree
