#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "gausstree/crossover.hpp"
#include "gausstree/errors.hpp"
#include "gausstree/model.hpp"

namespace gausstree {

// Magnitude threshold below which the approximate crossover rate is
// monotone increasing in the edge correlation.
inline constexpr double rho_crit() { return 0.63055; }

// Closed-form approximate crossover rate A/B as a function of the two
// correlation coefficients alone. A is the squared half log-ratio of the
// (1-rho^2) terms; B collects the fourth-moment variance contributions.
inline double approx_rate_closed_form(double rho_e, double rho_ep) {
  if (!(std::abs(rho_e) < 1.0) || !(std::abs(rho_ep) < 1.0))
    throw CorrelationOutOfRange("|rho| must be < 1");
  const double y = rho_e * rho_e;
  const double x = rho_ep * rho_ep;
  if (x == 0.0 && y == 0.0)
    throw DegenerateDenominator("approximate rate undefined at rho_e = rho_ep = 0");
  if (x == y) return 0.0;  // B vanishes on the diagonal along with A; the limit is 0
  const double a = 0.5 * std::log((1.0 - x) / (1.0 - y));
  const double b = 2.0 * (x * x + x) / ((1.0 - x) * (1.0 - x)) +
                   2.0 * (y * y + y) / ((1.0 - y) * (1.0 - y)) -
                   4.0 * x * (y + 1.0) / ((1.0 - x) * (1.0 - y));
  return a * a / b;
}

namespace detail {

// Off-diagonal entry of the inverse of the 2x2 marginal covariance on `p`.
inline double inv2x2_offdiag(const Eigen::MatrixXd& sigma, std::pair<int, int> p) {
  const double a = sigma(p.first, p.first);
  const double b = sigma(p.second, p.second);
  const double c = sigma(p.first, p.second);
  const double det = a * b - c * c;
  if (!(det > 0.0) || !(a > 0.0)) throw NotPositiveDefinite("2x2 marginal not positive definite");
  return -c / det;
}

// The symmetric constraint-gradient matrix: +1/2 [Sigma_e^-1]_od on the e
// entries, -1/2 [Sigma_e'^-1]_od on the e' entries. When the pairs share a
// node its row carries both contributions.
inline Eigen::MatrixXd snr_m_matrix(const CrossoverProblem& pr) {
  Eigen::MatrixXd mmat = Eigen::MatrixXd::Zero(pr.m(), pr.m());
  const double ode = inv2x2_offdiag(pr.sigma, pr.e_idx);
  const double odp = inv2x2_offdiag(pr.sigma, pr.ep_idx);
  mmat(pr.e_idx.first, pr.e_idx.second) += 0.5 * ode;
  mmat(pr.e_idx.second, pr.e_idx.first) += 0.5 * ode;
  mmat(pr.ep_idx.first, pr.ep_idx.second) -= 0.5 * odp;
  mmat(pr.ep_idx.second, pr.ep_idx.first) -= 0.5 * odp;
  return mmat;
}

}  // namespace detail

// Exact variance of the information-density difference s_e - s_e', via the
// Gaussian fourth-moment identity: Var = 2 Tr((M Sigma)^2).
inline double information_density_variance(const CrossoverProblem& pr) {
  Eigen::MatrixXd ms = detail::snr_m_matrix(pr) * pr.sigma;
  return 2.0 * (ms * ms).trace();
}

// Approximate crossover rate in signal-to-noise form:
// (I(p_e') - I(p_e))^2 / (2 Var(s_e' - s_e)).
inline double approx_rate_snr(const CrossoverProblem& pr) {
  pr.validate();
  const double di = mutual_information(pr.rho_e()) - mutual_information(pr.rho_ep());
  const double var = information_density_variance(pr);
  if (!(var > 0.0)) throw DegenerateDenominator("zero variance of the information densities");
  return di * di / (2.0 * var);
}

// Edge-pair weight: the smaller of the two crossover rates of the triangle
// spanned by two adjacent edges.
inline double pair_weight(double rho_1, double rho_2) {
  const double prod = rho_1 * rho_2;
  return std::min(approx_rate_closed_form(rho_1, prod), approx_rate_closed_form(rho_2, prod));
}

}  // namespace gausstree
