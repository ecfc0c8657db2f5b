#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "gausstree/crossover.hpp"
#include "gausstree/errors.hpp"
#include "gausstree/model.hpp"
#include "gausstree/parallel.hpp"
#include "gausstree/rng.hpp"

namespace gausstree {

struct SolverOptions {
  int starts = 8;                 // unperturbed sigma + random restarts
  double perturb_scale = 0.1;     // relative size of the restart perturbations
  double grad_tol = 1e-8;
  double constraint_tol = 1e-9;
  int max_iters = 10000;          // per start, across all penalty stages
  std::uint64_t seed = 2024;
};

// Outcome of one crossover-rate minimization.
struct RateResult {
  double rate = 0;                  // nats, best local minimum found
  Eigen::MatrixXd q_star;           // covariance achieving it
  int starts_used = 0;              // starts that converged
  double constraint_violation = 0;  // |rho_e(q*)^2 - rho_ep(q*)^2| at q_star
  double spread = 0;                // max-min rate over converged starts
};

namespace detail {

// Non-convex program behind the crossover rate: minimize KL(q || p) over
// positive definite q subject to rho_q(e)^2 = rho_q(e')^2. The equality
// surface is the dominating face of the crossover event. Solved per start
// by BFGS on a Cholesky parameterization with a quadratic-penalty schedule,
// then polished with the constrained entry eliminated analytically.
class CrossoverSolver {
 public:
  CrossoverSolver(const CrossoverProblem& pr, const SolverOptions& opts)
      : pr_(pr), opts_(opts), m_(pr.m()) {
    pinv_ = pr_.sigma.inverse();
    Eigen::LLT<Eigen::MatrixXd> llt(pr_.sigma);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("sigma not positive definite");
    chol_p_ = llt.matrixL();
    logdet_p_ = 0;
    for (int i = 0; i < m_; ++i) logdet_p_ += 2.0 * std::log(chol_p_(i, i));
  }

  RateResult solve() {
    RateResult out;
    double best = std::numeric_limits<double>::infinity();
    double worst = -std::numeric_limits<double>::infinity();
    Eigen::MatrixXd best_q;
    for (int s = 0; s < opts_.starts; ++s) {
      Eigen::MatrixXd l0 = start_factor(s);
      auto q = run_start(l0);
      if (!q) continue;
      double rate = kl_of(*q);
      ++out.starts_used;
      if (rate < best) {
        best = rate;
        best_q = *q;
      }
      worst = std::max(worst, rate);
    }
    if (out.starts_used == 0)
      throw SolverDiverged("no crossover-rate start converged");
    out.rate = best;
    out.q_star = best_q;
    out.spread = worst - best;
    out.constraint_violation = std::abs(constraint_of(best_q));
    return out;
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  double kl_of(const Eigen::MatrixXd& q) const { return gaussian_kl(q, pr_.sigma); }

  double constraint_of(const Eigen::MatrixXd& q) const {
    auto r2 = [&](std::pair<int, int> p) {
      return q(p.first, p.second) * q(p.first, p.second) /
             (q(p.first, p.first) * q(p.second, p.second));
    };
    return r2(pr_.e_idx) - r2(pr_.ep_idx);
  }

  Eigen::MatrixXd start_factor(int s) const {
    if (s == 0) return chol_p_;
    Rng rng(opts_.seed, static_cast<std::uint64_t>(s));
    Eigen::MatrixXd u(m_, m_);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) u(i, j) = rng.uniform(-1.0, 1.0);
    Eigen::MatrixXd a = chol_p_ * (Eigen::MatrixXd::Identity(m_, m_) + opts_.perturb_scale * u);
    Eigen::LLT<Eigen::MatrixXd> llt(a * a.transpose());
    return llt.matrixL();
  }

  // ---- phase A: penalty schedule in Cholesky space ----

  // objective and gradient of KL(LL^T || p) + w * c(LL^T)^2 in L
  double penalty_value(const Eigen::VectorXd& x, double w) const {
    Eigen::MatrixXd l = unpack_lower(x);
    double logdet_q = 0;
    for (int i = 0; i < m_; ++i) {
      double di = std::abs(l(i, i));
      if (di < 1e-150) return kInf;
      logdet_q += 2.0 * std::log(di);
    }
    Eigen::MatrixXd q = l * l.transpose();
    for (int i = 0; i < m_; ++i)
      if (!(q(i, i) > 0)) return kInf;
    double tr = (pinv_ * q).trace();
    double kl = 0.5 * (tr - m_ - logdet_q + logdet_p_);
    double c = constraint_of(q);
    double v = kl + w * c * c;
    return std::isfinite(v) ? v : kInf;
  }

  Eigen::VectorXd penalty_grad(const Eigen::VectorXd& x, double w) const {
    Eigen::MatrixXd l = unpack_lower(x);
    Eigen::MatrixXd q = l * l.transpose();
    Eigen::MatrixXd qinv = q.inverse();
    Eigen::MatrixXd s = 0.5 * (pinv_ - qinv);
    double c = constraint_of(q);
    add_constraint_grad(q, 2.0 * w * c, s);
    Eigen::MatrixXd gl = 2.0 * s * l;
    return pack_lower(gl);
  }

  // accumulate scale * dc/dQ (full-matrix convention) into s
  void add_constraint_grad(const Eigen::MatrixXd& q, double scale, Eigen::MatrixXd& s) const {
    auto add_pair = [&](std::pair<int, int> p, double sign) {
      int i = p.first, j = p.second;
      double qe = q(i, j), qi = q(i, i), qj = q(j, j);
      double denom = qi * qj;
      s(i, j) += scale * sign * qe / denom;
      s(j, i) += scale * sign * qe / denom;
      s(i, i) += scale * sign * (-qe * qe / (qi * denom));
      s(j, j) += scale * sign * (-qe * qe / (qj * denom));
    };
    add_pair(pr_.e_idx, +1.0);
    add_pair(pr_.ep_idx, -1.0);
  }

  // ---- phase B: constraint eliminated through the e' entry ----
  //
  // q_ep = sign * q_e * sqrt((Q_kk Q_ll)/(Q_ii Q_jj)) keeps the constraint
  // exactly satisfied; the remaining packed entries are free and the KL
  // log-det acts as a barrier at the cone boundary.

  struct Reduced {
    std::vector<std::pair<int, int>> entries;  // packed (row >= col), excluding ep
    double sign = 1.0;
  };

  Reduced make_reduced(double sign) const {
    Reduced r;
    r.sign = sign;
    auto ep = norm_pair(pr_.ep_idx);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j <= i; ++j)
        if (std::pair{i, j} != ep) r.entries.push_back({i, j});
    return r;
  }

  static std::pair<int, int> norm_pair(std::pair<int, int> p) {
    return p.first >= p.second ? p : std::pair{p.second, p.first};
  }

  Eigen::MatrixXd reduced_q(const Reduced& r, const Eigen::VectorXd& x) const {
    Eigen::MatrixXd q(m_, m_);
    for (std::size_t k = 0; k < r.entries.size(); ++k) {
      auto [i, j] = r.entries[k];
      q(i, j) = q(j, i) = x(static_cast<Eigen::Index>(k));
    }
    auto [i, j] = pr_.e_idx;
    auto [k2, l2] = pr_.ep_idx;
    double ratio = (q(k2, k2) * q(l2, l2)) / (q(i, i) * q(j, j));
    double t = r.sign * q(i, j) * std::sqrt(ratio);
    auto ep = norm_pair(pr_.ep_idx);
    q(ep.first, ep.second) = q(ep.second, ep.first) = t;
    return q;
  }

  double reduced_value(const Reduced& r, const Eigen::VectorXd& x) const {
    Eigen::MatrixXd q = reduced_q(r, x);
    for (int i = 0; i < m_; ++i)
      if (!(q(i, i) > 0)) return kInf;
    Eigen::LLT<Eigen::MatrixXd> llt(q);
    if (llt.info() != Eigen::Success) return kInf;
    double logdet_q = 0;
    for (int i = 0; i < m_; ++i) logdet_q += 2.0 * std::log(llt.matrixL()(i, i));
    double v = 0.5 * ((pinv_ * q).trace() - m_ - logdet_q + logdet_p_);
    return std::isfinite(v) ? v : kInf;
  }

  Eigen::VectorXd reduced_grad(const Reduced& r, const Eigen::VectorXd& x) const {
    Eigen::MatrixXd q = reduced_q(r, x);
    Eigen::MatrixXd g = 0.5 * (pinv_ - q.inverse());
    auto [i, j] = pr_.e_idx;
    auto [k2, l2] = pr_.ep_idx;
    auto ep = norm_pair(pr_.ep_idx);
    double t = q(ep.first, ep.second);
    double gep = 2.0 * g(ep.first, ep.second);  // off-diagonal counts twice
    Eigen::VectorXd out(static_cast<Eigen::Index>(r.entries.size()));
    for (std::size_t k = 0; k < r.entries.size(); ++k) {
      auto [a, b] = r.entries[k];
      double v = (a == b) ? g(a, a) : 2.0 * g(a, b);
      // chain rule through t = sign * q_e * sqrt((Q_kk Q_ll)/(Q_ii Q_jj))
      double dt = 0;
      if (std::pair{a, b} == norm_pair(pr_.e_idx) && q(i, j) != 0) dt += t / q(i, j);
      if (a == b) {
        if (a == k2) dt += 0.5 * t / q(k2, k2);
        if (a == l2) dt += 0.5 * t / q(l2, l2);
        if (a == i) dt -= 0.5 * t / q(i, i);
        if (a == j) dt -= 0.5 * t / q(j, j);
      }
      out(static_cast<Eigen::Index>(k)) = v + gep * dt;
    }
    return out;
  }

  // ---- shared BFGS with Armijo backtracking ----

  template <typename ValueFn, typename GradFn>
  bool bfgs(Eigen::VectorXd& x, ValueFn value, GradFn grad, double tol, int max_iters,
            int* used) const {
    const Eigen::Index n = x.size();
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
    double f = value(x);
    if (!std::isfinite(f)) return false;
    Eigen::VectorXd g = grad(x);
    for (int it = 0; it < max_iters; ++it) {
      if (used) ++*used;
      if (g.lpNorm<Eigen::Infinity>() < tol) return true;
      Eigen::VectorXd p = -h * g;
      double slope = p.dot(g);
      if (!(slope < 0)) {
        h.setIdentity();
        p = -g;
        slope = p.dot(g);
      }
      double step = 1.0;
      double fn = kInf;
      Eigen::VectorXd xn;
      bool ok = false;
      for (int ls = 0; ls < 60; ++ls) {
        xn = x + step * p;
        fn = value(xn);
        if (fn <= f + 1e-4 * step * slope) {
          ok = true;
          break;
        }
        step *= 0.5;
      }
      if (!ok) return g.lpNorm<Eigen::Infinity>() < std::max(tol, 1e-6);
      Eigen::VectorXd gn = grad(xn);
      Eigen::VectorXd s = xn - x, y = gn - g;
      double sy = s.dot(y);
      if (sy > 1e-14) {
        Eigen::VectorXd hy = h * y;
        double yhy = y.dot(hy);
        h += ((sy + yhy) / (sy * sy)) * (s * s.transpose()) -
             (hy * s.transpose() + s * hy.transpose()) / sy;
      }
      x = xn;
      f = fn;
      g = gn;
    }
    return g.lpNorm<Eigen::Infinity>() < std::max(tol, 1e-6);
  }

  // one multi-phase start; returns the polished covariance on convergence
  std::optional<Eigen::MatrixXd> run_start(const Eigen::MatrixXd& l0) const {
    Eigen::VectorXd x = pack_lower(l0);
    int budget = opts_.max_iters;
    int used = 0;
    const double weights[] = {1e2, 1e4, 1e6, 1e8, 1e10};
    for (double w : weights) {
      bfgs(
          x, [&](const Eigen::VectorXd& v) { return penalty_value(v, w); },
          [&](const Eigen::VectorXd& v) { return penalty_grad(v, w); }, 1e-7,
          std::max(50, budget / 8), &used);
      if (used >= budget) break;
    }
    Eigen::MatrixXd l = unpack_lower(x);
    Eigen::MatrixXd q = l * l.transpose();
    // polish on both sign branches of the eliminated entry; a start that
    // drifted onto the mirrored branch would otherwise report its minimum
    std::optional<Eigen::MatrixXd> best;
    double best_val = kInf;
    for (double sign : {1.0, -1.0}) {
      Reduced red = make_reduced(sign);
      Eigen::VectorXd xr(static_cast<Eigen::Index>(red.entries.size()));
      for (std::size_t k = 0; k < red.entries.size(); ++k)
        xr(static_cast<Eigen::Index>(k)) = q(red.entries[k].first, red.entries[k].second);
      if (!std::isfinite(reduced_value(red, xr))) continue;
      bool converged = bfgs(
          xr, [&](const Eigen::VectorXd& v) { return reduced_value(red, v); },
          [&](const Eigen::VectorXd& v) { return reduced_grad(red, v); }, opts_.grad_tol,
          std::max(100, (budget - used) / 2), nullptr);
      if (!converged) continue;
      Eigen::MatrixXd qf = reduced_q(red, xr);
      if (std::abs(constraint_of(qf)) > opts_.constraint_tol) continue;
      double v = kl_of(qf);
      if (v < best_val) {
        best_val = v;
        best = qf;
      }
    }
    return best;
  }

  Eigen::VectorXd pack_lower(const Eigen::MatrixXd& l) const {
    Eigen::VectorXd x(m_ * (m_ + 1) / 2);
    int k = 0;
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j <= i; ++j) x(k++) = l(i, j);
    return x;
  }

  Eigen::MatrixXd unpack_lower(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m_, m_);
    int k = 0;
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j <= i; ++j) l(i, j) = x(k++);
    return l;
  }

  CrossoverProblem pr_;
  SolverOptions opts_;
  int m_;
  Eigen::MatrixXd pinv_, chol_p_;
  double logdet_p_ = 0;
};

}  // namespace detail

// Crossover rate of Theorem-1 form for the given joint problem. Strictly
// positive iff |rho_e| != |rho_e'| in sigma.
inline RateResult solve_crossover_rate(const CrossoverProblem& pr,
                                       const SolverOptions& opts = {}) {
  pr.validate();
  detail::CrossoverSolver solver(pr, opts);
  return solver.solve();
}

struct CrossoverScanEntry {
  Edge edge;        // e in Path(e')
  Edge non_edge;    // e'
  double rate = 0;
};

// Exact error exponent: the smallest crossover rate over every non-edge e'
// and every edge on its path. Empty value when d == 2 (no error events).
struct ExactExponentReport {
  std::optional<double> value;
  Edge argmin_edge{0, 0};
  Edge argmin_non_edge{0, 0};
  std::vector<CrossoverScanEntry> scan;
  int starts_used_min = 0;
  double max_constraint_violation = 0;
  double max_spread = 0;
};

inline ExactExponentReport exact_error_exponent(const GaussianTreeModel& model,
                                                const SolverOptions& opts = {},
                                                int threads = 1) {
  ExactExponentReport rep;
  const auto& tree = model.tree();
  const int d = model.node_count();
  std::vector<std::pair<Edge, Edge>> jobs;
  for (int i = 1; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j) {
      if (tree.has_edge(i, j)) continue;
      for (const Edge& e : tree.path({i, j})) jobs.push_back({e, {i, j}});
    }
  if (jobs.empty()) return rep;  // d == 2: single possible tree

  std::vector<RateResult> results(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t k) {
    auto [e, ep] = jobs[k];
    results[k] = solve_crossover_rate(crossover_problem(model, e, ep), opts);
  });

  rep.starts_used_min = opts.starts;
  std::size_t best = 0;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    rep.scan.push_back({jobs[k].first, jobs[k].second, results[k].rate});
    rep.max_constraint_violation =
        std::max(rep.max_constraint_violation, results[k].constraint_violation);
    rep.max_spread = std::max(rep.max_spread, results[k].spread);
    rep.starts_used_min = std::min(rep.starts_used_min, results[k].starts_used);
    if (results[k].rate < results[best].rate) best = k;
  }
  rep.value = results[best].rate;
  rep.argmin_edge = jobs[best].first;
  rep.argmin_non_edge = jobs[best].second;
  return rep;
}

}  // namespace gausstree
