#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gausstree/approx_rate.hpp"
#include "gausstree/model.hpp"

namespace gausstree {

// Approximate error exponent and the crossover pair achieving it. `value`
// is empty for d == 2, where the edge set cannot be estimated incorrectly.
struct ExponentReport {
  std::optional<double> value;
  Edge argmin_edge{0, 0};     // the replaced edge e
  Edge argmin_partner{0, 0};  // the non-edge e' (full) or adjacent edge (triangle/linear)
  std::string method;
};

// Full scan: min over non-edges e' and edges e on Path(e') of the
// approximate rate at (rho_e, rho_e'), with rho_e' read off the covariance
// (the path product).
inline ExponentReport approx_exponent_full(const GaussianTreeModel& model) {
  ExponentReport rep;
  rep.method = "full";
  const auto& tree = model.tree();
  const int d = model.node_count();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j) {
      if (tree.has_edge(i, j)) continue;
      double rho_ep = model.pair_correlation(i, j);
      for (const Edge& e : tree.path({i, j})) {
        double rate = approx_rate_closed_form(model.rho(e), rho_ep);
        if (rate < best) {
          best = rate;
          rep.argmin_edge = e;
          rep.argmin_partner = {i, j};
        }
      }
    }
  if (std::isfinite(best)) rep.value = best;
  return rep;
}

// Triangle scan: min of the pair weight W over adjacent edge pairs.
inline ExponentReport approx_exponent_triangle(const GaussianTreeModel& model) {
  ExponentReport rep;
  rep.method = "triangle";
  const auto& tree = model.tree();
  double best = std::numeric_limits<double>::infinity();
  for (int v = 1; v <= model.node_count(); ++v) {
    const auto& inc = tree.neighbors(v);
    for (std::size_t a = 0; a < inc.size(); ++a)
      for (std::size_t b = a + 1; b < inc.size(); ++b) {
        int ka = inc[a].second, kb = inc[b].second;
        double w = pair_weight(model.rho(ka), model.rho(kb));
        if (w < best) {
          best = w;
          rep.argmin_edge = tree.edges()[ka];
          rep.argmin_partner = tree.edges()[kb];
        }
      }
  }
  if (std::isfinite(best)) rep.value = best;
  return rep;
}

namespace detail {

// max |rho| over edges adjacent to each edge, one adjacency pass: per
// vertex keep the two largest incident magnitudes, then for edge e = (u,v)
// take the best incident value at u and v excluding e itself.
inline std::vector<double> adjacent_max_abs_rho(const TreeStructure& tree,
                                                const std::vector<double>& rho) {
  const int d = tree.node_count();
  const int ne = static_cast<int>(tree.edges().size());
  std::vector<double> max1(d + 1, 0), max2(d + 1, 0);
  std::vector<int> arg1(d + 1, -1);
  for (int k = 0; k < ne; ++k) {
    double a = std::abs(rho[k]);
    for (int v : {tree.edges()[k].first, tree.edges()[k].second}) {
      if (a > max1[v]) {
        max2[v] = max1[v];
        max1[v] = a;
        arg1[v] = k;
      } else if (a > max2[v]) {
        max2[v] = a;
      }
    }
  }
  std::vector<double> out(ne, 0);
  for (int k = 0; k < ne; ++k) {
    auto [u, v] = tree.edges()[k];
    double bu = (arg1[u] == k) ? max2[u] : max1[u];
    double bv = (arg1[v] == k) ? max2[v] : max1[v];
    out[k] = std::max(bu, bv);
  }
  return out;
}

}  // namespace detail

// Value-only linear form over a bare tree and per-edge correlations (indexed
// like tree.edges()); the hot path of the extremal scans.
inline double approx_exponent_value(const TreeStructure& tree, const std::vector<double>& rho) {
  if (tree.node_count() == 2) return std::numeric_limits<double>::infinity();
  auto rho_star = detail::adjacent_max_abs_rho(tree, rho);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rho.size(); ++k)
    best = std::min(best, approx_rate_closed_form(rho[k], rho[k] * rho_star[k]));
  return best;
}

// Linear-time form: d-1 rate evaluations J(rho_e, rho_e * rho_e*), where
// rho_e* is the largest |rho| among the edges adjacent to e.
inline ExponentReport approx_exponent_linear(const GaussianTreeModel& model) {
  ExponentReport rep;
  rep.method = "linear";
  const auto& tree = model.tree();
  if (model.node_count() == 2) return rep;
  auto rho_star = detail::adjacent_max_abs_rho(tree, model.edge_correlations());
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < static_cast<int>(tree.edges().size()); ++k) {
    double rate = approx_rate_closed_form(model.rho(k), model.rho(k) * rho_star[k]);
    if (rate < best) {
      best = rate;
      rep.argmin_edge = tree.edges()[k];
      // the adjacent edge attaining rho_e*
      for (int v : {tree.edges()[k].first, tree.edges()[k].second})
        for (auto [u, ki] : tree.neighbors(v))
          if (ki != k && std::abs(model.rho(ki)) == rho_star[k]) rep.argmin_partner = tree.edges()[ki];
    }
  }
  if (std::isfinite(best)) rep.value = best;
  return rep;
}

inline ExponentReport approx_exponent(const GaussianTreeModel& model,
                                      const std::string& method = "linear") {
  if (method == "full") return approx_exponent_full(model);
  if (method == "triangle") return approx_exponent_triangle(model);
  if (method == "linear") return approx_exponent_linear(model);
  throw BadInput("unknown exponent method: " + method);
}

}  // namespace gausstree
