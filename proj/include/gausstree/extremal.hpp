#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gausstree/errors.hpp"
#include "gausstree/exponent.hpp"
#include "gausstree/model.hpp"
#include "gausstree/rng.hpp"
#include "gausstree/tree.hpp"

namespace gausstree {

// Decode a Prufer sequence (entries in 1..d, length d-2) into the labeled
// tree it encodes.
inline TreeStructure prufer_decode(const std::vector<int>& seq, int d) {
  if (d < 2) throw NotATree("a tree needs at least 2 nodes");
  if (static_cast<int>(seq.size()) != d - 2) throw BadInput("prufer sequence must have d-2 entries");
  std::vector<int> deg(d + 1, 1);
  for (int v : seq) {
    if (v < 1 || v > d) throw NodeOutOfRange("prufer entry outside 1..d");
    ++deg[v];
  }
  std::vector<Edge> edges;
  edges.reserve(d - 1);
  int ptr = 1;
  while (deg[ptr] != 1) ++ptr;
  int leaf = ptr;
  for (int v : seq) {
    edges.push_back(make_edge(leaf, v));
    if (--deg[v] == 1 && v < ptr) {
      leaf = v;
    } else {
      ++ptr;
      while (deg[ptr] != 1) ++ptr;
      leaf = ptr;
    }
  }
  edges.push_back(make_edge(leaf, d));
  return TreeStructure(d, std::move(edges));
}

// All d^(d-2) labeled spanning trees on d nodes, by Prufer sequence.
class TreeEnumeration {
 public:
  explicit TreeEnumeration(int d) : d_(d) {
    if (d < 2) throw NotATree("a tree needs at least 2 nodes");
    count_ = 1;
    for (int k = 0; k < d - 2; ++k) count_ *= static_cast<std::uint64_t>(d);
  }

  std::uint64_t count() const { return count_; }

  TreeStructure tree(std::uint64_t index) const {
    if (index >= count_) throw BadInput("tree index out of range");
    std::vector<int> seq(d_ >= 2 ? d_ - 2 : 0);
    for (int k = d_ - 3; k >= 0; --k) {
      seq[k] = static_cast<int>(index % d_) + 1;
      index /= d_;
    }
    return prufer_decode(seq, d_);
  }

 private:
  int d_;
  std::uint64_t count_;
};

// Star with center node 1; edge (1, j+1) carries rho[j-1].
inline GaussianTreeModel make_star(int d, const std::vector<double>& rho) {
  if (d < 3) throw BadInput("star needs d >= 3");
  if (static_cast<int>(rho.size()) != d - 1) throw BadInput("star needs d-1 correlations");
  std::vector<Edge> edges;
  CorrelationAssignment corr;
  for (int j = 2; j <= d; ++j) {
    edges.push_back({1, j});
    corr.set(1, j, rho[j - 2]);
  }
  return GaussianTreeModel(TreeStructure(d, std::move(edges)), corr);
}

// Chain 1-2-...-d; edge (i, i+1) carries rho[i-1]. Sorted-descending input
// is what makes this the maximizing placement (under the rho_crit cap).
inline GaussianTreeModel make_chain(int d, const std::vector<double>& rho) {
  if (d < 2) throw BadInput("chain needs d >= 2");
  if (static_cast<int>(rho.size()) != d - 1) throw BadInput("chain needs d-1 correlations");
  std::vector<Edge> edges;
  CorrelationAssignment corr;
  for (int i = 1; i < d; ++i) {
    edges.push_back({i, i + 1});
    corr.set(i, i + 1, rho[i - 1]);
  }
  return GaussianTreeModel(TreeStructure(d, std::move(edges)), corr);
}

// Length-d/2 chain on nodes 1..d/2 with the remaining d/2 nodes attached to
// node d/2 as leaves.
inline TreeStructure make_hybrid(int d) {
  if (d % 2 != 0) throw OddDimension("hybrid tree needs even d");
  if (d < 6) throw BadInput("hybrid tree needs d >= 6");
  std::vector<Edge> edges;
  for (int i = 1; i < d / 2; ++i) edges.push_back({i, i + 1});
  for (int j = d / 2 + 1; j <= d; ++j) edges.push_back({d / 2, j});
  return TreeStructure(d, std::move(edges));
}

struct ExtremalCounterexample {
  std::uint64_t tree_index;
  std::vector<double> placement;
  double value;
  std::string claim;  // "star-min" or "chain-max"
};

struct ExtremalReport {
  int d = 0;
  std::uint64_t trees = 0;
  std::uint64_t evaluations = 0;
  double star_value = 0;          // placement-invariant
  double chain_sorted_value = 0;  // |rho| sorted descending along the chain
  double min_value = 0, max_value = 0;
  std::uint64_t min_tree = 0, max_tree = 0;
  bool chain_claim_checked = false;
  std::vector<ExtremalCounterexample> counterexamples;
};

struct ExtremalScanOptions {
  std::uint64_t max_placements = 100;  // sampled when (d-1)! exceeds this
  bool allow_large_rho = false;        // permit |rho| >= rho_crit (skips the chain claim)
  std::uint64_t seed = 1;
  int max_enumeration_d = 7;
};

// Brute-force check of the extremal-structure results: enumerate every
// labeled tree, place the correlation vector on its edges (exhaustively or
// by sampling), and compare each exponent against the star (claimed global
// minimum for any placement) and the sorted chain (claimed global maximum
// when every |rho| is below rho_crit).
inline ExtremalReport verify_extremal(int d, const std::vector<double>& rho,
                                      const ExtremalScanOptions& opts = {}) {
  if (static_cast<int>(rho.size()) != d - 1) throw BadInput("need d-1 correlations");
  if (d < 3) throw BadInput("scan needs d >= 3");
  if (d > opts.max_enumeration_d)
    throw BadInput("enumeration above d = " + std::to_string(opts.max_enumeration_d) +
                   " is disabled by options");
  bool under_crit = true;
  for (double r : rho) {
    CorrelationAssignment::validate(r);
    under_crit = under_crit && std::abs(r) < rho_crit();
  }
  if (!under_crit && !opts.allow_large_rho)
    throw CorrelationTooLarge("|rho| >= 0.63055 present; pass allow_large_rho to scan anyway");

  ExtremalReport rep;
  rep.d = d;
  rep.chain_claim_checked = under_crit;

  std::vector<double> sorted_rho = rho;
  std::sort(sorted_rho.begin(), sorted_rho.end(),
            [](double a, double b) { return std::abs(a) > std::abs(b); });
  rep.star_value = approx_exponent_value(make_star(d, rho).tree(), rho);
  {
    TreeStructure chain = make_chain(d, sorted_rho).tree();
    rep.chain_sorted_value = approx_exponent_value(chain, sorted_rho);
  }

  std::uint64_t factorial = 1;
  for (int k = 2; k <= d - 1; ++k) factorial *= static_cast<std::uint64_t>(k);
  const bool exhaustive = factorial <= opts.max_placements;

  TreeEnumeration all(d);
  rep.trees = all.count();
  rep.min_value = std::numeric_limits<double>::infinity();
  rep.max_value = -std::numeric_limits<double>::infinity();

  std::vector<double> placement(rho.size());
  for (std::uint64_t t = 0; t < all.count(); ++t) {
    TreeStructure tree = all.tree(t);
    auto eval = [&](const std::vector<double>& pl) {
      double v = approx_exponent_value(tree, pl);
      ++rep.evaluations;
      if (v < rep.min_value) {
        rep.min_value = v;
        rep.min_tree = t;
      }
      if (v > rep.max_value) {
        rep.max_value = v;
        rep.max_tree = t;
      }
      if (v < rep.star_value - 1e-12 && rep.counterexamples.size() < 1000)
        rep.counterexamples.push_back({t, pl, v, "star-min"});
      if (rep.chain_claim_checked && v > rep.chain_sorted_value + 1e-12 &&
          rep.counterexamples.size() < 1000)
        rep.counterexamples.push_back({t, pl, v, "chain-max"});
    };
    if (exhaustive) {
      placement = sorted_rho;
      std::sort(placement.begin(), placement.end());
      do {
        eval(placement);
      } while (std::next_permutation(placement.begin(), placement.end()));
    } else {
      Rng rng(opts.seed, t);
      placement = rho;
      for (std::uint64_t s = 0; s < opts.max_placements; ++s) {
        rng.shuffle(placement);
        eval(placement);
      }
    }
  }
  return rep;
}

// New leaf with correlation rho_new attached at `vertex`; the added node
// gets label d+1. Requires the growth hypothesis |rho_new| < min_e |rho_e|.
inline GaussianTreeModel attach_edge(const GaussianTreeModel& model, double rho_new, int vertex) {
  const int d = model.node_count();
  if (vertex < 1 || vertex > d) throw NodeOutOfRange("attachment vertex outside 1..d");
  CorrelationAssignment::validate(rho_new);
  for (double r : model.edge_correlations())
    if (std::abs(rho_new) >= std::abs(r))
      throw CorrelationTooLarge("growth result needs |rho_new| < |rho_e| for every edge");
  std::vector<Edge> edges = model.tree().edges();
  CorrelationAssignment corr;
  for (int k = 0; k < static_cast<int>(edges.size()); ++k)
    corr.set(edges[k].first, edges[k].second, model.rho(k));
  edges.push_back({vertex, d + 1});
  corr.set(vertex, d + 1, rho_new);
  return GaussianTreeModel(TreeStructure(d + 1, std::move(edges)), corr);
}

namespace detail {

inline double max_incident_abs_rho(const GaussianTreeModel& model, int v) {
  double best = 0;
  for (auto [u, k] : model.tree().neighbors(v)) best = std::max(best, std::abs(model.rho(k)));
  return best;
}

}  // namespace detail

// Vertex whose largest incident |rho| is smallest: attaching the new leaf
// there keeps the exponent as large as possible. Ties break to the lowest
// node id.
inline int best_attachment(const GaussianTreeModel& model) {
  int arg = 1;
  double best = detail::max_incident_abs_rho(model, 1);
  for (int v = 2; v <= model.node_count(); ++v) {
    double m = detail::max_incident_abs_rho(model, v);
    if (m < best) {
      best = m;
      arg = v;
    }
  }
  return arg;
}

// Vertex whose largest incident |rho| is largest: the adversarial
// attachment point.
inline int worst_attachment(const GaussianTreeModel& model) {
  int arg = 1;
  double best = detail::max_incident_abs_rho(model, 1);
  for (int v = 2; v <= model.node_count(); ++v) {
    double m = detail::max_incident_abs_rho(model, v);
    if (m > best) {
      best = m;
      arg = v;
    }
  }
  return arg;
}

// True iff the exponent of the marginal on `keep` is no smaller than the
// exponent of the full model.
inline bool subtree_exponent_check(const GaussianTreeModel& model, const std::vector<int>& keep) {
  GaussianTreeModel sub = marginalize(model, keep);
  double k_sub = approx_exponent_value(sub.tree(), sub.edge_correlations());
  double k_full = approx_exponent_value(model.tree(), model.edge_correlations());
  if (!std::isfinite(k_sub)) return true;  // 2-node marginal: nothing can go wrong
  return k_sub >= k_full - 1e-12;
}

}  // namespace gausstree
