#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <set>
#include <utility>
#include <vector>

#include "gausstree/errors.hpp"

namespace gausstree {

// Unordered node pair stored canonically as (i, j) with i < j, 1-based.
using Edge = std::pair<int, int>;

inline Edge make_edge(int i, int j) {
  if (i == j) throw BadInput("edge endpoints must differ");
  return i < j ? Edge{i, j} : Edge{j, i};
}

// Undirected spanning tree on nodes 1..d.
class TreeStructure {
 public:
  TreeStructure(int d, std::vector<Edge> edges) : d_(d), edges_(std::move(edges)) {
    if (d_ < 2) throw NotATree("a tree needs at least 2 nodes");
    for (auto& e : edges_) e = make_edge(e.first, e.second);
    std::sort(edges_.begin(), edges_.end());
    if (static_cast<int>(edges_.size()) != d_ - 1)
      throw NotATree("a spanning tree on d nodes has exactly d-1 edges");
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
      throw NotATree("duplicate edge");
    adj_.assign(d_ + 1, {});
    for (int k = 0; k < static_cast<int>(edges_.size()); ++k) {
      auto [i, j] = edges_[k];
      if (i < 1 || j > d_) throw NodeOutOfRange("edge endpoint outside 1..d");
      adj_[i].push_back({j, k});
      adj_[j].push_back({i, k});
    }
    // connectivity; acyclicity follows from the edge count
    std::vector<char> seen(d_ + 1, 0);
    std::queue<int> q;
    q.push(1);
    seen[1] = 1;
    int found = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (auto [v, k] : adj_[u])
        if (!seen[v]) {
          seen[v] = 1;
          ++found;
          q.push(v);
        }
    }
    if (found != d_) throw NotATree("edge set is not connected");
  }

  int node_count() const { return d_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // neighbors of v as (node, edge index) pairs
  const std::vector<std::pair<int, int>>& neighbors(int v) const {
    check_node(v);
    return adj_[v];
  }

  int degree(int v) const { return static_cast<int>(neighbors(v).size()); }

  bool has_edge(int i, int j) const {
    Edge e = make_edge(i, j);
    return std::binary_search(edges_.begin(), edges_.end(), e);
  }

  // index of an edge within edges(), or -1
  int edge_index(int i, int j) const {
    Edge e = make_edge(i, j);
    auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
    if (it == edges_.end() || *it != e) return -1;
    return static_cast<int>(it - edges_.begin());
  }

  // The unique path between the endpoints of `pair`, as an ordered edge list.
  // Length 1 iff the pair is an edge.
  std::vector<Edge> path(Edge pair) const {
    auto [s, t] = make_edge(pair.first, pair.second);
    check_node(s);
    check_node(t);
    std::vector<int> parent(d_ + 1, 0);
    std::vector<char> seen(d_ + 1, 0);
    std::queue<int> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      if (u == t) break;
      for (auto [v, k] : adj_[u])
        if (!seen[v]) {
          seen[v] = 1;
          parent[v] = u;
          q.push(v);
        }
    }
    std::vector<Edge> out;
    for (int v = t; v != s; v = parent[v]) out.push_back(make_edge(parent[v], v));
    std::reverse(out.begin(), out.end());
    return out;
  }

  int diameter() const {
    auto far = [&](int s) {
      std::vector<int> dist(d_ + 1, -1);
      std::queue<int> q;
      q.push(s);
      dist[s] = 0;
      int best = s;
      while (!q.empty()) {
        int u = q.front();
        q.pop();
        if (dist[u] > dist[best]) best = u;
        for (auto [v, k] : adj_[u])
          if (dist[v] < 0) {
            dist[v] = dist[u] + 1;
            q.push(v);
          }
      }
      return std::pair{best, dist[best]};
    };
    auto [a, da] = far(1);
    auto [b, db] = far(a);
    return db;
  }

  bool operator==(const TreeStructure& o) const { return d_ == o.d_ && edges_ == o.edges_; }

 private:
  void check_node(int v) const {
    if (v < 1 || v > d_) throw NodeOutOfRange("node index outside 1..d");
  }

  int d_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<int, int>>> adj_;  // (neighbor, edge index)
};

// Undirected simple graph, used for line graphs in tests and the extremal scans.
struct Graph {
  int n = 0;
  std::vector<Edge> edges;  // canonical, sorted
};

// Line graph of a tree: one vertex per tree edge (numbered 1..d-1 in the
// order of TreeStructure::edges()), connected iff the tree edges share a node.
inline Graph line_graph(const TreeStructure& t) {
  Graph g;
  g.n = t.node_count() - 1;
  const auto& E = t.edges();
  for (int a = 0; a < static_cast<int>(E.size()); ++a)
    for (int b = a + 1; b < static_cast<int>(E.size()); ++b) {
      auto [i, j] = E[a];
      auto [k, l] = E[b];
      if (i == k || i == l || j == k || j == l) g.edges.push_back({a + 1, b + 1});
    }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

}  // namespace gausstree
