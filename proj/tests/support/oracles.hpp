#pragma once

// Test-only reference computations. Nothing here calls into the solver,
// heuristic or inference code it is used to check.

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "mdskit/graph.hpp"

namespace oracle {

using mdskit::Edge;
using mdskit::Graph;
using mdskit::Vertex;

inline Graph path(int n) {
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return Graph(n, e);
}

inline Graph cycle(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
  return Graph(n, e);
}

inline Graph complete(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.push_back({i, j});
  return Graph(n, e);
}

/// Center 0, leaves 1..leaves.
inline Graph star(int leaves) {
  std::vector<Edge> e;
  for (int i = 1; i <= leaves; ++i) e.push_back({0, i});
  return Graph(leaves + 1, e);
}

inline Graph complete_bipartite(int a, int b) {
  std::vector<Edge> e;
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j) e.push_back({i, a + j});
  return Graph(a + b, e);
}

inline Graph petersen() {
  std::vector<Edge> e;
  for (int i = 0; i < 5; ++i) {
    e.push_back({i, (i + 1) % 5});          // outer cycle
    e.push_back({i, i + 5});                // spokes
    e.push_back({5 + i, 5 + (i + 2) % 5});  // inner pentagram
  }
  return Graph(10, e);
}

/// Closed-neighborhood bitmasks from the edge list alone.
inline std::vector<std::uint32_t> closed_masks(const Graph& g) {
  std::vector<std::uint32_t> m(static_cast<std::size_t>(g.order()));
  for (int v = 0; v < g.order(); ++v) m[v] = 1U << v;
  for (const auto& e : g.edges()) {
    m[e.u] |= 1U << e.v;
    m[e.v] |= 1U << e.u;
  }
  return m;
}

inline bool dominates(const Graph& g, std::uint32_t set) {
  const auto m = closed_masks(g);
  std::uint32_t cov = 0;
  for (int v = 0; v < g.order(); ++v)
    if (set >> v & 1U) cov |= m[v];
  return cov == (g.order() == 32 ? ~0U : (1U << g.order()) - 1U);
}

inline std::uint32_t to_mask(const mdskit::VertexSet& s) {
  std::uint32_t m = 0;
  for (Vertex v : s.members()) m |= 1U << v;
  return m;
}

/// Every dominating set of minimum size, as sorted vertex lists (n <= 20).
inline std::set<std::vector<Vertex>> all_minimum_dominating_sets(const Graph& g) {
  const int n = g.order();
  const auto m = closed_masks(g);
  const std::uint32_t full = (1U << n) - 1U;
  int best = n + 1;
  std::set<std::vector<Vertex>> out;
  for (std::uint32_t s = 0; s <= full; ++s) {
    const int k = __builtin_popcount(s);
    if (k > best) continue;
    std::uint32_t cov = 0;
    for (int v = 0; v < n; ++v)
      if (s >> v & 1U) cov |= m[v];
    if (cov != full) continue;
    if (k < best) {
      best = k;
      out.clear();
    }
    std::vector<Vertex> members;
    for (int v = 0; v < n; ++v)
      if (s >> v & 1U) members.push_back(v);
    out.insert(members);
    if (s == full) break;
  }
  return out;
}

inline int gamma(const Graph& g) {
  return static_cast<int>(all_minimum_dominating_sets(g).begin()->size());
}

/// Plain-loop forward pass over row-major nested vectors.
/// layers[l] = {theta0, theta1}, each rows x cols as vector<vector<double>>.
using Mat = std::vector<std::vector<double>>;

inline Mat reference_forward(const Graph& g, const std::vector<std::pair<Mat, Mat>>& layers, int c0) {
  const int n = g.order();
  Mat adj(n, std::vector<double>(n, 0.0));
  for (const auto& e : g.edges()) {
    const double w = 1.0 / std::sqrt(static_cast<double>(g.degree(e.u)) * g.degree(e.v));
    adj[e.u][e.v] = w;
    adj[e.v][e.u] = w;
  }
  Mat h(n, std::vector<double>(c0, 1.0));
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Mat& t0 = layers[l].first;
    const Mat& t1 = layers[l].second;
    const std::size_t cin = t0.size();
    const std::size_t cout = t0[0].size();
    Mat self(n, std::vector<double>(cout, 0.0));
    Mat nb(n, std::vector<double>(cout, 0.0));
    for (int i = 0; i < n; ++i)
      for (std::size_t c = 0; c < cout; ++c)
        for (std::size_t k = 0; k < cin; ++k) {
          self[i][c] += h[i][k] * t0[k][c];
          nb[i][c] += h[i][k] * t1[k][c];
        }
    Mat next(n, std::vector<double>(cout, 0.0));
    for (int i = 0; i < n; ++i)
      for (std::size_t c = 0; c < cout; ++c) {
        double z = self[i][c];
        for (int j = 0; j < n; ++j) z += adj[i][j] * nb[j][c];
        next[i][c] = l + 1 == layers.size() ? 1.0 / (1.0 + std::exp(-z)) : std::max(z, 0.0);
      }
    h = std::move(next);
  }
  return h;  // n x m
}

}  // namespace oracle
