#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mdskit/error.hpp"

namespace mdskit {

using Vertex = std::int32_t;

struct Edge {
  Vertex u;
  Vertex v;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable simple undirected graph stored as compressed adjacency rows.
/// Neighbor rows are sorted ascending.
class Graph {
 public:
  Graph() : offsets_{0} {}

  /// Builds a graph on vertices 0..n-1. Duplicate edges (in either
  /// orientation) are merged; self-loops and out-of-range ids are rejected.
  Graph(int n, std::span<const Edge> edges) {
    if (n < 0) throw std::invalid_argument("graph order must be non-negative");
    std::vector<Edge> canon;
    canon.reserve(edges.size());
    for (const auto& e : edges) {
      if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n) {
        throw InvariantError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                             ") out of range for n=" + std::to_string(n));
      }
      if (e.u == e.v) throw InvariantError("self-loop at vertex " + std::to_string(e.u));
      canon.push_back({std::min(e.u, e.v), std::max(e.u, e.v)});
    }
    std::sort(canon.begin(), canon.end());
    canon.erase(std::unique(canon.begin(), canon.end()), canon.end());
    edge_count_ = canon.size();

    std::vector<std::size_t> deg(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& e : canon) {
      ++deg[e.u];
      ++deg[e.v];
    }
    offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + deg[v];
    adjacency_.resize(offsets_[n]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : canon) {
      adjacency_[fill[e.u]++] = e.v;
      adjacency_[fill[e.v]++] = e.u;
    }
    for (int v = 0; v < n; ++v) {
      std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
                adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]));
    }
  }

  Graph(int n, std::initializer_list<Edge> edges)
      : Graph(n, std::span<const Edge>(edges.begin(), edges.size())) {}

  int order() const { return static_cast<int>(offsets_.size()) - 1; }
  std::size_t edge_count() const { return edge_count_; }

  std::span<const Vertex> neighbors(Vertex v) const {
    return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  int degree(Vertex v) const { return static_cast<int>(offsets_[v + 1] - offsets_[v]); }

  bool has_edge(Vertex u, Vertex v) const {
    auto row = neighbors(u);
    return std::binary_search(row.begin(), row.end(), v);
  }

  /// Edges as (u, v) with u < v in lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (Vertex u = 0; u < order(); ++u) {
      for (Vertex v : neighbors(u)) {
        if (u < v) out.push_back({u, v});
      }
    }
    return out;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.offsets_ == b.offsets_ && a.adjacency_ == b.adjacency_;
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> adjacency_;
  std::size_t edge_count_ = 0;
};

/// Subset of 0..n-1 that remembers insertion order. Equality is set equality.
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(int universe) : bits_(static_cast<std::size_t>(universe), 0) {}
  VertexSet(int universe, std::span<const Vertex> members) : VertexSet(universe) {
    for (Vertex v : members) insert(v);
  }
  VertexSet(int universe, std::initializer_list<Vertex> members)
      : VertexSet(universe, std::span<const Vertex>(members.begin(), members.size())) {}

  static VertexSet all(int universe) {
    VertexSet s(universe);
    for (Vertex v = 0; v < universe; ++v) s.insert(v);
    return s;
  }

  int universe() const { return static_cast<int>(bits_.size()); }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }

  bool contains(Vertex v) const { return bits_[check(v)] != 0; }

  /// Appends v; returns false if it was already present.
  bool insert(Vertex v) {
    if (bits_[check(v)]) return false;
    bits_[v] = 1;
    members_.push_back(v);
    return true;
  }

  bool erase(Vertex v) {
    if (!bits_[check(v)]) return false;
    bits_[v] = 0;
    members_.erase(std::find(members_.begin(), members_.end(), v));
    return true;
  }

  /// Members in insertion order.
  std::span<const Vertex> members() const& { return members_; }
  std::span<const Vertex> members() const&& = delete;

  std::vector<Vertex> sorted() const {
    std::vector<Vertex> out = members_;
    std::sort(out.begin(), out.end());
    return out;
  }

  bool is_subset_of(const VertexSet& other) const {
    return std::all_of(members_.begin(), members_.end(),
                       [&](Vertex v) { return other.contains(v); });
  }

  friend bool operator==(const VertexSet& a, const VertexSet& b) { return a.bits_ == b.bits_; }

 private:
  std::size_t check(Vertex v) const {
    if (v < 0 || static_cast<std::size_t>(v) >= bits_.size()) {
      throw std::out_of_range("vertex " + std::to_string(v) + " outside universe of size " +
                              std::to_string(bits_.size()));
    }
    return static_cast<std::size_t>(v);
  }

  std::vector<Vertex> members_;
  std::vector<char> bits_;
};

inline std::ostream& operator<<(std::ostream& os, const VertexSet& s) {
  os << '{';
  bool first = true;
  for (Vertex v : s.sorted()) {
    os << (first ? "" : ",") << v;
    first = false;
  }
  return os << '}';
}

/// Per-vertex count of how many members of a set lie in its closed
/// neighborhood. A vertex is dominated iff its count is positive.
class Coverage {
 public:
  explicit Coverage(const Graph& g)
      : graph_(&g), count_(static_cast<std::size_t>(g.order()), 0), undominated_(g.order()) {}

  Coverage(const Graph& g, const VertexSet& s) : Coverage(g) {
    for (Vertex v : s.members()) add(v);
  }

  void add(Vertex v) {
    bump(v);
    for (Vertex w : graph_->neighbors(v)) bump(w);
  }

  void remove(Vertex v) {
    drop(v);
    for (Vertex w : graph_->neighbors(v)) drop(w);
  }

  int count(Vertex v) const { return count_[v]; }
  bool dominated(Vertex v) const { return count_[v] > 0; }
  int undominated() const { return undominated_; }
  bool complete() const { return undominated_ == 0; }

  /// |N[v] \ N[S]|: vertices newly dominated if v were added.
  int gain(Vertex v) const {
    int g = count_[v] == 0 ? 1 : 0;
    for (Vertex w : graph_->neighbors(v)) g += count_[w] == 0 ? 1 : 0;
    return g;
  }

  /// True if removing member v leaves every vertex dominated.
  bool removable(Vertex v) const {
    if (count_[v] < 2) return false;
    for (Vertex w : graph_->neighbors(v)) {
      if (count_[w] < 2) return false;
    }
    return true;
  }

 private:
  void bump(Vertex v) {
    if (count_[v]++ == 0) --undominated_;
  }
  void drop(Vertex v) {
    if (--count_[v] == 0) ++undominated_;
  }

  const Graph* graph_;
  std::vector<int> count_;
  int undominated_;
};

/// N[S] = union of the closed neighborhoods of the members of s.
inline VertexSet closed_neighborhood(const Graph& g, const VertexSet& s) {
  VertexSet out(g.order());
  for (Vertex v : s.members()) {
    out.insert(v);
    for (Vertex w : g.neighbors(v)) out.insert(w);
  }
  return out;
}

inline bool is_dominating(const Graph& g, const VertexSet& s) {
  return Coverage(g, s).complete();
}

struct GraphStats {
  int n = 0;
  std::size_t edges = 0;
  int max_degree = 0;
  int min_degree = 0;
  friend bool operator==(const GraphStats&, const GraphStats&) = default;
};

inline GraphStats graph_stats(const Graph& g) {
  GraphStats st{g.order(), g.edge_count(), 0, 0};
  if (g.order() == 0) return st;
  st.min_degree = g.degree(0);
  for (Vertex v = 0; v < g.order(); ++v) {
    st.max_degree = std::max(st.max_degree, g.degree(v));
    st.min_degree = std::min(st.min_degree, g.degree(v));
  }
  return st;
}

/// Relabels vertex v as perm[v].
inline Graph permute(const Graph& g, std::span<const Vertex> perm) {
  if (static_cast<int>(perm.size()) != g.order()) throw DimensionError("permutation size mismatch");
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) edges.push_back({perm[e.u], perm[e.v]});
  return Graph(g.order(), edges);
}

// ---------------------------------------------------------------------------
// Random generators

/// Erdos-Renyi G(n, p). Sparse densities use geometric skipping over the
/// lower-triangular pair sequence; the distribution matches per-pair coin flips.
inline Graph generate_er(int n, double p, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_er: n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("generate_er: p must lie in [0,1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Edge> edges;
  if (p == 0.0) return Graph(n, edges);
  if (p <= 0.25) {
    const double log_q = std::log1p(-p);
    long long v = 1;
    long long w = -1;
    while (v < n) {
      const double r = unit(rng);
      w += 1 + static_cast<long long>(std::floor(std::log1p(-r) / log_q));
      while (w >= v && v < n) {
        w -= v;
        ++v;
      }
      if (v < n) edges.push_back({static_cast<Vertex>(w), static_cast<Vertex>(v)});
    }
  } else {
    for (Vertex u = 0; u < n; ++u) {
      for (Vertex v = u + 1; v < n; ++v) {
        if (unit(rng) < p) edges.push_back({u, v});
      }
    }
  }
  return Graph(n, edges);
}

enum class BaCore { empty, complete };

/// Barabasi-Albert preferential attachment. Vertices 0..k-1 form the core;
/// vertex k attaches to every core vertex, each later vertex to k distinct
/// targets drawn proportionally to degree (repeats are redrawn).
inline Graph generate_ba(int n, int k, std::uint64_t seed, BaCore core = BaCore::empty) {
  if (k < 1 || k >= n) throw std::invalid_argument("generate_ba: need 1 <= k < n");
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  // Each endpoint occurrence appears once, so uniform draws are degree-weighted.
  std::vector<Vertex> endpoints;
  if (core == BaCore::complete) {
    for (Vertex u = 0; u < k; ++u) {
      for (Vertex v = u + 1; v < k; ++v) {
        edges.push_back({u, v});
        endpoints.push_back(u);
        endpoints.push_back(v);
      }
    }
  }
  for (Vertex u = 0; u < k; ++u) {
    edges.push_back({u, static_cast<Vertex>(k)});
    endpoints.push_back(u);
    endpoints.push_back(static_cast<Vertex>(k));
  }
  std::vector<Vertex> targets;
  for (Vertex t = k + 1; t < n; ++t) {
    targets.clear();
    std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
    while (static_cast<int>(targets.size()) < k) {
      Vertex cand = endpoints[pick(rng)];
      if (std::find(targets.begin(), targets.end(), cand) == targets.end()) targets.push_back(cand);
    }
    for (Vertex s : targets) {
      edges.push_back({s, t});
      endpoints.push_back(s);
      endpoints.push_back(t);
    }
  }
  return Graph(n, edges);
}

// ---------------------------------------------------------------------------
// Edge-list text format
//
//   n m
//   u v        (m lines)
//
// Blank lines and '#' comments are skipped. Integer ids in [0, n) are used
// as-is; any other labels are remapped to 0..n-1 in order of first
// appearance and the original labels are returned alongside the graph.

struct LoadedGraph {
  Graph graph;
  std::vector<std::string> labels;  // empty when ids were used verbatim
};

inline LoadedGraph read_edge_list(std::istream& in, const std::string& source = "<stream>") {
  auto fail = [&](std::size_t line, const std::string& what) -> ParseError {
    return ParseError(source + ":" + std::to_string(line) + ": " + what);
  };
  auto as_int = [](const std::string& tok, long long& out) {
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc{} && ptr == tok.data() + tok.size();
  };

  std::string line;
  std::size_t lineno = 0;
  long long n = -1;
  long long m = -1;
  std::vector<std::pair<std::string, std::string>> raw;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string a;
    std::string b;
    std::string extra;
    if (!(ls >> a)) continue;
    if (!(ls >> b) || (ls >> extra)) throw fail(lineno, "expected exactly two fields");
    if (n < 0) {
      if (!as_int(a, n) || !as_int(b, m) || n < 0 || m < 0) throw fail(lineno, "bad header, expected 'n m'");
      continue;
    }
    if (static_cast<long long>(raw.size()) == m) throw fail(lineno, "more edge lines than declared");
    raw.emplace_back(std::move(a), std::move(b));
  }
  if (n < 0) throw fail(lineno, "missing header");
  if (static_cast<long long>(raw.size()) != m) {
    throw fail(lineno, "expected " + std::to_string(m) + " edges, found " + std::to_string(raw.size()));
  }

  bool verbatim = true;
  for (const auto& [a, b] : raw) {
    long long x = 0;
    long long y = 0;
    if (!as_int(a, x) || !as_int(b, y) || x < 0 || y < 0 || x >= n || y >= n) {
      verbatim = false;
      break;
    }
  }

  LoadedGraph out;
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  if (verbatim) {
    for (const auto& [a, b] : raw) edges.push_back({static_cast<Vertex>(std::stoll(a)), static_cast<Vertex>(std::stoll(b))});
  } else {
    std::unordered_map<std::string, Vertex> ids;
    auto id_of = [&](const std::string& label) {
      auto [it, fresh] = ids.try_emplace(label, static_cast<Vertex>(out.labels.size()));
      if (fresh) out.labels.push_back(label);
      return it->second;
    };
    for (const auto& [a, b] : raw) edges.push_back({id_of(a), id_of(b)});
    if (static_cast<long long>(out.labels.size()) > n) {
      throw ParseError(source + ": " + std::to_string(out.labels.size()) +
                       " distinct labels exceed declared n=" + std::to_string(n));
    }
    // Declared vertices that never appear in an edge are isolated.
    for (long long v = static_cast<long long>(out.labels.size()); v < n; ++v) {
      out.labels.push_back("#isolated" + std::to_string(v));
    }
  }
  for (const auto& e : edges) {
    if (e.u == e.v) throw ParseError(source + ": self-loop at vertex " + std::to_string(e.u));
  }
  out.graph = Graph(static_cast<int>(n), edges);
  return out;
}

inline LoadedGraph read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_edge_list(in, path);
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.order() << ' ' << g.edge_count() << '\n';
  for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

}  // namespace mdskit
