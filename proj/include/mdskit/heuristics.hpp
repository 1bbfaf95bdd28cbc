#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "mdskit/graph.hpp"
#include "mdskit/maps.hpp"

namespace mdskit {

/// Vertex priority used by the greedy construction loop.
///
/// The greedy kind scores v by |N[v] \ N[S]| and is re-evaluated after every
/// insertion. The random and map kinds assign each vertex a fixed score for
/// the whole construction.
class Heuristic {
 public:
  enum class Kind { greedy, random, map };

  static Heuristic greedy() { return Heuristic(Kind::greedy); }

  /// Uniform(0,1) scores, drawn once per construction from `seed`.
  static Heuristic random(std::uint64_t seed) {
    Heuristic h(Kind::random);
    h.seed_ = seed;
    return h;
  }

  static Heuristic from_map(std::span<const double> scores, std::size_t index = 0) {
    Heuristic h(Kind::map);
    h.scores_.assign(scores.begin(), scores.end());
    h.index_ = index;
    for (double s : h.scores_) {
      if (!std::isfinite(s)) throw std::invalid_argument("map heuristic scores must be finite");
    }
    return h;
  }

  Kind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t map_index() const { return index_; }

  /// Score of v given the coverage of the partial set under construction.
  double score(const Graph& g, const Coverage& cov, Vertex v) const {
    switch (kind_) {
      case Kind::greedy:
        return cov.gain(v);
      case Kind::random:
        return static_scores(g.order())[static_cast<std::size_t>(v)];
      case Kind::map:
        return scores_.at(static_cast<std::size_t>(v));
    }
    return 0.0;
  }

  /// Fixed per-vertex scores for the random and map kinds.
  std::vector<double> static_scores(int n) const {
    if (kind_ == Kind::map) {
      if (static_cast<int>(scores_.size()) != n) {
        throw DimensionError("map heuristic has " + std::to_string(scores_.size()) +
                             " scores for a graph of order " + std::to_string(n));
      }
      return scores_;
    }
    if (kind_ == Kind::random) {
      std::mt19937_64 rng(seed_);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::vector<double> out(static_cast<std::size_t>(n));
      for (auto& x : out) x = unit(rng);
      return out;
    }
    throw std::logic_error("greedy heuristic has no static scores");
  }

 private:
  explicit Heuristic(Kind k) : kind_(k) {}

  Kind kind_;
  std::uint64_t seed_ = 0;
  std::size_t index_ = 0;
  std::vector<double> scores_;
};

/// h_g(v) = |N[v] \ N[S]|.
inline int greedy_score(const Graph& g, const VertexSet& s, Vertex v) {
  return Coverage(g, s).gain(v);
}

/// Greedy construction: starting from `partial`, repeatedly add the single
/// highest-scoring vertex outside the set (lowest id on ties) until the set
/// dominates g. Vertices of `partial` keep their order at the front.
inline VertexSet construct(const Graph& g, const Heuristic& h, const VertexSet& partial) {
  const int n = g.order();
  VertexSet s = partial;
  if (s.universe() != n) throw DimensionError("partial set universe does not match graph order");
  Coverage cov(g, s);
  if (cov.complete()) return s;

  if (h.kind() == Heuristic::Kind::greedy) {
    std::vector<int> gain(static_cast<std::size_t>(n));
    for (Vertex v = 0; v < n; ++v) gain[v] = cov.gain(v);
    while (!cov.complete()) {
      Vertex best = -1;
      for (Vertex v = 0; v < n; ++v) {
        if (!s.contains(v) && (best < 0 || gain[v] > gain[best])) best = v;
      }
      // Vertices in N[best] that were undominated stop contributing to the
      // gain of each of their neighbors.
      auto settle = [&](Vertex x) {
        if (cov.dominated(x)) return;
        --gain[x];
        for (Vertex y : g.neighbors(x)) --gain[y];
      };
      settle(best);
      for (Vertex x : g.neighbors(best)) settle(x);
      cov.add(best);
      s.insert(best);
    }
    return s;
  }

  const std::vector<double> scores = h.static_scores(n);
  std::vector<Vertex> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return scores[a] > scores[b]; });
  for (Vertex v : order) {
    if (cov.complete()) break;
    if (s.insert(v)) cov.add(v);
  }
  return s;
}

inline VertexSet construct(const Graph& g, const Heuristic& h) { return construct(g, h, VertexSet(g.order())); }

/// Removes redundant members scanning from the last inserted to the first.
/// The result is minimal: no single member can be dropped.
inline VertexSet prune(const Graph& g, const VertexSet& s) {
  Coverage cov(g, s);
  if (!cov.complete()) throw std::invalid_argument("prune: input set does not dominate the graph");
  VertexSet out = s;
  const auto members = s.members();
  for (auto it = members.rbegin(); it != members.rend(); ++it) {
    if (cov.removable(*it)) {
      cov.remove(*it);
      out.erase(*it);
    }
  }
  return out;
}

struct MapConstruction {
  VertexSet set;
  std::size_t map_index = 0;  // 0-based row of the winning map
};

/// Builds and prunes one candidate per map; keeps the smallest (first map on ties).
inline MapConstruction best_map_construction(const Graph& g, const ProbabilityMaps& maps) {
  if (maps.vertices != static_cast<std::size_t>(g.order())) {
    throw DimensionError("probability maps have " + std::to_string(maps.vertices) +
                         " columns for a graph of order " + std::to_string(g.order()));
  }
  if (maps.count == 0) throw DimensionError("no probability maps supplied");
  MapConstruction best;
  for (std::size_t k = 0; k < maps.count; ++k) {
    VertexSet cand = prune(g, construct(g, Heuristic::from_map(maps.row(k), k)));
    if (k == 0 || cand.size() < best.set.size()) best = {std::move(cand), k};
  }
  return best;
}

inline VertexSet construct_from_maps(const Graph& g, const ProbabilityMaps& maps) {
  return best_map_construction(g, maps).set;
}

}  // namespace mdskit
