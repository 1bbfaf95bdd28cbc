#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "mdskit/graph.hpp"
#include "mdskit/heuristics.hpp"
#include "mdskit/maps.hpp"

namespace mdskit {

enum class IgMode { classic, gcn_cycling };

struct IgConfig {
  double beta = 0.2;     // fraction of the incumbent destroyed per iteration
  int delta_max = 200;   // iterations without improvement before stopping
  std::chrono::milliseconds time_limit{10'000};
  std::uint64_t seed = 0;
  IgMode mode = IgMode::classic;

  void validate() const {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("ig: beta must lie in (0,1)");
    if (delta_max < 1) throw std::invalid_argument("ig: delta_max must be >= 1");
    if (time_limit.count() <= 0) throw std::invalid_argument("ig: time limit must be positive");
  }
};

struct IgTracePoint {
  std::size_t iteration = 0;
  std::size_t size = 0;
  std::chrono::nanoseconds elapsed{0};
};

/// Incumbent history: the starting point (iteration 0) and every accepted improvement.
struct IgTrace {
  std::vector<IgTracePoint> iterations;
  VertexSet final;
  std::size_t initial_size = 0;  // |InitialSolution| before local improvement
  std::size_t total_iterations = 0;
  bool time_limited = false;
};

struct IgResult {
  VertexSet best;
  IgTrace trace;
};

/// ceil(beta * size), guarded against products like 0.2 * 15 landing just
/// above an integer.
inline std::size_t destruction_count(std::size_t size, double beta) {
  const double raw = beta * static_cast<double>(size);
  return std::min(size, static_cast<std::size_t>(std::ceil(raw - 1e-9)));
}

/// Removes ceil(beta * |s|) uniformly chosen members; survivors keep their order.
inline VertexSet random_destruction(const VertexSet& s, double beta, std::mt19937_64& rng) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("random_destruction: beta must lie in (0,1)");
  std::vector<Vertex> pool(s.members().begin(), s.members().end());
  const std::size_t k = destruction_count(pool.size(), beta);
  // Partial Fisher-Yates: the first k slots become the removed members.
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  VertexSet out = s;
  for (std::size_t i = 0; i < k; ++i) out.erase(pool[i]);
  return out;
}

inline VertexSet reconstruction(const Graph& g, const VertexSet& partial, const Heuristic& h) {
  return construct(g, h, partial);
}

/// Prune, then apply 2-for-1 exchanges until none applies. A pair (u, v) of
/// members is replaced by a non-member w when the set stays dominating.
/// Pairs are scanned in ascending id order and the lowest valid w wins;
/// every accepted exchange is followed by another prune.
inline VertexSet local_improvement(const Graph& g, const VertexSet& s) {
  VertexSet current = prune(g, s);
  std::vector<char> seen(static_cast<std::size_t>(g.order()), 0);
  std::vector<Vertex> lost;
  std::vector<Vertex> candidates;
  for (;;) {
    Coverage cov(g, current);
    const std::vector<Vertex> members = current.sorted();
    bool exchanged = false;
    for (std::size_t i = 0; i < members.size() && !exchanged; ++i) {
      for (std::size_t j = i + 1; j < members.size() && !exchanged; ++j) {
        const Vertex u = members[i];
        const Vertex v = members[j];
        auto hits = [&](Vertex c, Vertex x) { return c == x || g.has_edge(c, x); };
        // Vertices left undominated once u and v are gone.
        lost.clear();
        auto collect = [&](Vertex x) {
          if (seen[x]) return;
          seen[x] = 1;
          if (cov.count(x) - (hits(u, x) ? 1 : 0) - (hits(v, x) ? 1 : 0) == 0) lost.push_back(x);
        };
        collect(u);
        for (Vertex x : g.neighbors(u)) collect(x);
        collect(v);
        for (Vertex x : g.neighbors(v)) collect(x);
        seen[u] = 0;
        for (Vertex x : g.neighbors(u)) seen[x] = 0;
        seen[v] = 0;
        for (Vertex x : g.neighbors(v)) seen[x] = 0;

        Vertex replacement = -1;
        if (!lost.empty()) {
          const Vertex anchor = *std::min_element(lost.begin(), lost.end());
          candidates.assign(g.neighbors(anchor).begin(), g.neighbors(anchor).end());
          candidates.insert(std::upper_bound(candidates.begin(), candidates.end(), anchor), anchor);
          for (Vertex w : candidates) {
            if (current.contains(w)) continue;
            if (std::all_of(lost.begin(), lost.end(), [&](Vertex x) { return hits(w, x); })) {
              replacement = w;
              break;
            }
          }
          if (replacement < 0) continue;
        }
        current.erase(u);
        current.erase(v);
        if (replacement >= 0) current.insert(replacement);
        current = prune(g, current);
        exchanged = true;
      }
    }
    if (!exchanged) return current;
  }
}

/// Iterated greedy. Classic mode builds and rebuilds with the greedy
/// heuristic; gcn-cycling mode starts from map 1 and rebuilds iteration t
/// with map ((t-1) mod m) + 1. Only strictly smaller solutions are accepted.
/// The time limit is checked between iterations, so a run that stops on
/// delta_max is reproducible from its seed.
inline IgResult run_ig(const Graph& g, const IgConfig& cfg, const ProbabilityMaps* maps = nullptr) {
  cfg.validate();
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  std::vector<Heuristic> schedule;
  if (cfg.mode == IgMode::gcn_cycling) {
    if (maps == nullptr || maps->count == 0) throw std::invalid_argument("ig: gcn-cycling mode requires probability maps");
    if (maps->vertices != static_cast<std::size_t>(g.order())) {
      throw DimensionError("ig: probability maps do not match the graph order");
    }
    for (std::size_t k = 0; k < maps->count; ++k) schedule.push_back(Heuristic::from_map(maps->row(k), k));
  } else {
    schedule.push_back(Heuristic::greedy());
  }

  std::mt19937_64 rng(cfg.seed);
  IgResult result;
  const VertexSet initial = construct(g, schedule.front());
  result.trace.initial_size = initial.size();
  result.best = local_improvement(g, initial);
  result.trace.iterations.push_back({0, result.best.size(), Clock::now() - start});

  int stale = 0;
  std::size_t t = 0;
  while (stale < cfg.delta_max) {
    if (Clock::now() - start >= cfg.time_limit) {
      result.trace.time_limited = true;
      break;
    }
    ++t;
    const Heuristic& h = schedule[(t - 1) % schedule.size()];
    const VertexSet destroyed = random_destruction(result.best, cfg.beta, rng);
    VertexSet candidate = local_improvement(g, reconstruction(g, destroyed, h));
    if (candidate.size() < result.best.size()) {
      result.best = std::move(candidate);
      stale = 0;
      result.trace.iterations.push_back({t, result.best.size(), Clock::now() - start});
    } else {
      ++stale;
    }
  }
  result.trace.total_iterations = t;
  result.trace.final = result.best;
  return result;
}

}  // namespace mdskit
