#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mdskit/error.hpp"
#include "mdskit/graph.hpp"

namespace mdskit {

/// m x n row-major matrix of per-vertex likelihoods; row k is one map.
struct ProbabilityMaps {
  std::size_t count = 0;     // m
  std::size_t vertices = 0;  // n
  std::vector<double> values;
  std::uint64_t fingerprint = 0;

  ProbabilityMaps() = default;
  ProbabilityMaps(std::size_t m, std::size_t n, std::vector<double> v, std::uint64_t fp = 0)
      : count(m), vertices(n), values(std::move(v)), fingerprint(fp) {
    if (values.size() != m * n) throw DimensionError("probability map storage does not match m x n");
  }

  std::span<const double> row(std::size_t k) const { return {values.data() + k * vertices, vertices}; }
  double at(std::size_t k, Vertex v) const { return values[k * vertices + static_cast<std::size_t>(v)]; }
};

/// FNV-1a over the order and sorted edge list.
inline std::uint64_t graph_fingerprint(const Graph& g) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(static_cast<std::uint64_t>(g.order()));
  for (const auto& e : g.edges()) {
    mix(static_cast<std::uint64_t>(e.u));
    mix(static_cast<std::uint64_t>(e.v));
  }
  return h;
}

}  // namespace mdskit
