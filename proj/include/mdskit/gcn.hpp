#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <json.hpp>

#include "mdskit/error.hpp"
#include "mdskit/graph.hpp"
#include "mdskit/maps.hpp"

namespace mdskit::gcn {

using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Above this order the propagation product uses a sparse adjacency.
inline constexpr int kDenseLimit = 512;

struct Layer {
  Matrix theta0;  // self path, C^l x C^{l+1}
  Matrix theta1;  // neighbor path, C^l x C^{l+1}
};

/// Weights of an L-layer network. channel_dims holds C^0..C^L; C^L is the
/// number of probability maps.
struct Weights {
  std::vector<int> channel_dims;
  std::vector<Layer> layers;
  nlohmann::json metadata = nlohmann::json::object();

  std::size_t map_count() const { return channel_dims.empty() ? 0 : static_cast<std::size_t>(channel_dims.back()); }

  /// Throws DimensionError on a broken dimension chain and InvariantError on
  /// non-finite entries.
  void validate() const {
    if (layers.empty()) throw DimensionError("weights: no layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto& layer = layers[l];
      if (layer.theta0.rows() != layer.theta1.rows() || layer.theta0.cols() != layer.theta1.cols()) {
        throw DimensionError("weights: layers[" + std::to_string(l) + "] theta0 is " + shape(layer.theta0) +
                             " but theta1 is " + shape(layer.theta1));
      }
      if (l + 1 < layers.size() && layer.theta0.cols() != layers[l + 1].theta0.rows()) {
        throw DimensionError("weights: layers[" + std::to_string(l) + "] outputs " +
                             std::to_string(layer.theta0.cols()) + " channels but layers[" + std::to_string(l + 1) +
                             "] expects " + std::to_string(layers[l + 1].theta0.rows()));
      }
    }
    if (channel_dims.size() != layers.size() + 1) {
      throw DimensionError("weights: channel_dims has " + std::to_string(channel_dims.size()) + " entries for " +
                           std::to_string(layers.size()) + " layers");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
      if (layers[l].theta0.rows() != channel_dims[l] || layers[l].theta0.cols() != channel_dims[l + 1]) {
        throw DimensionError("weights: layers[" + std::to_string(l) + "] is " + shape(layers[l].theta0) +
                             ", channel_dims requires " + std::to_string(channel_dims[l]) + "x" +
                             std::to_string(channel_dims[l + 1]));
      }
      if (!layers[l].theta0.allFinite() || !layers[l].theta1.allFinite()) {
        throw InvariantError("weights: layers[" + std::to_string(l) + "] has a non-finite entry");
      }
    }
  }

  friend bool operator==(const Weights& a, const Weights& b) {
    if (a.channel_dims != b.channel_dims || a.layers.size() != b.layers.size() || a.metadata != b.metadata) {
      return false;
    }
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
      if (a.layers[l].theta0 != b.layers[l].theta0 || a.layers[l].theta1 != b.layers[l].theta1) return false;
    }
    return true;
  }

 private:
  static std::string shape(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }
};

namespace detail {

inline std::vector<double> inverse_sqrt_degrees(const Graph& g) {
  std::vector<double> out(static_cast<std::size_t>(g.order()), 0.0);
  for (Vertex v = 0; v < g.order(); ++v) {
    if (g.degree(v) > 0) out[v] = 1.0 / std::sqrt(static_cast<double>(g.degree(v)));
  }
  return out;
}

inline double sigmoid(double x) {
  const double y = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  // Keep the open interval even where the double result saturates.
  if (y >= 1.0) return std::nextafter(1.0, 0.0);
  if (y <= 0.0) return std::numeric_limits<double>::denorm_min();
  return y;
}

}  // namespace detail

/// Gamma^{-1/2} A Gamma^{-1/2} with zero rows and columns for isolated vertices.
inline Matrix normalized_adjacency(const Graph& g) {
  const auto inv = detail::inverse_sqrt_degrees(g);
  Matrix out = Matrix::Zero(g.order(), g.order());
  for (Vertex u = 0; u < g.order(); ++u) {
    for (Vertex v : g.neighbors(u)) out(u, v) = inv[u] * inv[v];
  }
  return out;
}

inline SparseMatrix normalized_adjacency_sparse(const Graph& g) {
  const auto inv = detail::inverse_sqrt_degrees(g);
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(2 * g.edge_count());
  for (Vertex u = 0; u < g.order(); ++u) {
    for (Vertex v : g.neighbors(u)) entries.emplace_back(u, v, inv[u] * inv[v]);
  }
  SparseMatrix out(g.order(), g.order());
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

/// Forward pass: H^0 is all ones, hidden layers use ReLU and the output
/// layer a sigmoid. Row k of the result is the k-th probability map.
inline ProbabilityMaps forward(const Graph& g, const Weights& w, int dense_limit = kDenseLimit) {
  w.validate();
  const int n = g.order();
  Matrix h = Matrix::Ones(n, w.channel_dims.front());
  Matrix dense;
  SparseMatrix sparse;
  const bool use_dense = n <= dense_limit;
  if (use_dense) {
    dense = normalized_adjacency(g);
  } else {
    sparse = normalized_adjacency_sparse(g);
  }
  for (std::size_t l = 0; l < w.layers.size(); ++l) {
    const auto& layer = w.layers[l];
    const Matrix neighbor = h * layer.theta1;
    Matrix z = h * layer.theta0;
    if (use_dense) {
      z.noalias() += dense * neighbor;
    } else {
      z.noalias() += sparse * neighbor;
    }
    if (l + 1 < w.layers.size()) {
      h = z.cwiseMax(0.0);
    } else {
      h = z.unaryExpr([](double x) { return detail::sigmoid(x); });
    }
  }
  const auto m = static_cast<std::size_t>(h.cols());
  std::vector<double> values(m * static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < m; ++k) {
    for (int v = 0; v < n; ++v) values[k * static_cast<std::size_t>(n) + static_cast<std::size_t>(v)] = h(v, static_cast<Eigen::Index>(k));
  }
  return ProbabilityMaps(m, static_cast<std::size_t>(n), std::move(values), graph_fingerprint(g));
}

// ---------------------------------------------------------------------------
// Weight file: {"channel_dims": [...], "layers": [{"theta0": [[...]], "theta1": [[...]]}],
//               "metadata": {...}}, matrices row-major as nested arrays.

inline nlohmann::json to_json(const Weights& w) {
  auto matrix = [](const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  nlohmann::json doc;
  doc["channel_dims"] = w.channel_dims;
  doc["layers"] = nlohmann::json::array();
  for (const auto& layer : w.layers) {
    doc["layers"].push_back({{"theta0", matrix(layer.theta0)}, {"theta1", matrix(layer.theta1)}});
  }
  doc["metadata"] = w.metadata;
  return doc;
}

inline Weights weights_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("weights: top level must be an object");
  auto require = [&](const nlohmann::json& obj, const char* key, const std::string& where) -> const nlohmann::json& {
    if (!obj.contains(key)) throw ParseError("weights: " + where + " is missing \"" + key + "\"");
    return obj.at(key);
  };
  auto matrix = [](const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ParseError("weights: " + where + " must be a non-empty array of rows");
    const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
      const auto& row = j[r];
      if (!row.is_array() || row.size() != cols) {
        throw ParseError("weights: " + where + " row " + std::to_string(r) + " has inconsistent length");
      }
      for (std::size_t c = 0; c < cols; ++c) {
        if (!row[c].is_number()) {
          throw ParseError("weights: " + where + "[" + std::to_string(r) + "][" + std::to_string(c) +
                           "] is not a number");
        }
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
      }
    }
    return m;
  };

  Weights w;
  const auto& dims = require(doc, "channel_dims", "document");
  if (!dims.is_array()) throw ParseError("weights: channel_dims must be an array");
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (!dims[i].is_number_integer() || dims[i].get<long long>() < 1) {
      throw ParseError("weights: channel_dims[" + std::to_string(i) + "] must be a positive integer");
    }
    w.channel_dims.push_back(dims[i].get<int>());
  }
  const auto& layers = require(doc, "layers", "document");
  if (!layers.is_array()) throw ParseError("weights: layers must be an array");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string where = "layers[" + std::to_string(l) + "]";
    w.layers.push_back({matrix(require(layers[l], "theta0", where), where + ".theta0"),
                        matrix(require(layers[l], "theta1", where), where + ".theta1")});
  }
  if (doc.contains("metadata")) w.metadata = doc.at("metadata");
  w.validate();
  return w;
}

inline Weights parse_weights(const std::string& text, const std::string& source = "<string>") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source + ": parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  try {
    return weights_from_json(doc);
  } catch (const Error& e) {
    throw ParseError(source + ": " + e.what());
  }
}

inline Weights load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open weights file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_weights(buf.str(), path);
}

/// Doubles are written in shortest round-trip decimal form, so a save/load
/// cycle reproduces every entry bit for bit.
inline void save_weights(const Weights& w, const std::string& path) {
  w.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write weights file " + path);
  out << to_json(w).dump(1) << '\n';
}

/// Uniform(-s, s) weights with s = scale / sqrt(fan-in); used for fixtures.
inline Weights random_weights(const std::vector<int>& channel_dims, std::uint64_t seed, double scale = 1.0) {
  if (channel_dims.size() < 2) throw DimensionError("random_weights: need at least two channel dims");
  std::mt19937_64 rng(seed);
  Weights w;
  w.channel_dims = channel_dims;
  for (std::size_t l = 0; l + 1 < channel_dims.size(); ++l) {
    const double s = scale / std::sqrt(static_cast<double>(channel_dims[l]));
    std::uniform_real_distribution<double> dist(-s, s);
    Layer layer{Matrix(channel_dims[l], channel_dims[l + 1]), Matrix(channel_dims[l], channel_dims[l + 1])};
    for (Eigen::Index i = 0; i < layer.theta0.size(); ++i) layer.theta0.data()[i] = dist(rng);
    for (Eigen::Index i = 0; i < layer.theta1.size(); ++i) layer.theta1.data()[i] = dist(rng);
    w.layers.push_back(std::move(layer));
  }
  w.metadata = {{"source", "random_weights"}, {"seed", seed}, {"scale", scale}};
  return w;
}

}  // namespace mdskit::gcn

namespace mdskit {
using GcnWeights = gcn::Weights;
}  // namespace mdskit
