#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mdskit/error.hpp"
#include "mdskit/exact.hpp"
#include "mdskit/graph.hpp"
#include "mdskit/parallel.hpp"

namespace mdskit {

using nlohmann::json;

/// A graph with its domination number and labeled optimal solutions.
/// Unlabeled instances carry no gamma and no solutions.
struct Instance {
  std::string id;
  Graph graph;
  std::optional<int> gamma;
  std::vector<VertexSet> solutions;
  json provenance = json::object();

  bool labeled() const { return gamma.has_value(); }

  void validate() const {
    auto fail = [&](const std::string& what) { return InvariantError("instance '" + id + "': " + what); };
    if (!solutions.empty() && !gamma) throw fail("solutions present without gamma");
    if (gamma && *gamma < 0) throw fail("negative gamma");
    for (std::size_t i = 0; i < solutions.size(); ++i) {
      const auto& s = solutions[i];
      if (s.universe() != graph.order()) throw fail("solution " + std::to_string(i) + " has the wrong universe");
      if (static_cast<int>(s.size()) != *gamma) {
        throw fail("solution " + std::to_string(i) + " has size " + std::to_string(s.size()) + " but gamma is " +
                   std::to_string(*gamma));
      }
      if (!is_dominating(graph, s)) throw fail("solution " + std::to_string(i) + " does not dominate the graph");
      for (std::size_t j = 0; j < i; ++j) {
        if (solutions[j] == s) throw fail("solutions " + std::to_string(j) + " and " + std::to_string(i) + " coincide");
      }
    }
  }
};

inline json instance_to_json(const Instance& inst) {
  json doc;
  doc["n"] = inst.graph.order();
  json edges = json::array();
  for (const auto& e : inst.graph.edges()) edges.push_back({e.u, e.v});
  doc["edges"] = std::move(edges);
  doc["gamma"] = inst.gamma ? json(*inst.gamma) : json(nullptr);
  json sols = json::array();
  for (const auto& s : inst.solutions) sols.push_back(s.sorted());
  doc["solutions"] = std::move(sols);
  doc["provenance"] = inst.provenance;
  if (!inst.id.empty()) doc["id"] = inst.id;
  return doc;
}

/// Unknown top-level fields are reported through `warnings` (or stderr when
/// null) and otherwise ignored.
inline Instance instance_from_json(const json& doc, const std::string& name,
                                   std::vector<std::string>* warnings = nullptr) {
  auto fail = [&](const std::string& what) { return ParseError("instance '" + name + "': " + what); };
  if (!doc.is_object()) throw fail("top level must be an object");
  static const std::set<std::string> known{"n", "edges", "gamma", "solutions", "provenance", "id"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) {
      const std::string msg = "instance '" + name + "': ignoring unknown field \"" + key + "\"";
      if (warnings) {
        warnings->push_back(msg);
      } else {
        std::cerr << "warning: " << msg << '\n';
      }
    }
  }
  Instance inst;
  inst.id = doc.contains("id") && doc["id"].is_string() ? doc["id"].get<std::string>() : name;
  try {
    if (!doc.contains("n") || !doc["n"].is_number_integer()) throw fail("\"n\" must be an integer");
    const int n = doc["n"].get<int>();
    if (n < 0) throw fail("\"n\" must be non-negative");
    std::vector<Edge> edges;
    if (!doc.contains("edges") || !doc["edges"].is_array()) throw fail("\"edges\" must be an array");
    for (const auto& e : doc["edges"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
        throw fail("every edge must be a pair of integers");
      }
      edges.push_back({e[0].get<Vertex>(), e[1].get<Vertex>()});
    }
    inst.graph = Graph(n, edges);
    if (doc.contains("gamma") && !doc["gamma"].is_null()) {
      if (!doc["gamma"].is_number_integer()) throw fail("\"gamma\" must be an integer or null");
      inst.gamma = doc["gamma"].get<int>();
    }
    if (doc.contains("solutions")) {
      if (!doc["solutions"].is_array()) throw fail("\"solutions\" must be an array");
      for (const auto& s : doc["solutions"]) {
        if (!s.is_array()) throw fail("every solution must be an array of vertex ids");
        VertexSet set(n);
        for (const auto& v : s) {
          if (!v.is_number_integer()) throw fail("solution entries must be integers");
          const auto id = v.get<long long>();
          if (id < 0 || id >= n) throw fail("solution vertex " + std::to_string(id) + " out of range");
          if (!set.insert(static_cast<Vertex>(id))) throw fail("solution repeats vertex " + std::to_string(id));
        }
        inst.solutions.push_back(std::move(set));
      }
    }
    if (doc.contains("provenance")) inst.provenance = doc["provenance"];
  } catch (const json::exception& e) {
    throw fail(e.what());
  } catch (const InvariantError& e) {
    throw fail(e.what());
  }
  inst.validate();
  return inst;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

inline json parse_json_file(const std::filesystem::path& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": parse error at byte " + std::to_string(e.byte));
  }
}

inline Instance load_instance(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr) {
  return instance_from_json(parse_json_file(path), path.stem().string(), warnings);
}

inline void save_instance(const Instance& inst, const std::filesystem::path& path) {
  inst.validate();
  write_text_file(path, instance_to_json(inst).dump() + "\n");
}

/// Loads either an instance JSON document (".json") or an edge list.
inline Instance load_graph_or_instance(const std::filesystem::path& path) {
  if (path.extension() == ".json") return load_instance(path);
  auto loaded = read_edge_list(path.string());
  Instance inst;
  inst.id = path.stem().string();
  inst.graph = std::move(loaded.graph);
  inst.provenance = {{"source", path.filename().string()}};
  if (!loaded.labels.empty()) inst.provenance["labels"] = loaded.labels;
  return inst;
}

// ---------------------------------------------------------------------------
// Manifest

enum class Split { unassigned, train, test };

inline const char* to_string(Split s) {
  switch (s) {
    case Split::train:
      return "train";
    case Split::test:
      return "test";
    case Split::unassigned:
      break;
  }
  return "unassigned";
}

inline Split split_from_string(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "test") return Split::test;
  if (s == "unassigned") return Split::unassigned;
  throw ParseError("unknown split \"" + s + "\"");
}

struct ManifestEntry {
  std::string path;  // relative to the manifest's directory
  int n = 0;
  std::optional<int> gamma;
  Split split = Split::unassigned;
};

struct DatasetSummary {
  std::size_t count = 0;
  std::size_t labeled = 0;
  std::size_t train = 0;
  std::size_t test = 0;
  double mean_n = 0.0;
  double mean_gamma = 0.0;  // over labeled instances
};

struct DatasetManifest {
  std::vector<ManifestEntry> instances;
  json provenance = json::object();

  DatasetSummary summary() const {
    DatasetSummary s;
    s.count = instances.size();
    double total_n = 0.0;
    double total_gamma = 0.0;
    for (const auto& e : instances) {
      total_n += e.n;
      if (e.gamma) {
        ++s.labeled;
        total_gamma += *e.gamma;
      }
      if (e.split == Split::train) ++s.train;
      if (e.split == Split::test) ++s.test;
    }
    if (s.count > 0) s.mean_n = total_n / static_cast<double>(s.count);
    if (s.labeled > 0) s.mean_gamma = total_gamma / static_cast<double>(s.labeled);
    return s;
  }
};

inline json summary_to_json(const DatasetSummary& s) {
  return {{"count", s.count}, {"labeled", s.labeled}, {"train", s.train},
          {"test", s.test},   {"mean_n", s.mean_n},   {"mean_gamma", s.mean_gamma}};
}

inline json manifest_to_json(const DatasetManifest& m) {
  json doc;
  json list = json::array();
  for (const auto& e : m.instances) {
    list.push_back({{"path", e.path},
                    {"n", e.n},
                    {"gamma", e.gamma ? json(*e.gamma) : json(nullptr)},
                    {"split", to_string(e.split)}});
  }
  doc["instances"] = std::move(list);
  doc["summary"] = summary_to_json(m.summary());
  doc["provenance"] = m.provenance;
  return doc;
}

inline DatasetManifest manifest_from_json(const json& doc, const std::string& name = "manifest") {
  auto fail = [&](const std::string& what) { return ParseError(name + ": " + what); };
  if (!doc.is_object() || !doc.contains("instances") || !doc["instances"].is_array()) {
    throw fail("expected an object with an \"instances\" array");
  }
  DatasetManifest m;
  try {
    for (const auto& e : doc["instances"]) {
      ManifestEntry entry;
      entry.path = e.at("path").get<std::string>();
      entry.n = e.at("n").get<int>();
      if (e.contains("gamma") && !e["gamma"].is_null()) entry.gamma = e["gamma"].get<int>();
      if (e.contains("split")) entry.split = split_from_string(e["split"].get<std::string>());
      m.instances.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw fail(e.what());
  }
  if (doc.contains("provenance")) m.provenance = doc["provenance"];
  if (doc.contains("summary") && doc["summary"] != summary_to_json(m.summary())) {
    throw InvariantError(name + ": stored summary does not match the listed instances");
  }
  return m;
}

inline DatasetManifest load_manifest(const std::filesystem::path& path) {
  return manifest_from_json(parse_json_file(path), path.string());
}

inline void save_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  write_text_file(path, manifest_to_json(m).dump(2) + "\n");
}

/// Deterministic shuffle, then the first floor(fraction * count) go to train.
inline DatasetManifest split_dataset(const DatasetManifest& m, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("split_dataset: train_fraction must lie in (0,1)");
  }
  std::vector<std::size_t> order(m.instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(order[i - 1], order[pick(rng)]);
  }
  const auto train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(order.size()) + 1e-9));
  DatasetManifest out = m;
  for (std::size_t r = 0; r < order.size(); ++r) out.instances[order[r]].split = r < train ? Split::train : Split::test;
  out.provenance["split"] = {{"train_fraction", train_fraction}, {"seed", seed}};
  return out;
}

// ---------------------------------------------------------------------------
// Generation and labeling

struct LabelOptions {
  std::size_t max_solutions = 32;
  ExactBudget budget{std::nullopt, std::chrono::milliseconds(60'000)};
};

/// Fills gamma and solutions by exact enumeration. Throws BudgetExceeded.
inline void label_instance(Instance& inst, const LabelOptions& opts) {
  auto optima = enumerate_optima(inst.graph, opts.max_solutions, opts.budget);
  inst.gamma = static_cast<int>(optima.front().size());
  inst.solutions = std::move(optima);
}

struct GenerateOptions {
  std::size_t count = 10;
  int n_min = 20;
  int n_max = 30;
  // Edge probability range; when absent, p is drawn so the expected average
  // degree falls in avg_degree.
  std::optional<std::pair<double, double>> p_range;
  std::pair<double, double> avg_degree{3.0, 8.0};
  std::string model = "er";  // "er" or "ba"
  int ba_attachments = 2;
  std::uint64_t seed = 0;
  LabelOptions label;
  std::size_t max_attempts = 0;  // 0 means 4 * count
  int jobs = 1;
  std::string id_prefix = "inst";
};

struct GeneratedDataset {
  std::vector<Instance> instances;
  std::vector<std::string> discarded;  // one message per discarded attempt
  bool complete = true;                // false when attempts ran out first
};

namespace detail {

struct Attempt {
  std::optional<Instance> instance;
  std::string discard_reason;
};

inline Attempt generate_attempt(const GenerateOptions& opts, std::size_t attempt) {
  std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                    static_cast<std::uint32_t>(attempt), static_cast<std::uint32_t>(attempt >> 32)};
  std::mt19937_64 rng(seq);
  const int n = std::uniform_int_distribution<int>(opts.n_min, opts.n_max)(rng);
  const std::uint64_t graph_seed = rng();
  Instance inst;
  inst.provenance = {{"model", opts.model}, {"n", n}, {"seed", graph_seed}, {"attempt", attempt},
                     {"dataset_seed", opts.seed}, {"max_solutions", opts.label.max_solutions}};
  if (opts.model == "ba") {
    inst.graph = generate_ba(n, opts.ba_attachments, graph_seed);
    inst.provenance["k"] = opts.ba_attachments;
  } else {
    double p = 0.0;
    if (opts.p_range) {
      p = std::uniform_real_distribution<double>(opts.p_range->first, opts.p_range->second)(rng);
      if (opts.p_range->first == opts.p_range->second) p = opts.p_range->first;
    } else {
      const double d = std::uniform_real_distribution<double>(opts.avg_degree.first, opts.avg_degree.second)(rng);
      p = n > 1 ? std::min(1.0, d / static_cast<double>(n - 1)) : 0.0;
      inst.provenance["target_avg_degree"] = d;
    }
    inst.graph = generate_er(n, p, graph_seed);
    inst.provenance["p"] = p;
  }
  Attempt out;
  try {
    label_instance(inst, opts.label);
    out.instance = std::move(inst);
  } catch (const BudgetExceeded& e) {
    out.discard_reason = "attempt " + std::to_string(attempt) + " (n=" + std::to_string(n) + "): " + e.what();
  }
  return out;
}

}  // namespace detail

/// Generates and labels random instances. Attempts whose labeling exceeds
/// the budget are discarded and replaced by further attempts, up to
/// max_attempts. Attempts are taken in index order, so the result depends
/// only on the options (and on which attempts finish within a time budget).
inline GeneratedDataset generate_dataset(const GenerateOptions& opts) {
  if (opts.count == 0) throw std::invalid_argument("generate_dataset: count must be positive");
  if (opts.n_min < 1 || opts.n_max < opts.n_min) throw std::invalid_argument("generate_dataset: bad n range");
  if (opts.model != "er" && opts.model != "ba") throw std::invalid_argument("generate_dataset: unknown model " + opts.model);
  if (opts.model == "ba" && opts.ba_attachments >= opts.n_min) {
    throw std::invalid_argument("generate_dataset: BA attachments must be below the smallest order");
  }
  if (opts.p_range && !(0.0 <= opts.p_range->first && opts.p_range->first <= opts.p_range->second &&
                        opts.p_range->second <= 1.0)) {
    throw std::invalid_argument("generate_dataset: p range must satisfy 0 <= lo <= hi <= 1");
  }
  const std::size_t max_attempts = opts.max_attempts ? opts.max_attempts : 4 * opts.count;
  GeneratedDataset out;
  std::size_t next_attempt = 0;
  const std::size_t batch = static_cast<std::size_t>(std::max(opts.jobs, 1));
  while (out.instances.size() < opts.count && next_attempt < max_attempts) {
    const std::size_t want = std::min({opts.count - out.instances.size(), batch, max_attempts - next_attempt});
    std::vector<detail::Attempt> results(want);
    parallel_for(want, opts.jobs, [&](std::size_t i) { results[i] = detail::generate_attempt(opts, next_attempt + i); });
    next_attempt += want;
    for (auto& r : results) {
      if (r.instance) {
        char id[32];
        std::snprintf(id, sizeof id, "%s_%05zu", opts.id_prefix.c_str(), out.instances.size());
        r.instance->id = id;
        out.instances.push_back(std::move(*r.instance));
      } else {
        out.discarded.push_back(std::move(r.discard_reason));
      }
    }
  }
  out.complete = out.instances.size() == opts.count;
  return out;
}

/// Writes each instance as <dir>/<id>.json plus <dir>/manifest.json.
inline DatasetManifest write_dataset(const std::vector<Instance>& instances, const std::filesystem::path& dir,
                                     json provenance = json::object()) {
  std::filesystem::create_directories(dir);
  DatasetManifest m;
  m.provenance = std::move(provenance);
  for (const auto& inst : instances) {
    const std::string file = inst.id + ".json";
    save_instance(inst, dir / file);
    m.instances.push_back({file, inst.graph.order(), inst.gamma, Split::unassigned});
  }
  save_manifest(m, dir / "manifest.json");
  return m;
}

inline json generate_options_to_json(const GenerateOptions& o) {
  json j = {{"count", o.count},
            {"n_range", {o.n_min, o.n_max}},
            {"model", o.model},
            {"seed", o.seed},
            {"max_solutions", o.label.max_solutions}};
  if (o.p_range) {
    j["p_range"] = {o.p_range->first, o.p_range->second};
  } else {
    j["avg_degree_range"] = {o.avg_degree.first, o.avg_degree.second};
  }
  if (o.model == "ba") j["k"] = o.ba_attachments;
  if (o.label.budget.time_limit) j["label_time_limit_ms"] = o.label.budget.time_limit->count();
  if (o.label.budget.max_nodes) j["label_max_nodes"] = *o.label.budget.max_nodes;
  return j;
}

}  // namespace mdskit
