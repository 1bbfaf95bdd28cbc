#pragma once

#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdskit/dataset.hpp"
#include "mdskit/exact.hpp"
#include "mdskit/gcn.hpp"
#include "mdskit/heuristics.hpp"
#include "mdskit/ig.hpp"
#include "mdskit/parallel.hpp"

namespace mdskit {

enum class Method { random, greedy, gcn, ig, ig_gcn, exact };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::random:
      return "random";
    case Method::greedy:
      return "greedy";
    case Method::gcn:
      return "gcn";
    case Method::ig:
      return "ig";
    case Method::ig_gcn:
      return "ig-gcn";
    case Method::exact:
      return "exact";
  }
  return "?";
}

inline std::optional<Method> parse_method(const std::string& s) {
  for (Method m : {Method::random, Method::greedy, Method::gcn, Method::ig, Method::ig_gcn, Method::exact}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

inline bool needs_weights(Method m) { return m == Method::gcn || m == Method::ig_gcn; }

/// One solver run on one instance.
struct BenchRecord {
  std::string instance;
  Method method = Method::greedy;
  std::uint64_t seed = 0;
  std::size_t size = 0;
  std::optional<int> gamma;
  std::optional<double> deviation;  // 100 * (size - gamma) / gamma
  double elapsed_ms = 0.0;
};

inline std::optional<double> deviation_pct(std::size_t size, std::optional<int> gamma) {
  if (!gamma || *gamma <= 0) return std::nullopt;
  return 100.0 * (static_cast<double>(size) - *gamma) / *gamma;
}

struct SolverSettings {
  IgConfig ig;
  ExactBudget exact_budget;
  std::shared_ptr<const gcn::Weights> weights;
};

/// Runs one method. Heuristic methods are followed by pruning; the gcn
/// method keeps the smallest pruned construction over all maps.
inline BenchRecord run_method(const Instance& inst, Method method, std::uint64_t seed, const SolverSettings& cfg) {
  using Clock = std::chrono::steady_clock;
  const Graph& g = inst.graph;
  if (needs_weights(method) && !cfg.weights) {
    throw std::invalid_argument(std::string("method ") + to_string(method) + " requires weights");
  }
  const auto start = Clock::now();
  VertexSet result;
  switch (method) {
    case Method::random:
      result = prune(g, construct(g, Heuristic::random(seed)));
      break;
    case Method::greedy:
      result = prune(g, construct(g, Heuristic::greedy()));
      break;
    case Method::gcn:
      result = construct_from_maps(g, gcn::forward(g, *cfg.weights));
      break;
    case Method::ig:
    case Method::ig_gcn: {
      IgConfig ig = cfg.ig;
      ig.seed = seed;
      if (method == Method::ig) {
        ig.mode = IgMode::classic;
        result = run_ig(g, ig).best;
      } else {
        ig.mode = IgMode::gcn_cycling;
        const ProbabilityMaps maps = gcn::forward(g, *cfg.weights);
        result = run_ig(g, ig, &maps).best;
      }
      break;
    }
    case Method::exact:
      result = solve_exact(g, cfg.exact_budget).solution;
      break;
  }
  const auto elapsed = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  if (!is_dominating(g, result)) throw InvariantError(std::string(to_string(method)) + " produced a non-dominating set");
  BenchRecord rec;
  rec.instance = inst.id;
  rec.method = method;
  rec.seed = seed;
  rec.size = result.size();
  rec.gamma = inst.gamma;
  rec.deviation = deviation_pct(rec.size, rec.gamma);
  rec.elapsed_ms = elapsed;
  return rec;
}

inline nlohmann::json record_to_json(const BenchRecord& r) {
  nlohmann::json j = {{"instance", r.instance}, {"method", to_string(r.method)}, {"seed", r.seed},
                      {"size", r.size},         {"elapsed_ms", r.elapsed_ms}};
  j["gamma"] = r.gamma ? nlohmann::json(*r.gamma) : nlohmann::json(nullptr);
  j["deviation_pct"] = r.deviation ? nlohmann::json(*r.deviation) : nlohmann::json(nullptr);
  return j;
}

// ---------------------------------------------------------------------------
// CSV: instance,method,seed,size,gamma,deviation_pct,elapsed_ms
// Deviation is written in shortest round-trip form so re-reading the file
// reproduces the aggregates exactly. Elapsed time is the last column.

inline constexpr const char* kCsvHeader = "instance,method,seed,size,gamma,deviation_pct,elapsed_ms";

inline std::string shortest(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

inline void write_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << kCsvHeader << '\n';
  char elapsed[32];
  for (const auto& r : records) {
    std::snprintf(elapsed, sizeof elapsed, "%.3f", r.elapsed_ms);
    out << r.instance << ',' << to_string(r.method) << ',' << r.seed << ',' << r.size << ','
        << (r.gamma ? std::to_string(*r.gamma) : "") << ',' << (r.deviation ? shortest(*r.deviation) : "") << ','
        << elapsed << '\n';
  }
}

inline std::vector<BenchRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ParseError("bench csv: missing or unexpected header");
  std::vector<BenchRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 7) throw ParseError("bench csv line " + std::to_string(lineno) + ": expected 7 fields");
    BenchRecord r;
    r.instance = f[0];
    auto m = parse_method(f[1]);
    if (!m) throw ParseError("bench csv line " + std::to_string(lineno) + ": unknown method " + f[1]);
    r.method = *m;
    r.seed = std::stoull(f[2]);
    r.size = std::stoull(f[3]);
    if (!f[4].empty()) r.gamma = std::stoi(f[4]);
    if (!f[5].empty()) {
      double d = 0.0;
      std::from_chars(f[5].data(), f[5].data() + f[5].size(), d);
      r.deviation = d;
    }
    r.elapsed_ms = std::stod(f[6]);
    out.push_back(std::move(r));
  }
  return out;
}

struct MethodSummary {
  Method method = Method::greedy;
  std::size_t runs = 0;
  double mean_size = 0.0;
  std::optional<double> mean_deviation;  // over runs with a known gamma
};

/// Per-method means, methods listed in order of first appearance.
inline std::vector<MethodSummary> aggregate(const std::vector<BenchRecord>& records) {
  std::vector<MethodSummary> out;
  std::vector<double> size_sum;
  std::vector<double> dev_sum;
  std::vector<std::size_t> dev_count;
  for (const auto& r : records) {
    std::size_t k = 0;
    while (k < out.size() && out[k].method != r.method) ++k;
    if (k == out.size()) {
      out.push_back({r.method, 0, 0.0, std::nullopt});
      size_sum.push_back(0.0);
      dev_sum.push_back(0.0);
      dev_count.push_back(0);
    }
    ++out[k].runs;
    size_sum[k] += static_cast<double>(r.size);
    if (r.deviation) {
      dev_sum[k] += *r.deviation;
      ++dev_count[k];
    }
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].mean_size = size_sum[k] / static_cast<double>(out[k].runs);
    if (dev_count[k] > 0) out[k].mean_deviation = dev_sum[k] / static_cast<double>(dev_count[k]);
  }
  return out;
}

inline std::string format_summary(const std::vector<MethodSummary>& rows) {
  std::string out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-8s %6s %12s %14s\n", "method", "runs", "mean_size", "mean_dev_pct");
  out += buf;
  for (const auto& r : rows) {
    if (r.mean_deviation) {
      std::snprintf(buf, sizeof buf, "%-8s %6zu %12.4f %14.4f\n", to_string(r.method), r.runs, r.mean_size,
                    *r.mean_deviation);
    } else {
      std::snprintf(buf, sizeof buf, "%-8s %6zu %12.4f %14s\n", to_string(r.method), r.runs, r.mean_size, "-");
    }
    out += buf;
  }
  return out;
}

struct BenchPlan {
  std::vector<Method> methods;
  std::vector<std::uint64_t> random_seeds{0, 1, 2, 3, 4};
  std::uint64_t seed = 0;  // used by ig and ig-gcn
  SolverSettings settings;
  int jobs = 1;
};

struct BenchOutcome {
  std::vector<BenchRecord> records;
  std::vector<std::string> failures;  // "<instance> <method>: <message>"
};

/// Runs every method on every instance. A failing run is recorded and the
/// benchmark continues. Records are ordered by instance, then method.
inline BenchOutcome run_bench(const std::vector<Instance>& instances, const BenchPlan& plan) {
  std::vector<BenchOutcome> per(instances.size());
  parallel_for(instances.size(), plan.jobs, [&](std::size_t i) {
    const Instance& inst = instances[i];
    for (Method m : plan.methods) {
      const std::vector<std::uint64_t> seeds =
          m == Method::random ? plan.random_seeds : std::vector<std::uint64_t>{plan.seed};
      for (std::uint64_t s : seeds) {
        try {
          per[i].records.push_back(run_method(inst, m, s, plan.settings));
        } catch (const std::exception& e) {
          per[i].failures.push_back(inst.id + " " + to_string(m) + ": " + e.what());
        }
      }
    }
  });
  BenchOutcome out;
  for (auto& p : per) {
    out.records.insert(out.records.end(), p.records.begin(), p.records.end());
    out.failures.insert(out.failures.end(), p.failures.begin(), p.failures.end());
  }
  return out;
}

}  // namespace mdskit
