// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mdskit/mdskit.hpp"
#include "support/oracles.hpp"

using namespace mdskit;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Verdict()>& check) {
  const auto start = Clock::now();
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (!v.pass) ++failures;
  std::printf("%s %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool minimal(const Graph& g, const VertexSet& s) {
  for (Vertex v : s.members()) {
    VertexSet t = s;
    t.erase(v);
    if (is_dominating(g, t)) return false;
  }
  return true;
}

/// Labeled corpus shared by the bound and pruning checks: ER graphs across
/// a range of densities plus BA graphs.
std::vector<Instance> labeled_corpus() {
  std::vector<Instance> out;
  GenerateOptions er;
  er.count = 150;
  er.n_min = 20;
  er.n_max = 60;
  er.avg_degree = {2.0, 10.0};
  er.seed = 1001;
  er.label.max_solutions = 8;
  er.id_prefix = "er";
  for (auto& inst : generate_dataset(er).instances) out.push_back(std::move(inst));
  GenerateOptions ba = er;
  ba.count = 50;
  ba.model = "ba";
  ba.ba_attachments = 2;
  ba.seed = 1002;
  ba.id_prefix = "ba";
  for (auto& inst : generate_dataset(ba).instances) out.push_back(std::move(inst));
  return out;
}

}  // namespace

int main() {
  const gcn::Weights fixture = gcn::load_weights(std::string(MDSKIT_FIXTURE_DIR) + "/gcn_fixture_weights.json");

  report("oracle-equivalence", [] {
    std::mt19937_64 rng(20240601);
    int mismatches = 0;
    const auto start = Clock::now();
    for (int i = 0; i < 1000; ++i) {
      const int n = 1 + static_cast<int>(rng() % 12);
      const double p = 0.1 * static_cast<double>(1 + rng() % 9);
      const Graph g = generate_er(n, p, rng());
      const auto r = solve_exact(g);
      if (r.gamma != brute_force_gamma(g) || !is_dominating(g, r.solution) ||
          static_cast<int>(r.solution.size()) != r.gamma) {
        ++mismatches;
      }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    return Verdict{mismatches == 0 && secs < 300.0, fmt("1000 ER graphs n<=12, %d mismatches", mismatches)};
  });

  report("c6-enumeration", [] {
    std::set<std::vector<Vertex>> got;
    const auto sols = enumerate_optima(oracle::cycle(6), 32);
    for (const auto& s : sols) got.insert(s.sorted());
    const std::set<std::vector<Vertex>> want{{0, 3}, {1, 4}, {2, 5}};
    return Verdict{got == want && sols.size() == 3, fmt("%zu optima returned", sols.size())};
  });

  report("greedy-bound", [] {
    std::mt19937_64 rng(77);
    int violations = 0;
    for (int i = 0; i < 500; ++i) {
      const int n = 1 + static_cast<int>(rng() % 200);
      Graph g;
      if (i % 4 == 3 && n >= 3) {
        g = generate_ba(n, 1 + static_cast<int>(rng() % std::min(n - 1, 5)), rng());
      } else {
        g = generate_er(n, std::uniform_real_distribution<double>(0.0, 0.3)(rng), rng());
      }
      const double bound = n + 1 - std::sqrt(2.0 * static_cast<double>(g.edge_count()) + 1.0);
      if (static_cast<double>(construct(g, Heuristic::greedy()).size()) > bound + 1e-9) ++violations;
    }
    return Verdict{violations == 0, fmt("500 graphs n<=200, %d violations", violations)};
  });

  const std::vector<Instance> corpus = labeled_corpus();

  report("domination-bounds", [&] {
    int checked = 0;
    int violations = 0;
    for (const auto& inst : corpus) {
      const auto st = graph_stats(inst.graph);
      if (!inst.labeled() || st.min_degree < 1) continue;
      ++checked;
      const int lower = (st.n + st.max_degree) / (st.max_degree + 1);
      if (*inst.gamma < lower || *inst.gamma > st.n / 2) ++violations;
    }
    return Verdict{violations == 0 && checked > 0,
                   fmt("%d labeled instances with min degree >= 1, %d violations", checked, violations)};
  });

  report("prune-minimal-idempotent", [&] {
    int outputs = 0;
    int violations = 0;
    for (const auto& inst : corpus) {
      const Graph& g = inst.graph;
      std::vector<VertexSet> raw{construct(g, Heuristic::greedy())};
      for (std::uint64_t s = 0; s < 5; ++s) raw.push_back(construct(g, Heuristic::random(s)));
      const auto maps = gcn::forward(g, fixture);
      for (std::size_t k = 0; k < maps.count; ++k) raw.push_back(construct(g, Heuristic::from_map(maps.row(k), k)));
      for (const auto& s : raw) {
        ++outputs;
        const VertexSet once = prune(g, s);
        if (!is_dominating(g, once) || !once.is_subset_of(s) || !minimal(g, once) || !(prune(g, once) == once)) {
          ++violations;
        }
      }
    }
    return Verdict{violations == 0, fmt("%d heuristic outputs on %zu instances, %d violations", outputs,
                                        corpus.size(), violations)};
  });

  report("ig-monotone", [] {
    std::mt19937_64 rng(4242);
    int violations = 0;
    double worst = 0.0;
    double gain = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double p = std::uniform_real_distribution<double>(0.01, 0.05)(rng);
      const Graph g = generate_er(200, p, rng());
      IgConfig cfg;
      cfg.time_limit = std::chrono::seconds(10);
      cfg.seed = rng();
      const auto start = Clock::now();
      const auto r = run_ig(g, cfg);
      const double secs = std::chrono::duration<double>(Clock::now() - start).count();
      worst = std::max(worst, secs);
      const std::size_t baseline = prune(g, construct(g, Heuristic::greedy())).size();
      gain += static_cast<double>(baseline) - static_cast<double>(r.best.size());
      bool ok = r.best.size() <= baseline && is_dominating(g, r.best) && secs <= 10.0;
      for (std::size_t t = 1; t < r.trace.iterations.size(); ++t) {
        ok = ok && r.trace.iterations[t].size < r.trace.iterations[t - 1].size;
      }
      if (!ok) ++violations;
    }
    return Verdict{violations == 0, fmt("100 ER n=200, %d violations, slowest %.2fs, mean gain %.2f vertices",
                                        violations, worst, gain / 100.0)};
  });

  report("gcn-properties", [&] {
    std::vector<std::string> problems;
    std::mt19937_64 rng(31337);

    gcn::Weights zero = fixture;
    for (auto& l : zero.layers) {
      l.theta0.setZero();
      l.theta1.setZero();
    }
    for (int n : {1, 17, 600}) {
      const auto maps = gcn::forward(generate_er(n, 0.02, 5), zero);
      if (!std::all_of(maps.values.begin(), maps.values.end(), [](double v) { return v == 0.5; })) {
        problems.push_back(fmt("zero weights n=%d", n));
      }
    }

    double worst_equiv = 0.0;
    for (int i = 0; i < 50; ++i) {
      const int n = 2 + static_cast<int>(rng() % 150);
      const Graph g = generate_er(n, std::uniform_real_distribution<double>(0.02, 0.3)(rng), rng());
      std::vector<Vertex> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      const auto a = gcn::forward(g, fixture);
      const auto b = gcn::forward(permute(g, perm), fixture);
      for (std::size_t k = 0; k < a.count; ++k)
        for (int v = 0; v < n; ++v) worst_equiv = std::max(worst_equiv, std::abs(b.at(k, perm[v]) - a.at(k, v)));
    }
    if (worst_equiv > 1e-9) problems.push_back(fmt("equivariance error %.3g", worst_equiv));

    auto sig = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
    gcn::Weights scalar;
    scalar.channel_dims = {1, 1};
    scalar.layers.push_back({gcn::Matrix::Constant(1, 1, 0.3), gcn::Matrix::Constant(1, 1, 0.4)});
    const auto k2 = gcn::forward(oracle::path(2), scalar);
    const auto p3 = gcn::forward(oracle::path(3), scalar);
    const double w = 1.0 / std::sqrt(2.0);
    double hand = std::max(std::abs(k2.at(0, 0) - sig(0.7)), std::abs(k2.at(0, 1) - sig(0.7)));
    hand = std::max({hand, std::abs(p3.at(0, 0) - sig(0.3 + 0.4 * w)), std::abs(p3.at(0, 1) - sig(0.3 + 0.8 * w)),
                     std::abs(p3.at(0, 2) - sig(0.3 + 0.4 * w))});
    if (hand > 1e-12) problems.push_back(fmt("hand cases off by %.3g", hand));

    const auto tmp = std::filesystem::temp_directory_path() / "mdskit_acceptance_weights.json";
    for (const auto& wts : {fixture, gcn::random_weights({5, 7, 3}, rng(), 3.0)}) {
      gcn::save_weights(wts, tmp.string());
      if (!(gcn::load_weights(tmp.string()) == wts)) problems.push_back("round trip not bit-exact");
    }
    std::filesystem::remove(tmp);

    std::string detail = fmt("equivariance max error %.3g on 50 pairs, hand cases max error %.3g", worst_equiv, hand);
    for (const auto& p : problems) detail += "; " + p;
    return Verdict{problems.empty(), detail};
  });

  report("fixture-weights-end-to-end", [&] {
    std::mt19937_64 rng(8080);
    int invalid = 0;
    std::size_t map_total = 0;
    std::size_t greedy_total = 0;
    for (int i = 0; i < 200; ++i) {
      const int n = 5 + static_cast<int>(rng() % 700);
      const Graph g = i % 3 == 2 ? generate_ba(n, 1 + static_cast<int>(rng() % 4), rng())
                                 : generate_er(n, std::min(1.0, std::uniform_real_distribution<double>(1.0, 8.0)(rng) / n), rng());
      const auto maps = gcn::forward(g, fixture);
      const VertexSet s = construct_from_maps(g, maps);
      if (!is_dominating(g, s)) ++invalid;
      map_total += s.size();
      greedy_total += prune(g, construct(g, Heuristic::greedy())).size();
    }
    return Verdict{invalid == 0, fmt("200 graphs, %d invalid; total size %zu (greedy+prune %zu)", invalid, map_total,
                                     greedy_total)};
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
