#pragma once

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mdskit/bench.hpp"
#include "mdskit/dataset.hpp"
#include "mdskit/exact.hpp"
#include "mdskit/gcn.hpp"

namespace mdskit::cli {

/// Exit codes: 0 success, 1 usage error, 2 runtime failure.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kFailure = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::pair<double, double> parse_range(const std::string& text, const char* flag) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      const double v = std::stod(text);
      return {v, v};
    }
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw UsageError(std::string(flag) + ": expected 'lo:hi' or a single number, got '" + text + "'");
  }
}

inline ExactBudget make_budget(std::optional<long long> time_limit_ms, std::optional<std::uint64_t> max_nodes) {
  ExactBudget b;
  if (time_limit_ms) b.time_limit = std::chrono::milliseconds(*time_limit_ms);
  b.max_nodes = max_nodes;
  return b;
}

inline std::vector<std::filesystem::path> graph_files(const std::filesystem::path& input) {
  if (!std::filesystem::exists(input)) throw Error("input " + input.string() + " does not exist");
  if (!std::filesystem::is_directory(input)) return {input};
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(input)) {
    if (!entry.is_regular_file() || entry.path().filename() == "manifest.json") continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

struct Shared {
  int jobs = 1;
  std::uint64_t seed = 0;
};

}  // namespace detail

/// Entry point shared by the mdskit binary and the tests.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimum dominating set toolkit", "mdskit"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "generate and label random instances");
  GenerateOptions gen_opts;
  std::string gen_n = "20:30";
  std::optional<std::string> gen_p;
  std::string gen_degree = "3:8";
  std::string gen_out;
  long long gen_time_ms = 60'000;
  std::optional<std::uint64_t> gen_nodes;
  gen->add_option("--count", gen_opts.count, "number of instances")->check(CLI::PositiveNumber);
  gen->add_option("--n", gen_n, "vertex count range lo:hi");
  gen->add_option("--p", gen_p, "edge probability or range lo:hi (ER)");
  gen->add_option("--avg-degree", gen_degree, "expected average degree range when --p is absent");
  gen->add_option("--model", gen_opts.model, "er or ba")->check(CLI::IsMember({"er", "ba"}));
  gen->add_option("--k", gen_opts.ba_attachments, "BA attachments per vertex");
  gen->add_option("--seed", gen_opts.seed, "dataset seed");
  gen->add_option("--max-solutions", gen_opts.label.max_solutions, "optima stored per instance");
  gen->add_option("--time-limit-ms", gen_time_ms, "labeling budget per instance");
  gen->add_option("--max-nodes", gen_nodes, "labeling node budget per solve");
  gen->add_option("--max-attempts", gen_opts.max_attempts, "attempt cap (default 4 x count)");
  gen->add_option("--jobs", gen_opts.jobs, "worker threads");
  gen->add_option("out", gen_out, "output directory")->required();

  // label
  auto* lab = app.add_subcommand("label", "label graphs with exact optima");
  std::string lab_in;
  std::string lab_out;
  LabelOptions lab_opts;
  long long lab_time_ms = 60'000;
  std::optional<std::uint64_t> lab_nodes;
  int lab_jobs = 1;
  lab->add_option("--max-solutions", lab_opts.max_solutions, "optima stored per instance");
  lab->add_option("--time-limit-ms", lab_time_ms, "labeling budget per instance");
  lab->add_option("--max-nodes", lab_nodes, "node budget per solve");
  lab->add_option("--jobs", lab_jobs, "worker threads");
  lab->add_option("input", lab_in, "graph file or directory of graphs")->required();
  lab->add_option("out", lab_out, "output directory")->required();

  // split
  auto* spl = app.add_subcommand("split", "assign a train/test split to a manifest");
  std::string spl_manifest;
  std::optional<std::string> spl_output;
  double spl_fraction = 0.832;
  std::uint64_t spl_seed = 0;
  spl->add_option("--fraction", spl_fraction, "train fraction");
  spl->add_option("--seed", spl_seed, "shuffle seed");
  spl->add_option("--output", spl_output, "write here instead of in place");
  spl->add_option("manifest", spl_manifest, "manifest.json")->required();

  // solve
  auto* sol = app.add_subcommand("solve", "solve one graph and print a JSON record");
  std::string sol_graph;
  std::string sol_method;
  std::optional<std::string> sol_weights;
  IgConfig sol_ig;
  long long sol_time_ms = 10'000;
  bool sol_time_given = false;
  std::optional<std::uint64_t> sol_nodes;
  sol->add_option("--method", sol_method, "random|greedy|gcn|ig|ig-gcn|exact")->required();
  sol->add_option("--weights", sol_weights, "GCN weight file");
  sol->add_option("--beta", sol_ig.beta, "IG destruction fraction");
  sol->add_option("--delta-max", sol_ig.delta_max, "IG iterations without improvement");
  auto* sol_time_opt = sol->add_option("--time-limit-ms", sol_time_ms, "IG time limit / exact budget");
  sol->add_option("--seed", sol_ig.seed, "seed for random and IG");
  sol->add_option("--max-nodes", sol_nodes, "exact node budget");
  sol->add_option("graph", sol_graph, "edge list or instance JSON")->required();

  // bench
  auto* ben = app.add_subcommand("bench", "run methods over a manifest and write CSV");
  std::string ben_manifest;
  std::string ben_methods = "greedy";
  std::string ben_output;
  std::optional<std::string> ben_weights;
  std::vector<std::uint64_t> ben_seeds;
  std::uint64_t ben_seed = 0;
  std::optional<long long> ben_time_ms;
  std::optional<long long> ben_exact_ms;
  std::optional<std::uint64_t> ben_nodes;
  IgConfig ben_ig;
  int ben_jobs = 1;
  std::string ben_split = "all";
  ben->add_option("--methods", ben_methods, "comma-separated methods");
  ben->add_option("--output", ben_output, "CSV output path")->required();
  ben->add_option("--weights", ben_weights, "GCN weight file");
  ben->add_option("--seeds", ben_seeds, "seeds for the random method (default: 5 seeds from --seed)")->delimiter(',');
  ben->add_option("--seed", ben_seed, "base seed");
  ben->add_option("--time-limit-ms", ben_time_ms, "IG time limit per run");
  ben->add_option("--exact-time-limit-ms", ben_exact_ms, "exact budget per run");
  ben->add_option("--max-nodes", ben_nodes, "exact node budget per run");
  ben->add_option("--beta", ben_ig.beta, "IG destruction fraction");
  ben->add_option("--delta-max", ben_ig.delta_max, "IG iterations without improvement");
  ben->add_option("--jobs", ben_jobs, "worker threads");
  ben->add_option("--split", ben_split, "all|train|test")->check(CLI::IsMember({"all", "train", "test"}));
  ben->add_option("manifest", ben_manifest, "manifest.json")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) {
      const auto [n_lo, n_hi] = detail::parse_range(gen_n, "--n");
      gen_opts.n_min = static_cast<int>(n_lo);
      gen_opts.n_max = static_cast<int>(n_hi);
      if (gen_p) gen_opts.p_range = detail::parse_range(*gen_p, "--p");
      gen_opts.avg_degree = detail::parse_range(gen_degree, "--avg-degree");
      gen_opts.label.budget = detail::make_budget(gen_time_ms, gen_nodes);
      GeneratedDataset data;
      try {
        data = generate_dataset(gen_opts);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      for (const auto& msg : data.discarded) err << "discarded " << msg << '\n';
      const auto manifest = write_dataset(data.instances, gen_out, {{"generate", generate_options_to_json(gen_opts)}});
      const auto s = manifest.summary();
      out << "wrote " << s.count << " instances to " << gen_out << " (mean n " << s.mean_n << ", mean gamma "
          << s.mean_gamma << ", discarded " << data.discarded.size() << ")\n";
      if (!data.complete) {
        err << "error: only " << data.instances.size() << " of " << gen_opts.count
            << " instances were labeled within the attempt cap\n";
        return kFailure;
      }
      return kOk;
    }

    if (*lab) {
      lab_opts.budget = detail::make_budget(lab_time_ms, lab_nodes);
      const auto files = detail::graph_files(lab_in);
      std::vector<std::optional<Instance>> labeled(files.size());
      std::vector<std::string> errors(files.size());
      parallel_for(files.size(), lab_jobs, [&](std::size_t i) {
        try {
          Instance inst = load_graph_or_instance(files[i]);
          label_instance(inst, lab_opts);
          inst.provenance["max_solutions"] = lab_opts.max_solutions;
          labeled[i] = std::move(inst);
        } catch (const std::exception& e) {
          errors[i] = files[i].string() + ": " + e.what();
        }
      });
      std::vector<Instance> done;
      int failed = 0;
      for (std::size_t i = 0; i < files.size(); ++i) {
        if (labeled[i]) {
          done.push_back(std::move(*labeled[i]));
        } else {
          ++failed;
          err << "error: " << errors[i] << '\n';
        }
      }
      write_dataset(done, lab_out, {{"label", {{"input", lab_in}, {"max_solutions", lab_opts.max_solutions}}}});
      out << "labeled " << done.size() << " of " << files.size() << " graphs into " << lab_out << '\n';
      return failed == 0 ? kOk : kFailure;
    }

    if (*spl) {
      if (!(spl_fraction > 0.0 && spl_fraction < 1.0)) throw UsageError("--fraction must lie in (0,1)");
      const auto manifest = split_dataset(load_manifest(spl_manifest), spl_fraction, spl_seed);
      save_manifest(manifest, spl_output ? *spl_output : spl_manifest);
      const auto s = manifest.summary();
      out << "train=" << s.train << " test=" << s.test << '\n';
      return kOk;
    }

    if (*sol) {
      const auto method = parse_method(sol_method);
      if (!method) throw UsageError("unknown method '" + sol_method + "'");
      if (needs_weights(*method) && !sol_weights) throw UsageError(sol_method + " requires --weights");
      sol_time_given = sol_time_opt->count() > 0;
      SolverSettings settings;
      settings.ig = sol_ig;
      settings.ig.time_limit = std::chrono::milliseconds(sol_time_ms);
      settings.exact_budget =
          detail::make_budget(sol_time_given ? std::optional<long long>(sol_time_ms) : std::nullopt, sol_nodes);
      if (sol_weights) settings.weights = std::make_shared<gcn::Weights>(gcn::load_weights(*sol_weights));
      try {
        settings.ig.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      const Instance inst = load_graph_or_instance(sol_graph);
      out << record_to_json(run_method(inst, *method, sol_ig.seed, settings)).dump() << '\n';
      return kOk;
    }

    if (*ben) {
      BenchPlan plan;
      std::stringstream list(ben_methods);
      std::string name;
      while (std::getline(list, name, ',')) {
        const auto m = parse_method(name);
        if (!m) throw UsageError("unknown method '" + name + "'");
        plan.methods.push_back(*m);
      }
      const bool wants_ig = std::any_of(plan.methods.begin(), plan.methods.end(),
                                        [](Method m) { return m == Method::ig || m == Method::ig_gcn; });
      const bool wants_gcn = std::any_of(plan.methods.begin(), plan.methods.end(), needs_weights);
      if (wants_gcn && !ben_weights) throw UsageError("gcn methods require --weights");
      if (wants_ig && !ben_time_ms) throw UsageError("ig methods require an explicit --time-limit-ms");
      plan.seed = ben_seed;
      if (ben_seeds.empty()) {
        for (std::uint64_t i = 0; i < 5; ++i) ben_seeds.push_back(ben_seed + i);
      }
      plan.random_seeds = ben_seeds;
      plan.jobs = ben_jobs;
      plan.settings.ig = ben_ig;
      if (ben_time_ms) plan.settings.ig.time_limit = std::chrono::milliseconds(*ben_time_ms);
      try {
        plan.settings.ig.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      plan.settings.exact_budget = detail::make_budget(ben_exact_ms, ben_nodes);
      if (ben_weights) plan.settings.weights = std::make_shared<gcn::Weights>(gcn::load_weights(*ben_weights));

      const std::filesystem::path manifest_path(ben_manifest);
      const auto manifest = load_manifest(manifest_path);
      std::vector<Instance> instances;
      for (const auto& e : manifest.instances) {
        if (ben_split != "all" && ben_split != to_string(e.split)) continue;
        instances.push_back(load_instance(manifest_path.parent_path() / e.path));
      }
      const BenchOutcome result = run_bench(instances, plan);
      {
        std::ofstream csv(ben_output, std::ios::binary);
        if (!csv) throw Error("cannot write " + ben_output);
        write_csv(csv, result.records);
      }
      nlohmann::json provenance = {{"manifest", ben_manifest},
                                   {"methods", ben_methods},
                                   {"random_seeds", plan.random_seeds},
                                   {"seed", plan.seed},
                                   {"split", ben_split},
                                   {"instances", instances.size()},
                                   {"failures", result.failures}};
      if (wants_ig) {
        provenance["ig"] = {{"beta", plan.settings.ig.beta},
                            {"delta_max", plan.settings.ig.delta_max},
                            {"time_limit_ms", plan.settings.ig.time_limit.count()}};
      }
      if (ben_weights) provenance["weights"] = *ben_weights;
      write_text_file(ben_output + ".json", provenance.dump(2) + "\n");
      out << format_summary(aggregate(result.records));
      for (const auto& f : result.failures) err << "failed: " << f << '\n';
      return result.failures.empty() ? kOk : kFailure;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace mdskit::cli
