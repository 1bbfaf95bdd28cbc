#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdskit/error.hpp"
#include "mdskit/graph.hpp"
#include "mdskit/heuristics.hpp"
#include "mdskit/ig.hpp"

namespace mdskit {

/// Search limits. The time limit spans a whole call (including every
/// re-solve of an enumeration); the node limit applies per solve.
struct ExactBudget {
  std::optional<std::uint64_t> max_nodes;
  std::optional<std::chrono::milliseconds> time_limit;
};

struct ExactResult {
  int gamma = 0;
  VertexSet solution;
  std::uint64_t nodes_explored = 0;
  std::chrono::nanoseconds elapsed{0};
  bool optimal = true;
};

/// Thrown when a budget runs out. Carries the best incumbent (not proven optimal).
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, ExactResult incumbent)
      : Error(what), incumbent_(std::move(incumbent)) {
    incumbent_.optimal = false;
  }
  const ExactResult& incumbent() const { return incumbent_; }

 private:
  ExactResult incumbent_;
};

namespace detail {

/// Depth-first branch and bound for minimum dominating set.
///
/// Every node picks an undominated vertex u; some member of N[u] must be in
/// the solution, so the node branches on each non-excluded w in N[u]. After
/// the branch on w returns, w is excluded for the remaining siblings, which
/// makes the subtrees disjoint. Sets that contain a blocked set entirely are
/// cut as soon as the last member of the blocked set is added.
///
/// Nodes are pruned with a cover bound and a 2-packing bound first, then with
/// a Lagrangian bound whose multipliers carry over between nodes. The reduced
/// costs from that bound also exclude candidates outright, or force a single
/// child when every completion without it would be too large.
class DominationSearch {
 public:
  using Clock = std::chrono::steady_clock;

  DominationSearch(const Graph& g, std::optional<std::uint64_t> max_nodes, Clock::time_point deadline,
                   bool has_deadline)
      : g_(g),
        n_(g.order()),
        cover_(static_cast<std::size_t>(n_), 0),
        excluded_(static_cast<std::size_t>(n_), 0),
        in_set_(static_cast<std::size_t>(n_), 0),
        blocked_of_(static_cast<std::size_t>(n_)),
        scratch_(static_cast<std::size_t>(n_), 0),
        mark_(static_cast<std::size_t>(n_), 0),
        lambda_(static_cast<std::size_t>(n_), 0.0),
        reduced_(static_cast<std::size_t>(n_), 0.0),
        best_reduced_(static_cast<std::size_t>(n_), 0.0),
        subgradient_(static_cast<std::size_t>(n_), 0.0),
        undominated_(n_),
        max_nodes_(max_nodes),
        deadline_(deadline),
        has_deadline_(has_deadline) {}

  void block(const VertexSet& s) {
    const std::size_t id = blocked_size_.size();
    blocked_size_.push_back(static_cast<int>(s.size()));
    blocked_hits_.push_back(0);
    for (Vertex v : s.members()) blocked_of_[v].push_back(id);
  }

  /// Searches for a dominating set strictly smaller than `bound`, stopping
  /// as soon as one of size <= `good_enough` is found.
  std::optional<std::vector<Vertex>> run(int bound, int good_enough) {
    bound_ = bound;
    good_enough_ = good_enough;
    best_.reset();
    done_ = false;
    // Isolated vertices can only dominate themselves.
    for (Vertex v = 0; v < n_; ++v) {
      if (g_.degree(v) == 0 && !in_set_[v] && !push(v)) return std::nullopt;
    }
    search();
    return best_;
  }

  std::uint64_t nodes() const { return nodes_; }
  const std::optional<std::vector<Vertex>>& best() const { return best_; }

  struct Exhausted {};

 private:
  bool push(Vertex w) {
    in_set_[w] = 1;
    chosen_.push_back(w);
    auto cover = [&](Vertex x) {
      if (cover_[x]++ == 0) --undominated_;
    };
    cover(w);
    for (Vertex x : g_.neighbors(w)) cover(x);
    bool ok = true;
    for (std::size_t id : blocked_of_[w]) {
      if (++blocked_hits_[id] == blocked_size_[id]) ok = false;
    }
    return ok;
  }

  void pop() {
    const Vertex w = chosen_.back();
    chosen_.pop_back();
    in_set_[w] = 0;
    auto uncover = [&](Vertex x) {
      if (--cover_[x] == 0) ++undominated_;
    };
    uncover(w);
    for (Vertex x : g_.neighbors(w)) uncover(x);
    for (std::size_t id : blocked_of_[w]) --blocked_hits_[id];
  }

  void tick() {
    ++nodes_;
    if (max_nodes_ && nodes_ > *max_nodes_) throw Exhausted{};
    if (has_deadline_ && (nodes_ & 0x3ff) == 0 && Clock::now() > deadline_) throw Exhausted{};
  }

  int candidates_of(Vertex x) const {
    int c = excluded_[x] ? 0 : 1;
    for (Vertex y : g_.neighbors(x)) c += excluded_[y] ? 0 : 1;
    return c;
  }

  void search() {
    tick();
    const int size = static_cast<int>(chosen_.size());
    if (undominated_ == 0) {
      best_ = chosen_;
      bound_ = size;
      if (size <= good_enough_) done_ = true;
      return;
    }
    if (size + 1 >= bound_) return;

    const std::size_t excluded_mark = excluded_stack_.size();
    std::vector<std::pair<int, Vertex>> order;
    if (analyze(size, order)) {
      for (const auto& [gain, w] : order) {
        if (push(w)) search();
        pop();
        if (done_) break;
        exclude(w);
        if (static_cast<int>(chosen_.size()) + 1 >= bound_) break;
      }
    }
    while (excluded_stack_.size() > excluded_mark) {
      excluded_[excluded_stack_.back()] = 0;
      excluded_stack_.pop_back();
    }
  }

  void exclude(Vertex w) {
    excluded_[w] = 1;
    excluded_stack_.push_back(w);
  }

  /// Runs subgradient steps on the Lagrangian multipliers for the current
  /// node (undominated_list_, touched_ and gains in scratch_ must be set)
  /// and returns the best bound found; best_reduced_ holds the matching
  /// reduced costs. Stops early once the bound reaches `target`.
  double lagrangian_bound(int target) {
    auto dominators = [&](Vertex x, auto&& f) {
      if (!excluded_[x]) f(x);
      for (Vertex w : g_.neighbors(x))
        if (!excluded_[w]) f(w);
    };
    if (!lambda_ready_) {
      // Start from a feasible fractional packing: lambda_v = 1 / (largest
      // gain among v's dominators).
      for (Vertex x : undominated_list_) {
        int best_gain = 0;
        dominators(x, [&](Vertex w) { best_gain = std::max(best_gain, scratch_[w]); });
        lambda_[x] = 1.0 / best_gain;
      }
      lambda_ready_ = true;
    }
    const int steps = nodes_ == 1 ? 400 : 25;
    double mu = nodes_ == 1 ? 2.0 : 1.0;
    double best = -1.0;
    int stale = 0;
    for (int it = 0; it < steps; ++it) {
      for (Vertex y : touched_) reduced_[y] = 1.0;
      double bound = 0.0;
      for (Vertex x : undominated_list_) {
        bound += lambda_[x];
        dominators(x, [&](Vertex w) { reduced_[w] -= lambda_[x]; });
      }
      for (Vertex y : touched_) bound += std::min(0.0, reduced_[y]);
      if (bound > best + 1e-12) {
        best = bound;
        for (Vertex y : touched_) best_reduced_[y] = reduced_[y];
        stale = 0;
      } else if (++stale >= 4) {
        mu *= 0.5;
        stale = 0;
      }
      if (static_cast<int>(std::ceil(best - 1e-9)) >= target || mu < 1e-3) break;
      // Subgradient: 1 - (number of dominators with negative reduced cost).
      double norm = 0.0;
      for (Vertex x : undominated_list_) {
        int picked = 0;
        dominators(x, [&](Vertex w) { picked += reduced_[w] < 0.0 ? 1 : 0; });
        subgradient_[x] = 1.0 - picked;
        norm += subgradient_[x] * subgradient_[x];
      }
      if (norm == 0.0) break;
      const double step = mu * (static_cast<double>(target) + 0.5 - bound) / norm;
      for (Vertex x : undominated_list_) lambda_[x] = std::max(0.0, lambda_[x] + step * subgradient_[x]);
    }
    return best;
  }

  /// Bounds the current node. Returns false if it can be cut; otherwise
  /// fills `order` with the children (eligible members of N[u] for the
  /// undominated u with fewest eligible dominators), largest gain first.
  /// Vertices that no completion below the bound can contain are excluded
  /// here; the caller restores them.
  bool analyze(int size, std::vector<std::pair<int, Vertex>>& order) {
    for (;;) {
      Vertex branch = -1;
      int branch_choices = 0;
      touched_.clear();
      undominated_list_.clear();
      auto touch = [&](Vertex y) {
        if (excluded_[y]) return;
        if (scratch_[y]++ == 0) touched_.push_back(y);
      };
      auto reset = [&] {
        for (Vertex y : touched_) scratch_[y] = 0;
      };
      for (Vertex x = 0; x < n_; ++x) {
        if (cover_[x] != 0) continue;
        undominated_list_.push_back(x);
        const int c = candidates_of(x);
        if (c == 0) {
          reset();
          return false;
        }
        if (branch < 0 || c < branch_choices) {
          branch = x;
          branch_choices = c;
        }
        touch(x);
        for (Vertex y : g_.neighbors(x)) touch(y);
      }
      // scratch_[y] now holds the gain of every eligible vertex y.

      // Fewest vertices whose largest gains add up to the undominated count.
      gains_.clear();
      for (Vertex y : touched_) gains_.push_back(scratch_[y]);
      std::sort(gains_.begin(), gains_.end(), std::greater<>());
      int lb_cover = 0;
      for (int sum = 0; sum < undominated_ && lb_cover < static_cast<int>(gains_.size()); ++lb_cover) {
        sum += gains_[static_cast<std::size_t>(lb_cover)];
      }
      // Undominated vertices with pairwise disjoint eligible dominators.
      int lb_packing = 0;
      marked_.clear();
      for (Vertex x : undominated_list_) {
        bool free = !(!excluded_[x] && mark_[x]);
        for (Vertex y : g_.neighbors(x)) {
          if (!free) break;
          free = !(!excluded_[y] && mark_[y]);
        }
        if (!free) continue;
        ++lb_packing;
        auto mark = [&](Vertex y) {
          if (!excluded_[y] && !mark_[y]) {
            mark_[y] = 1;
            marked_.push_back(y);
          }
        };
        mark(x);
        for (Vertex y : g_.neighbors(x)) mark(y);
      }
      for (Vertex y : marked_) mark_[y] = 0;
      if (size + std::max(lb_cover, lb_packing) >= bound_) {
        reset();
        return false;
      }

      // Lagrangian bound. For multipliers lambda_v >= 0 on the undominated
      // vertices and reduced costs r_w = 1 - sum of lambda over N[w],
      //   L = sum(lambda) + sum over eligible w of min(0, r_w)
      // lower-bounds every completion, and L + max(0, r_w) bounds those that
      // contain w. Multipliers persist between nodes and are refined with a
      // few subgradient steps here.
      const int room = bound_ - size;  // completions must stay below this
      const double best = lagrangian_bound(room);
      if (static_cast<int>(std::ceil(best - 1e-9)) >= room) {
        reset();
        return false;
      }
      Vertex forced = -1;
      bool fixed = false;
      for (Vertex y : touched_) {
        const double r = best_reduced_[y];
        if (static_cast<int>(std::ceil(best + std::max(0.0, r) - 1e-9)) >= room) {
          exclude(y);
          fixed = true;
        } else if (forced < 0 && static_cast<int>(std::ceil(best + std::max(0.0, -r) - 1e-9)) >= room) {
          forced = y;  // every completion below the bound contains y
        }
      }
      if (fixed) {
        reset();
        continue;
      }
      if (forced >= 0) {
        order.assign(1, {scratch_[forced], forced});
        reset();
        return true;
      }

      order.clear();
      auto consider = [&](Vertex w) {
        if (!excluded_[w]) order.emplace_back(scratch_[w], w);
      };
      consider(branch);
      for (Vertex w : g_.neighbors(branch)) consider(w);
      reset();
      std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
      });
      return true;
    }
  }

  const Graph& g_;
  int n_;
  std::vector<int> cover_;
  std::vector<char> excluded_;
  std::vector<char> in_set_;
  std::vector<std::vector<std::size_t>> blocked_of_;
  std::vector<int> blocked_size_;
  std::vector<int> blocked_hits_;
  std::vector<Vertex> chosen_;
  std::vector<Vertex> excluded_stack_;
  std::vector<int> scratch_;
  std::vector<char> mark_;
  std::vector<Vertex> touched_;
  std::vector<Vertex> marked_;
  std::vector<Vertex> undominated_list_;
  std::vector<int> gains_;
  std::vector<double> lambda_;
  std::vector<double> reduced_;
  std::vector<double> best_reduced_;
  std::vector<double> subgradient_;
  bool lambda_ready_ = false;
  int undominated_;
  int bound_ = 0;
  int good_enough_ = 0;
  bool done_ = false;
  std::optional<std::vector<Vertex>> best_;
  std::uint64_t nodes_ = 0;
  std::optional<std::uint64_t> max_nodes_;
  Clock::time_point deadline_;
  bool has_deadline_;
};

inline int root_lower_bound(const Graph& g) {
  const int n = g.order();
  if (n == 0) return 0;
  const int delta = graph_stats(g).max_degree;
  return (n + delta) / (delta + 1);
}

struct Deadline {
  DominationSearch::Clock::time_point at{};
  bool active = false;
};

inline Deadline make_deadline(const ExactBudget& budget) {
  Deadline d;
  if (budget.time_limit) {
    d.at = DominationSearch::Clock::now() + *budget.time_limit;
    d.active = true;
  }
  return d;
}

inline VertexSet to_set(int n, const std::vector<Vertex>& members) {
  std::vector<Vertex> sorted = members;
  std::sort(sorted.begin(), sorted.end());
  return VertexSet(n, sorted);
}

inline ExactResult solve_with_deadline(const Graph& g, const ExactBudget& budget, const Deadline& deadline) {
  const auto start = DominationSearch::Clock::now();
  const int n = g.order();
  if (n < 1) throw std::invalid_argument("solve_exact: graph must have at least one vertex");

  // A short iterated-greedy run seeds the incumbent.
  IgConfig warm;
  warm.delta_max = 50;
  warm.time_limit = std::chrono::milliseconds(2000);
  if (budget.time_limit) warm.time_limit = std::clamp(*budget.time_limit / 10, std::chrono::milliseconds(1), warm.time_limit);
  const VertexSet incumbent = run_ig(g, warm).best;
  ExactResult result;
  result.gamma = static_cast<int>(incumbent.size());
  result.solution = to_set(n, std::vector<Vertex>(incumbent.members().begin(), incumbent.members().end()));

  DominationSearch search(g, budget.max_nodes, deadline.at, deadline.active);
  try {
    const int lb = root_lower_bound(g);
    if (result.gamma > lb) {
      if (auto found = search.run(result.gamma, lb)) {
        result.gamma = static_cast<int>(found->size());
        result.solution = to_set(n, *found);
      }
    }
  } catch (const DominationSearch::Exhausted&) {
    if (const auto& found = search.best()) {
      result.gamma = static_cast<int>(found->size());
      result.solution = to_set(n, *found);
    }
    result.nodes_explored = search.nodes();
    result.elapsed = DominationSearch::Clock::now() - start;
    throw BudgetExceeded("exact solve exceeded its budget", std::move(result));
  }
  result.nodes_explored = search.nodes();
  result.elapsed = DominationSearch::Clock::now() - start;
  return result;
}

}  // namespace detail

/// Minimum dominating set by branch and bound. Throws BudgetExceeded with
/// the incumbent when a budget is exhausted.
inline ExactResult solve_exact(const Graph& g, const ExactBudget& budget = {}) {
  return detail::solve_with_deadline(g, budget, detail::make_deadline(budget));
}

/// Up to `max_solutions` distinct minimum dominating sets, each sorted
/// ascending. After each optimum is found it is added as a blocked set and
/// the search is repeated with the size capped at gamma; enumeration stops
/// when the capped search comes back empty.
inline std::vector<VertexSet> enumerate_optima(const Graph& g, std::size_t max_solutions,
                                               const ExactBudget& budget = {}) {
  if (max_solutions < 1) throw std::invalid_argument("enumerate_optima: max_solutions must be >= 1");
  const auto deadline = detail::make_deadline(budget);
  const ExactResult first = detail::solve_with_deadline(g, budget, deadline);
  std::vector<VertexSet> found{first.solution};
  const int gamma = first.gamma;
  while (found.size() < max_solutions) {
    detail::DominationSearch search(g, budget.max_nodes, deadline.at, deadline.active);
    for (const auto& s : found) search.block(s);
    std::optional<std::vector<Vertex>> next;
    try {
      next = search.run(gamma + 1, gamma);
    } catch (const detail::DominationSearch::Exhausted&) {
      ExactResult partial = first;
      partial.nodes_explored = search.nodes();
      throw BudgetExceeded("optimum enumeration exceeded its budget after " + std::to_string(found.size()) +
                               " solutions",
                           std::move(partial));
    }
    if (!next) break;
    found.push_back(detail::to_set(g.order(), *next));
  }
  return found;
}

/// Exhaustive search in increasing cardinality. Test oracle; n <= 25.
inline int brute_force_gamma(const Graph& g) {
  const int n = g.order();
  if (n > 25) throw std::invalid_argument("brute_force_gamma: n=" + std::to_string(n) + " exceeds limit of 25");
  if (n == 0) return 0;
  std::vector<std::uint32_t> closed(static_cast<std::size_t>(n));
  for (Vertex v = 0; v < n; ++v) {
    closed[v] = 1U << v;
    for (Vertex w : g.neighbors(v)) closed[v] |= 1U << w;
  }
  const std::uint32_t full = (1U << n) - 1U;
  for (int k = 1; k <= n; ++k) {
    // Gosper's hack walks every n-bit mask with k bits set in increasing order.
    for (std::uint32_t mask = (1U << k) - 1U; mask <= full;) {
      std::uint32_t covered = 0;
      for (std::uint32_t rest = mask; rest != 0; rest &= rest - 1) covered |= closed[std::countr_zero(rest)];
      if (covered == full) return k;
      const std::uint32_t low = mask & (~mask + 1U);
      const std::uint32_t ripple = mask + low;
      mask = (((ripple ^ mask) >> 2) / low) | ripple;
    }
  }
  return n;
}

}  // namespace mdskit
