#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sentcomp/binary_lp.hpp"
#include "sentcomp/dc_solver.hpp"
#include "sentcomp/error.hpp"
#include "sentcomp/lp_simplex.hpp"
#include "sentcomp/solver_stats.hpp"

namespace sentcomp {

struct BnbNode {
  std::vector<VarFix> fixes;
  double parent_bound = -std::numeric_limits<double>::infinity();
  std::size_t depth = 0;
  std::size_t id = 0;  // creation order

  bool consistent() const {
    for (std::size_t a = 0; a < fixes.size(); ++a)
      for (std::size_t b = a + 1; b < fixes.size(); ++b)
        if (fixes[a].var == fixes[b].var && fixes[a].value != fixes[b].value) return false;
    return true;
  }
};

struct Incumbent {
  std::optional<std::vector<double>> x;
  double value = std::numeric_limits<double>::infinity();

  bool present() const { return x.has_value(); }
};

enum class NodeSelect { best_bound, depth_first };
enum class BranchRule { closest_to_half, max_infeasibility, max_cost };
enum class SolveStatus { optimal, infeasible };

inline const char* to_string(SolveStatus s) { return s == SolveStatus::optimal ? "optimal" : "infeasible"; }

inline NodeSelect parse_node_select(const std::string& s) {
  if (s == "best" || s == "best_bound") return NodeSelect::best_bound;
  if (s == "depth" || s == "depth_first") return NodeSelect::depth_first;
  throw ConfigError("unknown node selection '" + s + "' (expected best or depth)");
}

inline BranchRule parse_branch_rule(const std::string& s) {
  if (s == "half" || s == "closest_to_half") return BranchRule::closest_to_half;
  if (s == "infeas" || s == "max_infeasibility") return BranchRule::max_infeasibility;
  if (s == "cost" || s == "max_cost") return BranchRule::max_cost;
  throw ConfigError("unknown branching rule '" + s + "' (expected half, infeas or cost)");
}

struct SolverConfig {
  std::size_t workers = 1;
  std::optional<double> eps3;  // unset: 1e-2 (1 + |f_opt|)
  double eps4 = 1e-5;
  NodeSelect node_select = NodeSelect::best_bound;
  BranchRule branching = BranchRule::closest_to_half;
  std::uint64_t seed = 1;
  DcaConfig dca;
  bool keep_log = false;

  void validate() const {
    if (workers < 1) throw ConfigError("worker count must be at least 1");
    if (!(eps4 > 0.0)) throw ConfigError("eps4 must be positive");
    if (eps3 && *eps3 < eps4) throw ConfigError("eps3 must not be smaller than eps4");
    dca.validate();
  }

  double restart_gap(double f_opt) const {
    if (eps3) return *eps3;
    return std::max(eps4, 1e-2 * (1.0 + (std::isfinite(f_opt) ? std::abs(f_opt) : 0.0)));
  }
};

enum class NodeAction { prune, incumbent, restart, branch };

inline const char* to_string(NodeAction a) {
  switch (a) {
    case NodeAction::prune: return "prune";
    case NodeAction::incumbent: return "incumbent";
    case NodeAction::restart: return "restart";
    case NodeAction::branch: return "branch";
  }
  return "?";
}

struct NodeLogEntry {
  std::size_t id;
  std::size_t depth;
  double bound;  // l(P_i), +inf when infeasible
  NodeAction action;
};

inline void write_node_log(std::ostream& out, const std::vector<NodeLogEntry>& log) {
  out << "node,depth,bound,action\n";
  for (const auto& e : log) out << e.id << ',' << e.depth << ',' << e.bound << ',' << to_string(e.action) << '\n';
}

struct SolveResult {
  Incumbent incumbent;
  SolveStatus status = SolveStatus::infeasible;
  SolverStats stats;
  double lower_bound = std::numeric_limits<double>::infinity();
  std::vector<NodeLogEntry> log;
  std::vector<double> incumbent_history;  // successive incumbent values
};

/// Called once per loop round with (lower bound over open nodes and the
/// incumbent, incumbent value).
using SandwichObserver = std::function<void(double lower, double upper)>;

/// Removes and returns up to s nodes: smallest parent bound first (ties to
/// the older node), or most recently created first.
inline std::vector<BnbNode> select_nodes(std::vector<BnbNode>& open, NodeSelect rule, std::size_t s) {
  std::vector<std::size_t> order(open.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (rule == NodeSelect::best_bound) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (open[a].parent_bound != open[b].parent_bound) return open[a].parent_bound < open[b].parent_bound;
      return open[a].id < open[b].id;
    });
  } else {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return open[a].id > open[b].id; });
  }
  order.resize(std::min(s, order.size()));
  std::vector<BnbNode> picked;
  std::vector<bool> taken(open.size(), false);
  for (std::size_t i : order) {
    picked.push_back(open[i]);
    taken[i] = true;
  }
  std::vector<BnbNode> rest;
  for (std::size_t i = 0; i < open.size(); ++i)
    if (!taken[i]) rest.push_back(std::move(open[i]));
  open = std::move(rest);
  return picked;
}

inline bool is_fractional(double v, double tol = kBinaryTolerance) { return std::min(std::abs(v), std::abs(1.0 - v)) > tol; }

/// Picks the branching variable among fractional masked coordinates; ties go
/// to the smallest index.
inline std::size_t branching_index(const std::vector<double>& x, const std::vector<bool>& mask, BranchRule rule,
                                   const std::vector<double>& c) {
  std::size_t best = x.size();
  double best_score = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!mask[j] || !is_fractional(x[j])) continue;
    double score = 0.0;
    switch (rule) {
      case BranchRule::closest_to_half: score = -std::abs(x[j] - 0.5); break;
      case BranchRule::max_infeasibility: score = std::min(x[j], 1.0 - x[j]); break;
      case BranchRule::max_cost: score = std::abs(c[j]); break;
    }
    if (best == x.size() || score > best_score) {
      best = j;
      best_score = score;
    }
  }
  if (best == x.size()) throw InternalError("branching requested on a solution without fractional coordinates");
  return best;
}

/// Children fixing the chosen coordinate to 0 and to 1. Ids are left to the caller.
inline std::pair<BnbNode, BnbNode> branch(const BnbNode& node, const std::vector<double>& x, const std::vector<bool>& mask,
                                          BranchRule rule, const std::vector<double>& c, double node_bound) {
  const std::size_t j = branching_index(x, mask, rule, c);
  BnbNode zero = node, one = node;
  zero.fixes.push_back({j, 0.0});
  one.fixes.push_back({j, 1.0});
  zero.parent_bound = one.parent_bound = node_bound;
  zero.depth = one.depth = node.depth + 1;
  return {std::move(zero), std::move(one)};
}

/// Incumbent shared by the workers; updates only on strict improvement.
class SharedIncumbent {
 public:
  Incumbent snapshot() const {
    std::lock_guard<std::mutex> lock(mu_);
    return inc_;
  }
  double value() const {
    std::lock_guard<std::mutex> lock(mu_);
    return inc_.value;
  }
  bool offer(const BinaryLinearProgram& bp, const std::vector<double>& x) {
    auto snapped = snap_binary(bp, x);
    const double v = bp.objective(snapped);
    std::lock_guard<std::mutex> lock(mu_);
    if (v < inc_.value) {
      inc_.x = std::move(snapped);
      inc_.value = v;
      history_.push_back(v);
      return true;
    }
    return false;
  }
  std::vector<double> history() const {
    std::lock_guard<std::mutex> lock(mu_);
    return history_;
  }

 private:
  mutable std::mutex mu_;
  Incumbent inc_;
  std::vector<double> history_;
};

inline const std::string kApproximateSubproblem = "p3 subproblem stopped at its iteration cap";

struct NodeOutcome {
  std::vector<BnbNode> children;
  std::vector<NodeLogEntry> log;
  SolverStats stats;
  double bound = std::numeric_limits<double>::infinity();
};

/// Bound, restart and branch for one node.
inline NodeOutcome process_node(const BnbNode& node, const BinaryLinearProgram& bp, const SolverConfig& cfg,
                                SharedIncumbent& incumbent) {
  NodeOutcome out;
  ++out.stats.nodes;
  auto note = [&](NodeAction a) { out.log.push_back({node.id, node.depth, out.bound, a}); };
  auto sol = solve_lp(bp, LpRequest{nullptr, &node.fixes, nullptr});
  ++out.stats.lp_solves;
  if (sol.status != LpStatus::optimal) {
    ++out.stats.pruned;
    note(NodeAction::prune);
    return out;
  }
  out.bound = sol.value;
  double f_opt = incumbent.value();
  if (sol.value >= f_opt) {
    ++out.stats.pruned;
    note(NodeAction::prune);
    return out;
  }
  if (in_feasible_set(bp, sol.x)) {
    if (incumbent.offer(bp, sol.x)) ++out.stats.incumbent_updates;
    note(NodeAction::incumbent);
    return out;
  }
  if (f_opt - sol.value > cfg.restart_gap(f_opt)) {
    auto d = dca(bp, cfg.dca, sol.x, &node.fixes);
    ++out.stats.dca_runs;
    ++out.stats.dca_restarts;
    out.stats.lp_solves += d.lp_solves;
    if (d.binary_feasible && incumbent.offer(bp, d.x)) ++out.stats.incumbent_updates;
    if (d.approximate) out.stats.warnings.push_back(kApproximateSubproblem);
    note(NodeAction::restart);
    f_opt = incumbent.value();
  }
  if (f_opt - sol.value > cfg.eps4) {
    auto [zero, one] = branch(node, sol.x, bp.binary_mask, cfg.branching, bp.c, sol.value);
    out.children.push_back(std::move(zero));
    out.children.push_back(std::move(one));
    ++out.stats.branched;
    note(NodeAction::branch);
  } else {
    ++out.stats.pruned;
    note(NodeAction::prune);
  }
  return out;
}

namespace detail {

inline void add_warning(SolverStats& st, const std::string& w) {
  if (std::find(st.warnings.begin(), st.warnings.end(), w) == st.warnings.end()) st.warnings.push_back(w);
}

inline void merge_stats(SolverStats& into, const SolverStats& from) {
  into.nodes += from.nodes;
  into.branched += from.branched;
  into.pruned += from.pruned;
  into.dca_runs += from.dca_runs;
  into.dca_restarts += from.dca_restarts;
  into.lp_solves += from.lp_solves;
  into.incumbent_updates += from.incumbent_updates;
  for (const auto& w : from.warnings) add_warning(into, w);
}

// Runs fn(i) for i < count on up to `workers` threads; the first exception wins.
template <class Fn>
void run_parallel(std::size_t count, std::size_t workers, Fn&& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < count; ++i)
    threads.emplace_back([&, i] {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  for (auto& th : threads) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// Global minimisation of a binary linear program.
inline SolveResult solve(const BinaryLinearProgram& bp, const SolverConfig& cfg, const SandwichObserver& observer = {}) {
  bp.validate();
  cfg.validate();
  const auto t_begin = std::chrono::steady_clock::now();
  SolveResult res;
  SharedIncumbent incumbent;
  auto finish = [&](SolveStatus st) {
    res.incumbent = incumbent.snapshot();
    res.incumbent_history = incumbent.history();
    res.status = st;
    res.stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return res;
  };

  // Root block.
  auto root = solve_lp(bp);
  ++res.stats.lp_solves;
  ++res.stats.nodes;
  if (root.status != LpStatus::optimal) {
    res.log.push_back({0, 0, std::numeric_limits<double>::infinity(), NodeAction::prune});
    return finish(SolveStatus::infeasible);
  }
  if (in_feasible_set(bp, root.x)) {
    incumbent.offer(bp, root.x);
    ++res.stats.incumbent_updates;
    res.lower_bound = root.value;
    res.log.push_back({0, 0, root.value, NodeAction::incumbent});
    return finish(SolveStatus::optimal);
  }
  {
    const std::size_t n = bp.num_vars();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<double>> starts(cfg.workers, std::vector<double>(n));
    for (auto& s : starts)
      for (std::size_t j = 0; j < n; ++j) s[j] = bp.lb[j] + unit(rng) * (bp.ub[j] - bp.lb[j]);
    std::vector<DcaResult> runs(cfg.workers);
    detail::run_parallel(cfg.workers, cfg.workers, [&](std::size_t i) { runs[i] = dca(bp, cfg.dca, starts[i]); });
    for (const auto& r : runs) {
      ++res.stats.dca_runs;
      res.stats.lp_solves += r.lp_solves;
      if (r.binary_feasible && incumbent.offer(bp, r.x)) ++res.stats.incumbent_updates;
      if (r.approximate) detail::add_warning(res.stats, kApproximateSubproblem);
    }
  }
  std::size_t next_id = 1;
  std::vector<BnbNode> open;
  if (incumbent.value() - root.value <= cfg.eps4) {
    res.lower_bound = root.value;
    res.log.push_back({0, 0, root.value, NodeAction::prune});
    return finish(SolveStatus::optimal);
  }
  {
    auto [zero, one] = branch(BnbNode{}, root.x, bp.binary_mask, cfg.branching, bp.c, root.value);
    zero.id = next_id++;
    one.id = next_id++;
    open.push_back(std::move(zero));
    open.push_back(std::move(one));
    ++res.stats.branched;
    res.log.push_back({0, 0, root.value, NodeAction::branch});
  }

  // Node block: synchronous rounds of up to s nodes.
  while (!open.empty()) {
    if (observer) {
      double lower = incumbent.value();
      for (const auto& nd : open) lower = std::min(lower, nd.parent_bound);
      observer(lower, incumbent.value());
    }
    auto batch = select_nodes(open, cfg.node_select, cfg.workers);
    std::vector<NodeOutcome> outcomes(batch.size());
    detail::run_parallel(batch.size(), cfg.workers,
                         [&](std::size_t i) { outcomes[i] = process_node(batch[i], bp, cfg, incumbent); });
    for (auto& o : outcomes) {
      detail::merge_stats(res.stats, o.stats);
      if (cfg.keep_log) res.log.insert(res.log.end(), o.log.begin(), o.log.end());
      for (auto& child : o.children) {
        child.id = next_id++;
        open.push_back(std::move(child));
      }
    }
  }
  const auto inc = incumbent.snapshot();
  if (!inc.present()) return finish(SolveStatus::infeasible);
  res.lower_bound = inc.value;
  return finish(SolveStatus::optimal);
}

}  // namespace sentcomp
