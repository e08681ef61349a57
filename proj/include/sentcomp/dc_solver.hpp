#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sentcomp/binary_lp.hpp"
#include "sentcomp/error.hpp"
#include "sentcomp/lp_simplex.hpp"

namespace sentcomp {

enum class PenaltyKind { p1, p2, p3 };

inline const char* to_string(PenaltyKind k) {
  switch (k) {
    case PenaltyKind::p1: return "p1";
    case PenaltyKind::p2: return "p2";
    case PenaltyKind::p3: return "p3";
  }
  return "?";
}

inline PenaltyKind parse_penalty(const std::string& s) {
  if (s == "p1") return PenaltyKind::p1;
  if (s == "p2") return PenaltyKind::p2;
  if (s == "p3") return PenaltyKind::p3;
  throw ConfigError("unknown penalty '" + s + "' (expected p1, p2 or p3)");
}

inline double penalty_term(PenaltyKind kind, double v) {
  switch (kind) {
    case PenaltyKind::p1: return std::min(v, 1.0 - v);
    case PenaltyKind::p2: return v * (1.0 - v);
    case PenaltyKind::p3: {
      const double s = std::sin(std::numbers::pi * v);
      return s * s;
    }
  }
  return 0.0;
}

/// Sum of the kind's term over the masked coordinates.
inline double penalty_value(PenaltyKind kind, const std::vector<double>& x, const std::vector<bool>& mask) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (mask[j]) s += penalty_term(kind, x[j]);
  return s;
}

/// One element u of the subdifferential of the concave part's negation.
inline double subgrad_term(PenaltyKind kind, double v) {
  switch (kind) {
    case PenaltyKind::p1: return v >= 0.5 ? 1.0 : -1.0;
    case PenaltyKind::p2: return 2.0 * v - 1.0;
    case PenaltyKind::p3: {
      constexpr double pi = std::numbers::pi;
      return 2.0 * pi * pi * v - pi * std::sin(2.0 * pi * v);
    }
  }
  return 0.0;
}

/// y = -c + t u, with u zero off the mask.
inline std::vector<double> subgrad_h(PenaltyKind kind, const std::vector<double>& x, double t,
                                     const std::vector<double>& c, const std::vector<bool>& mask) {
  std::vector<double> y(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) y[j] = -c[j] + (mask[j] ? t * subgrad_term(kind, x[j]) : 0.0);
  return y;
}

/// F^t(x) = c^T x + t p(x).
inline double penalized_objective(const BinaryLinearProgram& bp, PenaltyKind kind, double t, const std::vector<double>& x) {
  return bp.objective(x) + t * penalty_value(kind, x, bp.binary_mask);
}

struct DcaConfig {
  double t = 1e5;
  double eps1 = 1e-6;
  double eps2 = 1e-8;
  std::size_t max_iters = 200;
  PenaltyKind penalty = PenaltyKind::p2;
  bool increase_t = false;  // x10 while p(x*) > 1e-6, up to t_max
  double t_max = 1e8;
  double fw_gap = 1e-7;     // p3 only
  std::size_t fw_max_iters = 100;

  void validate() const {
    if (!(t > 0.0)) throw ConfigError("penalty weight t must be positive");
    if (!(eps1 > 0.0) || !(eps2 > 0.0)) throw ConfigError("DCA tolerances must be positive");
    if (max_iters == 0) throw ConfigError("DCA needs at least one iteration");
  }
};

struct DcaStep {
  std::size_t iteration;
  double value;    // F^t
  double penalty;  // p(x)
};

struct DcaResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  double t = 0.0;  // weight in force at the end
  std::size_t iterations = 0;
  std::size_t lp_solves = 0;
  std::vector<DcaStep> trajectory;  // iterates in K under the final t
  bool binary_feasible = false;
  bool converged = false;           // stopped by a tolerance rather than the cap
  bool approximate = false;         // p3 subproblem stopped at the iteration cap

  std::vector<double> trajectory_values() const {
    std::vector<double> v;
    for (const auto& s : trajectory) v.push_back(s.value);
    return v;
  }
};

inline void write_trajectory_csv(std::ostream& out, const DcaResult& r) {
  out << "iteration,F,penalty\n";
  for (const auto& s : r.trajectory) out << s.iteration << ',' << s.value << ',' << s.penalty << '\n';
}

namespace detail {

inline double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s);
}

// min w ||x_mask||^2 - y.x over K by conditional gradient.
struct FrankWolfeOutcome {
  std::vector<double> x;
  std::size_t lp_solves = 0;
  bool capped = false;
};

inline FrankWolfeOutcome frank_wolfe(const BinaryLinearProgram& bp, const std::vector<VarFix>* fixes, double w,
                                     const std::vector<double>& y, const std::vector<double>& start,
                                     const DcaConfig& cfg, LpBasis& basis) {
  const std::size_t n = bp.num_vars();
  auto grad = [&](const std::vector<double>& x) {
    std::vector<double> g(n);
    for (std::size_t j = 0; j < n; ++j) g[j] = (bp.binary_mask[j] ? 2.0 * w * x[j] : 0.0) - y[j];
    return g;
  };
  FrankWolfeOutcome out;
  auto oracle = [&](const std::vector<double>& g) {
    LpRequest req{&g, fixes, basis.empty() ? nullptr : &basis};
    auto sol = solve_lp(bp, req);
    ++out.lp_solves;
    if (sol.status != LpStatus::optimal) throw InfeasibleError("constraint polytope is empty");
    basis = sol.basis;
    return sol.x;
  };
  std::vector<double> x = start;
  // A start outside K is replaced by the oracle's vertex for its gradient.
  bool in_k = within_bounds(bp, x) && rows_satisfied(bp, x);
  if (fixes)
    for (const auto& f : *fixes) in_k = in_k && std::abs(x[f.var] - f.value) <= 1e-9;
  if (!in_k) x = oracle(grad(x));
  for (std::size_t it = 0; it < cfg.fw_max_iters; ++it) {
    const auto g = grad(x);
    const auto s = oracle(g);
    double gap = 0.0, curv = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = s[j] - x[j];
      gap -= g[j] * d;
      if (bp.binary_mask[j]) curv += d * d;
    }
    if (gap <= cfg.fw_gap) {
      out.x = x;
      return out;
    }
    double step = curv > 0.0 ? gap / (2.0 * w * curv) : 1.0;
    step = std::clamp(step, 0.0, 1.0);
    for (std::size_t j = 0; j < n; ++j) x[j] += step * (s[j] - x[j]);
  }
  out.x = x;
  out.capped = true;
  return out;
}

}  // namespace detail

/// DCA on F^t over K (rows and bounds of bp plus optional fixings), from x0.
inline DcaResult dca(const BinaryLinearProgram& bp, const DcaConfig& cfg, const std::vector<double>& x0,
                     const std::vector<VarFix>* fixes = nullptr) {
  cfg.validate();
  const std::size_t n = bp.num_vars();
  if (x0.size() != n) throw ConfigError("start point has the wrong length");
  DcaResult res;
  double t = cfg.t;
  std::vector<double> x = x0;
  LpBasis basis;
  constexpr double pi = std::numbers::pi;

  for (;;) {
    res.trajectory.clear();
    bool in_k = false;
    double fx = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cfg.max_iters; ++k) {
      const auto y = subgrad_h(cfg.penalty, x, t, bp.c, bp.binary_mask);
      std::vector<double> next;
      if (cfg.penalty == PenaltyKind::p3) {
        auto fw = detail::frank_wolfe(bp, fixes, t * pi * pi, y, x, cfg, basis);
        res.lp_solves += fw.lp_solves;
        res.approximate = res.approximate || fw.capped;
        next = std::move(fw.x);
      } else {
        std::vector<double> obj(n);
        for (std::size_t j = 0; j < n; ++j) obj[j] = -y[j];
        LpRequest req{&obj, fixes, basis.empty() ? nullptr : &basis};
        auto sol = solve_lp(bp, req);
        ++res.lp_solves;
        if (sol.status != LpStatus::optimal) throw InfeasibleError("constraint polytope is empty");
        basis = std::move(sol.basis);
        next = std::move(sol.x);
      }
      ++res.iterations;
      const double fnext = penalized_objective(bp, cfg.penalty, t, next);
      // x0 need not lie in K, so only the iterates enter the trajectory.
      res.trajectory.push_back({res.iterations, fnext, penalty_value(cfg.penalty, next, bp.binary_mask)});
      const double step = detail::distance(next, x);
      const bool small_change = in_k && std::abs(fnext - fx) <= cfg.eps2;
      x = std::move(next);
      fx = fnext;
      in_k = true;
      if (step <= cfg.eps1 || small_change) {
        res.converged = true;
        break;
      }
    }
    const double p = penalty_value(cfg.penalty, x, bp.binary_mask);
    if (cfg.increase_t && p > 1e-6 && t * 10.0 <= cfg.t_max) {
      t *= 10.0;
      continue;
    }
    break;
  }
  res.x = x;
  res.t = t;
  res.value = penalized_objective(bp, cfg.penalty, t, x);
  res.binary_feasible = in_feasible_set(bp, x);
  return res;
}

// Vertex enumeration of K for tiny instances.
struct VertexEnumOptions {
  std::size_t max_vars = 12;
};

namespace detail {

// Solves the k x k system in place; false when singular.
inline bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& out) {
  const std::size_t k = b.size();
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < k; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-10) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c2 = col; c2 < k; ++c2) a[r][c2] -= f * a[col][c2];
      b[r] -= f * b[col];
    }
  }
  out.resize(k);
  for (std::size_t r = 0; r < k; ++r) out[r] = b[r] / a[r][r];
  return true;
}

}  // namespace detail

/// Every vertex of {x in bounds : rows}. A vertex is a feasible point where
/// the variables strictly between their bounds are determined by as many
/// linearly independent rows held with equality.
inline std::vector<std::vector<double>> enumerate_vertices(const BinaryLinearProgram& bp, VertexEnumOptions opt = {}) {
  bp.validate();
  const std::size_t n = bp.num_vars();
  const std::size_t m = bp.rows.size();
  if (n > opt.max_vars) throw ConfigError("vertex enumeration refused: more than " + std::to_string(opt.max_vars) + " variables");
  std::vector<std::vector<double>> out;
  auto known = [&](const std::vector<double>& v) {
    return std::any_of(out.begin(), out.end(), [&](const auto& w) { return detail::distance(v, w) < 1e-9; });
  };
  std::vector<int> state(n, 0);  // 0 lower, 1 upper, 2 determined by rows
  for (;;) {
    std::vector<std::size_t> free_vars;
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (state[j] == 2) free_vars.push_back(j);
      else x[j] = state[j] == 0 ? bp.lb[j] : bp.ub[j];
    }
    const std::size_t k = free_vars.size();
    if (k <= m) {
      // Every k-subset of rows as the active set.
      std::vector<std::size_t> pick(k);
      for (std::size_t i = 0; i < k; ++i) pick[i] = i;
      for (;;) {
        std::vector<std::vector<double>> a(k, std::vector<double>(k, 0.0));
        std::vector<double> b(k, 0.0);
        for (std::size_t r = 0; r < k; ++r) {
          const auto& row = bp.rows[pick[r]];
          b[r] = row.rhs;
          for (const auto& term : row.terms) {
            const auto it = std::find(free_vars.begin(), free_vars.end(), term.var);
            if (it != free_vars.end()) a[r][static_cast<std::size_t>(it - free_vars.begin())] += term.coef;
            else b[r] -= term.coef * x[term.var];
          }
        }
        std::vector<double> sol;
        if (k == 0 || detail::solve_dense(a, b, sol)) {
          auto cand = x;
          for (std::size_t i = 0; i < k; ++i) cand[free_vars[i]] = sol[i];
          if (within_bounds(bp, cand, 1e-9) && rows_satisfied(bp, cand, 1e-9)) {
            for (std::size_t j = 0; j < n; ++j) cand[j] = std::clamp(cand[j], bp.lb[j], bp.ub[j]);
            if (!known(cand)) out.push_back(cand);
          }
        }
        // Next combination.
        if (k == 0) break;
        std::size_t i = k;
        while (i > 0 && pick[i - 1] == m - k + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t r = i; r < k; ++r) pick[r] = pick[r - 1] + 1;
      }
    }
    // Next state vector in base 3.
    std::size_t j = 0;
    while (j < n && state[j] == 2) state[j++] = 0;
    if (j == n) break;
    ++state[j];
  }
  return out;
}

/// Diagnostic estimate of the exact-penalty threshold
/// t0 = (min{c.x : x in S} - alpha0) / m.
struct PenaltyThresholdReport {
  double alpha0 = std::numeric_limits<double>::infinity();     // relaxation value
  double best_binary = std::numeric_limits<double>::infinity();  // min over S
  double min_positive_penalty = std::numeric_limits<double>::infinity();  // m over vertices
  double t0 = std::numeric_limits<double>::infinity();
  std::size_t vertices = 0;
  bool diagnostic_only = true;
};

inline PenaltyThresholdReport penalty_threshold_report(const BinaryLinearProgram& bp, PenaltyKind kind) {
  PenaltyThresholdReport r;
  const auto lp = solve_lp(bp);
  if (lp.status != LpStatus::optimal) throw InfeasibleError("relaxation is infeasible");
  r.alpha0 = lp.value;
  const auto points = enumerate_feasible(bp);
  r.best_binary = best_enumerated_value(bp, points);
  const auto verts = enumerate_vertices(bp);
  r.vertices = verts.size();
  for (const auto& v : verts) {
    const double p = penalty_value(kind, v, bp.binary_mask);
    if (p > 1e-12) r.min_positive_penalty = std::min(r.min_positive_penalty, p);
  }
  if (!std::isfinite(r.best_binary)) return r;  // S empty: no threshold
  const double num = std::max(0.0, r.best_binary - r.alpha0);
  // 1/(+inf) = 0 when every vertex is binary.
  r.t0 = std::isfinite(r.min_positive_penalty) ? num / r.min_positive_penalty : 0.0;
  if (num <= 1e-12) r.t0 = 0.0;
  return r;
}

}  // namespace sentcomp
