#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sentcomp/error.hpp"

namespace sentcomp {

enum class Relation { eq, le, ge };

inline const char* relation_symbol(Relation r) {
  switch (r) {
    case Relation::eq: return "=";
    case Relation::le: return "<=";
    case Relation::ge: return ">=";
  }
  return "?";
}

struct Term {
  std::size_t var;
  double coef;
};

struct Row {
  std::vector<Term> terms;
  Relation rel = Relation::eq;
  double rhs = 0.0;
  std::string name;

  double activity(const std::vector<double>& x) const {
    double s = 0.0;
    for (const auto& t : terms) s += t.coef * x[t.var];
    return s;
  }
};

inline constexpr double kRowTolerance = 1e-8;
inline constexpr double kBinaryTolerance = 1e-6;

/// min c^T x subject to typed rows and per-variable bounds inside [0,1];
/// coordinates flagged in binary_mask must take values in {0,1}.
struct BinaryLinearProgram {
  std::vector<double> c;
  std::vector<Row> rows;
  std::vector<double> lb;
  std::vector<double> ub;
  std::vector<bool> binary_mask;
  std::vector<std::string> names;  // optional, for dumps

  std::size_t num_vars() const { return c.size(); }
  std::size_t num_binaries() const { return static_cast<std::size_t>(std::count(binary_mask.begin(), binary_mask.end(), true)); }

  /// Appends a variable and returns its position.
  std::size_t add_var(double cost, double lo = 0.0, double hi = 1.0, bool binary = true, std::string name = {}) {
    c.push_back(cost);
    lb.push_back(lo);
    ub.push_back(hi);
    binary_mask.push_back(binary);
    names.push_back(std::move(name));
    return c.size() - 1;
  }

  void add_row(std::vector<Term> terms, Relation rel, double rhs, std::string name = {}) {
    rows.push_back(Row{std::move(terms), rel, rhs, std::move(name)});
  }

  void validate() const {
    const std::size_t n = c.size();
    if (lb.size() != n || ub.size() != n || binary_mask.size() != n)
      throw ConfigError("objective, bounds and binary mask have different lengths");
    for (std::size_t j = 0; j < n; ++j) {
      if (!(lb[j] >= 0.0 && ub[j] <= 1.0 && lb[j] <= ub[j]))
        throw ConfigError("bounds of variable " + std::to_string(j) + " are not inside [0,1] or cross");
      if (!std::isfinite(c[j])) throw ConfigError("non-finite cost on variable " + std::to_string(j));
    }
    for (const auto& r : rows)
      for (const auto& t : r.terms)
        if (t.var >= n) throw ConfigError("row references variable " + std::to_string(t.var) + " out of range");
  }

  double objective(const std::vector<double>& x) const {
    double s = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) s += c[j] * x[j];
    return s;
  }

  std::string var_name(std::size_t j) const {
    if (j < names.size() && !names[j].empty()) return names[j];
    return "x" + std::to_string(j);
  }

  void dump(std::ostream& out) const {
    out << std::setprecision(17);
    out << "minimize\n obj:";
    for (std::size_t j = 0; j < c.size(); ++j)
      if (c[j] != 0.0) out << ' ' << (c[j] >= 0 ? "+" : "") << c[j] << ' ' << var_name(j);
    out << "\nsubject to\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      out << ' ' << (r.name.empty() ? "r" + std::to_string(i) : r.name) << ':';
      for (const auto& t : r.terms) out << ' ' << (t.coef >= 0 ? "+" : "") << t.coef << ' ' << var_name(t.var);
      out << ' ' << relation_symbol(r.rel) << ' ' << r.rhs << '\n';
    }
    out << "bounds\n";
    for (std::size_t j = 0; j < c.size(); ++j) out << ' ' << lb[j] << " <= " << var_name(j) << " <= " << ub[j] << '\n';
    out << "binary\n";
    for (std::size_t j = 0; j < c.size(); ++j)
      if (binary_mask[j]) out << ' ' << var_name(j);
    out << "\nend\n";
  }
};

inline bool row_satisfied(const Row& r, double activity, double tol = kRowTolerance) {
  const double slack = tol * (1.0 + std::abs(r.rhs));
  switch (r.rel) {
    case Relation::eq: return std::abs(activity - r.rhs) <= slack;
    case Relation::le: return activity <= r.rhs + slack;
    case Relation::ge: return activity >= r.rhs - slack;
  }
  return false;
}

inline bool rows_satisfied(const BinaryLinearProgram& bp, const std::vector<double>& x, double tol = kRowTolerance) {
  return std::all_of(bp.rows.begin(), bp.rows.end(), [&](const Row& r) { return row_satisfied(r, r.activity(x), tol); });
}

inline bool within_bounds(const BinaryLinearProgram& bp, const std::vector<double>& x, double tol = 1e-9) {
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j] < bp.lb[j] - tol || x[j] > bp.ub[j] + tol) return false;
  return true;
}

inline bool binary_on_mask(const BinaryLinearProgram& bp, const std::vector<double>& x, double tol = kBinaryTolerance) {
  for (std::size_t j = 0; j < x.size(); ++j)
    if (bp.binary_mask[j] && std::min(std::abs(x[j]), std::abs(1.0 - x[j])) > tol) return false;
  return true;
}

/// Rounds masked coordinates to exact 0/1.
inline std::vector<double> snap_binary(const BinaryLinearProgram& bp, std::vector<double> x) {
  for (std::size_t j = 0; j < x.size(); ++j)
    if (bp.binary_mask[j]) x[j] = x[j] >= 0.5 ? 1.0 : 0.0;
  return x;
}

/// Membership in S: binary on the mask (within 1e-6), inside the bounds and
/// satisfying every row after snapping.
inline bool in_feasible_set(const BinaryLinearProgram& bp, const std::vector<double>& x) {
  if (x.size() != bp.num_vars() || !binary_on_mask(bp, x)) return false;
  const auto snapped = snap_binary(bp, x);
  return within_bounds(bp, snapped) && rows_satisfied(bp, snapped);
}

struct EnumerateOptions {
  std::size_t max_binaries = 24;  // guard on free (non-fixed) binaries
};

/// Exhaustive enumeration of the binary points satisfying every row and
/// bound. Depth-first over variables in index order with row-activity
/// interval pruning. Requires every variable to be binary-designated.
inline std::vector<std::vector<double>> enumerate_feasible(const BinaryLinearProgram& bp, EnumerateOptions opt = {}) {
  bp.validate();
  const std::size_t n = bp.num_vars();
  std::size_t free_binaries = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!bp.binary_mask[j]) throw ConfigError("enumeration needs every variable binary-designated");
    if (bp.lb[j] < bp.ub[j]) ++free_binaries;
  }
  if (free_binaries > opt.max_binaries)
    throw ConfigError("enumeration refused: " + std::to_string(free_binaries) + " free binaries exceed the guard of " +
                      std::to_string(opt.max_binaries));

  // Integer domains after bounds: lo/hi in {0,1}.
  std::vector<int> lo(n), hi(n);
  for (std::size_t j = 0; j < n; ++j) {
    lo[j] = static_cast<int>(std::ceil(bp.lb[j] - 1e-9));
    hi[j] = static_cast<int>(std::floor(bp.ub[j] + 1e-9));
    if (lo[j] > hi[j]) return {};
  }

  const std::size_t m = bp.rows.size();
  std::vector<std::vector<Term>> col(n);  // (row, coef) per variable
  for (std::size_t i = 0; i < m; ++i)
    for (const auto& t : bp.rows[i].terms) col[t.var].push_back(Term{i, t.coef});

  // Row activity range over the still-unassigned variables.
  std::vector<double> rmin(m, 0.0), rmax(m, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (const auto& t : col[j]) {
      rmin[t.var] += std::min(t.coef * lo[j], t.coef * hi[j]);
      rmax[t.var] += std::max(t.coef * lo[j], t.coef * hi[j]);
    }

  auto row_possible = [&](std::size_t i) {
    const auto& r = bp.rows[i];
    const double tol = 1e-9 * (1.0 + std::abs(r.rhs));
    switch (r.rel) {
      case Relation::eq: return rmin[i] <= r.rhs + tol && rmax[i] >= r.rhs - tol;
      case Relation::le: return rmin[i] <= r.rhs + tol;
      case Relation::ge: return rmax[i] >= r.rhs - tol;
    }
    return false;
  };
  for (std::size_t i = 0; i < m; ++i)
    if (!row_possible(i)) return {};

  std::vector<std::vector<double>> out;
  std::vector<double> x(n, 0.0);
  auto assign = [&](std::size_t j, int v, int sign) {
    for (const auto& t : col[j]) {
      const double a = t.coef;
      const double dmin = a * v - std::min(a * lo[j], a * hi[j]);
      const double dmax = a * v - std::max(a * lo[j], a * hi[j]);
      rmin[t.var] += sign * dmin;
      rmax[t.var] += sign * dmax;
    }
  };
  auto dfs = [&](const auto& self, std::size_t j) -> void {
    if (j == n) {
      if (rows_satisfied(bp, x, 1e-9)) out.push_back(x);
      return;
    }
    for (int v = lo[j]; v <= hi[j]; ++v) {
      x[j] = v;
      assign(j, v, +1);
      bool ok = true;
      for (const auto& t : col[j])
        if (!row_possible(t.var)) {
          ok = false;
          break;
        }
      if (ok) self(self, j + 1);
      assign(j, v, -1);
    }
    x[j] = 0.0;
  };
  dfs(dfs, 0);
  return out;
}

/// Minimum objective over an enumerated feasible set (+inf when empty).
inline double best_enumerated_value(const BinaryLinearProgram& bp, const std::vector<std::vector<double>>& points) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& x : points) best = std::min(best, bp.objective(x));
  return best;
}

}  // namespace sentcomp
