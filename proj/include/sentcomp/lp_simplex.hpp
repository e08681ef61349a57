#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sentcomp/binary_lp.hpp"
#include "sentcomp/error.hpp"

namespace sentcomp {

enum class LpStatus { optimal, infeasible, unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "?";
}

/// Basis snapshot in instance terms. Column ids: structural j -> j, slack of
/// row i -> n + i, artificial of row i -> n + m + i.
struct LpBasis {
  std::vector<std::size_t> basic;
  std::vector<std::size_t> at_upper;  // nonbasic structurals resting at their upper bound

  bool empty() const { return basic.empty(); }
};

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  LpBasis basis;
  std::size_t iterations = 0;
};

/// Fixes variable `var` to `value` (both bounds) for one solve.
struct VarFix {
  std::size_t var;
  double value;
};

struct LpOptions {
  double feasibility_tol = 1e-8;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  std::size_t max_iterations = 200000;
  std::size_t refresh_every = 64;  // pivots between recomputations of the basic values
};

namespace detail {

/// Bounded-variable primal simplex on a dense tableau. Fixed structurals are
/// substituted out; every row gets an artificial column for phase 1, and
/// inequality rows a nonnegative slack. Dantzig pricing, switching to
/// Bland's rule after 5 (rows + columns) consecutive degenerate pivots.
class DenseSimplex {
 public:
  DenseSimplex(const BinaryLinearProgram& bp, const std::vector<double>& cost, const std::vector<VarFix>* fixes,
               const LpOptions& opt)
      : bp_(bp), cost_(cost), opt_(opt), n_(bp.num_vars()), m_(bp.rows.size()) {
    lo_ = bp.lb;
    hi_ = bp.ub;
    if (fixes)
      for (const auto& f : *fixes) {
        if (f.var >= n_) throw ConfigError("bound fixing on an unknown variable");
        if (f.value < 0.0 || f.value > 1.0) throw ConfigError("bound fixing outside [0,1]");
        lo_[f.var] = std::max(lo_[f.var], f.value);
        hi_[f.var] = std::min(hi_[f.var], f.value);
      }
  }

  LpSolution solve(const LpBasis* warm) {
    LpSolution out;
    for (std::size_t j = 0; j < n_; ++j)
      if (lo_[j] > hi_[j] + opt_.feasibility_tol) return out;  // crossing bounds
    setup(warm);
    bool phase1_needed = true;
    if (warm && !warm->empty() && install_basis(*warm)) phase1_needed = false;
    if (phase1_needed) {
      if (warm && !warm->empty()) setup(nullptr);
      set_phase_cost(true);
      const auto st = iterate(true);
      if (st != LpStatus::optimal) {
        out.status = st == LpStatus::unbounded ? LpStatus::unbounded : LpStatus::infeasible;
        out.iterations = iters_;
        return out;
      }
      refresh_basic_values();
      double infeas = 0.0;
      for (std::size_t k = 0; k < ncols_; ++k)
        if (kind_[k] == Kind::artificial) infeas += std::abs(x_[k]);
      if (infeas > opt_.feasibility_tol * (1.0 + bnorm_)) {
        out.iterations = iters_;
        return out;
      }
      retire_artificials();
    }
    set_phase_cost(false);
    const auto st = iterate(false);
    out.iterations = iters_;
    if (st == LpStatus::unbounded) {
      out.status = LpStatus::unbounded;
      return out;
    }
    refresh_basic_values();
    out.status = LpStatus::optimal;
    out.x.assign(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) out.x[j] = lo_[j];
    for (std::size_t k = 0; k < ncols_; ++k)
      if (kind_[k] == Kind::structural) {
        double v = x_[k];
        const std::size_t j = ref_[k];
        if (std::abs(v - lo_[j]) <= 1e-9) v = lo_[j];
        if (std::abs(v - hi_[j]) <= 1e-9) v = hi_[j];
        out.x[j] = std::clamp(v, lo_[j], hi_[j]);
      }
    out.value = 0.0;
    for (std::size_t j = 0; j < n_; ++j) out.value += cost_[j] * out.x[j];
    out.basis = export_basis();
    return out;
  }

 private:
  enum class Kind : std::uint8_t { structural, slack, artificial };
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  // Sparse original column for basic-value recomputation.
  struct Entry {
    std::size_t row;
    double coef;
  };

  std::size_t global_id(std::size_t k) const {
    switch (kind_[k]) {
      case Kind::structural: return ref_[k];
      case Kind::slack: return n_ + ref_[k];
      case Kind::artificial: return n_ + m_ + ref_[k];
    }
    return 0;
  }

  void setup(const LpBasis* warm) {
    kind_.clear();
    ref_.clear();
    clo_.clear();
    chi_.clear();
    cols_.clear();
    std::vector<std::vector<Entry>> by_var(n_);
    for (std::size_t i = 0; i < m_; ++i)
      for (const auto& t : bp_.rows[i].terms) by_var[t.var].push_back({i, t.coef});

    rhs_.assign(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) rhs_[i] = bp_.rows[i].rhs;
    for (std::size_t j = 0; j < n_; ++j) {
      if (hi_[j] - lo_[j] <= 1e-12) {
        for (const auto& e : by_var[j]) rhs_[e.row] -= e.coef * lo_[j];
        continue;
      }
      kind_.push_back(Kind::structural);
      ref_.push_back(j);
      clo_.push_back(lo_[j]);
      chi_.push_back(hi_[j]);
      cols_.push_back(std::move(by_var[j]));
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const Relation r = bp_.rows[i].rel;
      if (r == Relation::eq) continue;
      kind_.push_back(Kind::slack);
      ref_.push_back(i);
      clo_.push_back(0.0);
      chi_.push_back(kInf);
      cols_.push_back({{i, r == Relation::le ? 1.0 : -1.0}});
    }
    art_begin_ = kind_.size();
    for (std::size_t i = 0; i < m_; ++i) {
      kind_.push_back(Kind::artificial);
      ref_.push_back(i);
      clo_.push_back(0.0);
      chi_.push_back(kInf);
      cols_.push_back({{i, 1.0}});  // sign fixed below
    }
    ncols_ = kind_.size();

    // Nonbasic starting values.
    x_.assign(ncols_, 0.0);
    at_upper_.assign(ncols_, false);
    std::vector<bool> warm_upper(n_, false);
    if (warm)
      for (std::size_t g : warm->at_upper)
        if (g < n_) warm_upper[g] = true;
    for (std::size_t k = 0; k < art_begin_; ++k) {
      if (kind_[k] == Kind::structural && warm_upper[ref_[k]]) {
        x_[k] = chi_[k];
        at_upper_[k] = true;
      } else {
        x_[k] = clo_[k];
      }
    }
    std::vector<double> resid = rhs_;
    for (std::size_t k = 0; k < art_begin_; ++k)
      if (x_[k] != 0.0)
        for (const auto& e : cols_[k]) resid[e.row] -= e.coef * x_[k];
    sign_.assign(m_, 1.0);
    bnorm_ = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      sign_[i] = resid[i] >= 0.0 ? 1.0 : -1.0;
      cols_[art_begin_ + i][0].coef = sign_[i];
      bnorm_ = std::max(bnorm_, std::abs(rhs_[i]));
    }

    // Tableau = diag(sign) [A | S | diag(sign)].
    T_.assign(m_ * ncols_, 0.0);
    for (std::size_t k = 0; k < ncols_; ++k)
      for (const auto& e : cols_[k]) T_[e.row * ncols_ + k] = sign_[e.row] * e.coef;
    basis_.assign(m_, 0);
    is_basic_.assign(ncols_, false);
    for (std::size_t i = 0; i < m_; ++i) {
      basis_[i] = art_begin_ + i;
      is_basic_[art_begin_ + i] = true;
      x_[art_begin_ + i] = std::abs(resid[i]);
    }
    iters_since_refresh_ = 0;
    degenerate_run_ = 0;
    bland_ = false;
  }

  // Pivots the warm basis in; true when it is primal feasible.
  bool install_basis(const LpBasis& warm) {
    std::vector<std::size_t> pos_of(n_ + 2 * m_, ncols_);
    for (std::size_t k = 0; k < ncols_; ++k) pos_of[global_id(k)] = k;
    std::vector<bool> wanted(ncols_, false);
    for (std::size_t g : warm.basic)
      if (g < pos_of.size() && pos_of[g] < ncols_) wanted[pos_of[g]] = true;
    for (std::size_t q = 0; q < ncols_; ++q) {
      if (!wanted[q] || is_basic_[q]) continue;
      std::size_t best = m_;
      double best_abs = 1e-7;
      for (std::size_t i = 0; i < m_; ++i) {
        const std::size_t b = basis_[i];
        if (kind_[b] != Kind::artificial || wanted[b]) continue;
        const double a = std::abs(T_[i * ncols_ + q]);
        if (a > best_abs) {
          best_abs = a;
          best = i;
        }
      }
      if (best == m_) return false;
      const std::size_t leaving = basis_[best];
      pivot(best, q);
      x_[leaving] = 0.0;
      at_upper_[leaving] = false;
    }
    refresh_basic_values();
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t b = basis_[i];
      const double tol = opt_.feasibility_tol * (1.0 + std::abs(x_[b]));
      if (kind_[b] == Kind::artificial) {
        if (std::abs(x_[b]) > tol) return false;
      } else if (x_[b] < clo_[b] - tol || x_[b] > chi_[b] + tol) {
        return false;
      }
    }
    retire_artificials();
    return true;
  }

  void set_phase_cost(bool phase1) {
    c_.assign(ncols_, 0.0);
    for (std::size_t k = 0; k < ncols_; ++k) {
      if (phase1) c_[k] = kind_[k] == Kind::artificial ? 1.0 : 0.0;
      else if (kind_[k] == Kind::structural) c_[k] = cost_[ref_[k]];
    }
    d_ = c_;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = c_[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &T_[i * ncols_];
      for (std::size_t k = 0; k < ncols_; ++k) d_[k] -= cb * row[k];
    }
    for (std::size_t i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
    degenerate_run_ = 0;
    bland_ = false;
  }

  // Artificials leave the problem: pinned to [0,0], pivoted out where possible.
  void retire_artificials() {
    for (std::size_t k = art_begin_; k < ncols_; ++k) {
      chi_[k] = 0.0;
      if (!is_basic_[k]) x_[k] = 0.0;
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t b = basis_[i];
      if (kind_[b] != Kind::artificial) continue;
      x_[b] = 0.0;
      std::size_t best = ncols_;
      double best_abs = 1e-7;
      for (std::size_t k = 0; k < art_begin_; ++k) {
        if (is_basic_[k]) continue;
        const double a = std::abs(T_[i * ncols_ + k]);
        if (a > best_abs) {
          best_abs = a;
          best = k;
        }
      }
      if (best < ncols_) {
        pivot(i, best);  // degenerate: the artificial sits at 0
        x_[b] = 0.0;
      }
    }
  }

  bool eligible(std::size_t k, bool phase1) const {
    if (is_basic_[k]) return false;
    if (!phase1 && kind_[k] == Kind::artificial) return false;
    if (chi_[k] - clo_[k] <= 0.0) return false;
    if (!at_upper_[k] && d_[k] < -opt_.optimality_tol) return true;
    if (at_upper_[k] && d_[k] > opt_.optimality_tol) return true;
    return false;
  }

  LpStatus iterate(bool phase1) {
    const std::size_t degenerate_limit = 5 * (m_ + ncols_);
    for (;;) {
      if (iters_ >= opt_.max_iterations) throw InternalError("simplex iteration limit reached");
      // Pricing.
      std::size_t q = ncols_;
      double best = 0.0;
      for (std::size_t k = 0; k < ncols_; ++k) {
        if (!eligible(k, phase1)) continue;
        if (bland_) {
          q = k;
          break;
        }
        const double score = std::abs(d_[k]);
        if (score > best) {
          best = score;
          q = k;
        }
      }
      if (q == ncols_) return LpStatus::optimal;
      const double dir = at_upper_[q] ? -1.0 : 1.0;

      // Ratio test.
      double theta = chi_[q] - clo_[q];  // bound flip
      std::size_t leave_row = m_;
      double leave_abs = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = T_[i * ncols_ + q];
        if (std::abs(a) <= opt_.pivot_tol) continue;
        const std::size_t b = basis_[i];
        const double rate = dir * a;  // x_b decreases by rate * theta
        double limit;
        if (rate > 0.0) {
          if (clo_[b] == -kInf) continue;
          limit = std::max(0.0, x_[b] - clo_[b]) / rate;
        } else {
          if (chi_[b] == kInf) continue;
          limit = std::max(0.0, chi_[b] - x_[b]) / -rate;
        }
        const bool better = limit < theta - 1e-12 ||
                            (limit <= theta + 1e-12 && leave_row < m_ &&
                             (bland_ ? b < basis_[leave_row] : std::abs(a) > leave_abs));
        if (better || (leave_row == m_ && limit <= theta)) {
          if (limit < theta - 1e-12 || leave_row == m_ || better) {
            theta = std::min(theta, limit);
            leave_row = i;
            leave_abs = std::abs(a);
          }
        }
      }
      if (theta == kInf) return LpStatus::unbounded;
      ++iters_;
      if (theta <= 1e-12) {
        if (++degenerate_run_ > degenerate_limit) bland_ = true;
      } else {
        degenerate_run_ = 0;
      }

      // Move along the edge.
      if (theta > 0.0) {
        for (std::size_t i = 0; i < m_; ++i) {
          const double a = T_[i * ncols_ + q];
          if (a != 0.0) x_[basis_[i]] -= dir * theta * a;
        }
        x_[q] += dir * theta;
      }
      if (leave_row == m_) {
        // Entering column runs to its opposite bound.
        at_upper_[q] = !at_upper_[q];
        x_[q] = at_upper_[q] ? chi_[q] : clo_[q];
        continue;
      }
      const std::size_t leaving = basis_[leave_row];
      const double a = T_[leave_row * ncols_ + q];
      const double rate = dir * a;
      // The leaving variable rests on the bound it reached.
      if (rate > 0.0) {
        x_[leaving] = clo_[leaving];
        at_upper_[leaving] = false;
      } else {
        x_[leaving] = chi_[leaving];
        at_upper_[leaving] = true;
      }
      pivot(leave_row, q);
      if (++iters_since_refresh_ >= opt_.refresh_every) refresh_basic_values();
    }
  }

  void pivot(std::size_t r, std::size_t q) {
    double* prow = &T_[r * ncols_];
    const double inv = 1.0 / prow[q];
    nz_.clear();
    for (std::size_t k = 0; k < ncols_; ++k) {
      if (prow[k] == 0.0) continue;
      prow[k] *= inv;
      if (std::abs(prow[k]) < 1e-14) prow[k] = 0.0;
      else nz_.push_back(k);
    }
    prow[q] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &T_[i * ncols_];
      const double f = row[q];
      if (f == 0.0) continue;
      for (std::size_t k : nz_) {
        row[k] -= f * prow[k];
        if (std::abs(row[k]) < 1e-14) row[k] = 0.0;
      }
      row[q] = 0.0;
    }
    if (!d_.empty()) {
      const double f = d_[q];
      if (f != 0.0)
        for (std::size_t k : nz_) d_[k] -= f * prow[k];
      d_[q] = 0.0;
    }
    is_basic_[basis_[r]] = false;
    basis_[r] = q;
    is_basic_[q] = true;
    at_upper_[q] = false;
  }

  // x_B = B^{-1} (b - N x_N), with B^{-1} read off the artificial block.
  void refresh_basic_values() {
    std::vector<double> resid = rhs_;
    for (std::size_t k = 0; k < ncols_; ++k) {
      if (is_basic_[k] || x_[k] == 0.0) continue;
      for (const auto& e : cols_[k]) resid[e.row] -= e.coef * x_[k];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      double v = 0.0;
      const double* row = &T_[i * ncols_ + art_begin_];
      for (std::size_t l = 0; l < m_; ++l) v += row[l] * sign_[l] * resid[l];
      x_[basis_[i]] = v;
    }
    iters_since_refresh_ = 0;
  }

  LpBasis export_basis() const {
    LpBasis b;
    for (std::size_t i = 0; i < m_; ++i) b.basic.push_back(global_id(basis_[i]));
    for (std::size_t k = 0; k < art_begin_; ++k)
      if (!is_basic_[k] && at_upper_[k] && kind_[k] == Kind::structural) b.at_upper.push_back(ref_[k]);
    return b;
  }

  const BinaryLinearProgram& bp_;
  const std::vector<double>& cost_;
  LpOptions opt_;
  std::size_t n_, m_;
  std::vector<double> lo_, hi_;

  std::vector<Kind> kind_;
  std::vector<std::size_t> ref_;
  std::vector<double> clo_, chi_;
  std::vector<std::vector<Entry>> cols_;
  std::size_t art_begin_ = 0;
  std::size_t ncols_ = 0;
  std::vector<double> rhs_;
  std::vector<double> sign_;
  double bnorm_ = 0.0;

  std::vector<double> T_;
  std::vector<double> x_;
  std::vector<bool> at_upper_;
  std::vector<bool> is_basic_;
  std::vector<std::size_t> basis_;
  std::vector<double> c_, d_;
  std::vector<std::size_t> nz_;
  std::size_t iters_ = 0;
  std::size_t iters_since_refresh_ = 0;
  std::size_t degenerate_run_ = 0;
  bool bland_ = false;
};

}  // namespace detail

struct LpRequest {
  const std::vector<double>* objective = nullptr;  // replaces bp.c when set
  const std::vector<VarFix>* fixes = nullptr;
  const LpBasis* warm_start = nullptr;
};

/// Solves the continuous relaxation of bp (binary mask ignored) and returns
/// an optimal vertex, or reports infeasibility.
inline LpSolution solve_lp(const BinaryLinearProgram& bp, const LpRequest& req = {}, const LpOptions& opt = {}) {
  const std::vector<double>& cost = req.objective ? *req.objective : bp.c;
  if (cost.size() != bp.num_vars()) throw ConfigError("objective length differs from the variable count");
  detail::DenseSimplex simplex(bp, cost, req.fixes, opt);
  return simplex.solve(req.warm_start);
}

}  // namespace sentcomp
