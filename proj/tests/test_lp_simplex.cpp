#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sentcomp/dc_solver.hpp"
#include "sentcomp/lp_simplex.hpp"
#include "sentcomp/random_instance.hpp"

using namespace sentcomp;

namespace {

BinaryLinearProgram segment(double c1, double c2) {
  BinaryLinearProgram bp;
  bp.add_var(c1);
  bp.add_var(c2);
  bp.add_row({{0, 1.0}, {1, 1.0}}, Relation::eq, 1.0);
  return bp;
}

// Residual and bound checks of the returned point.
void expect_certified(const BinaryLinearProgram& bp, const LpSolution& s) {
  ASSERT_EQ(s.status, LpStatus::optimal);
  EXPECT_TRUE(within_bounds(bp, s.x, 1e-9));
  EXPECT_TRUE(rows_satisfied(bp, s.x, 1e-8));
}

// Random instance with fractional data and mixed row types.
BinaryLinearProgram random_lp(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  RandomInstanceSpec spec;
  spec.vars = n;
  spec.rows = m;
  auto bp = random_binary_program(spec, rng());
  std::uniform_real_distribution<double> jitter(-0.5, 0.5);
  for (auto& cj : bp.c) cj += jitter(rng);
  return bp;
}

}  // namespace

TEST(LpSimplex, SegmentPicksCheaperEnd) {
  const auto bp = segment(-2.0, -1.0);
  const auto s = solve_lp(bp);
  expect_certified(bp, s);
  EXPECT_DOUBLE_EQ(s.x[0], 1.0);
  EXPECT_DOUBLE_EQ(s.x[1], 0.0);
  EXPECT_NEAR(s.value, -2.0, 1e-12);
  // Oracle: the segment has two vertices.
  const auto verts = enumerate_vertices(bp);
  ASSERT_EQ(verts.size(), 2u);
  double best = 1e9;
  for (const auto& v : verts) best = std::min(best, bp.objective(v));
  EXPECT_NEAR(s.value, best, 1e-12);
}

TEST(LpSimplex, BoundFixedVariable) {
  BinaryLinearProgram bp;
  bp.add_var(1.0, 1.0, 1.0);
  const auto s = solve_lp(bp);
  ASSERT_EQ(s.status, LpStatus::optimal);
  EXPECT_DOUBLE_EQ(s.value, 1.0);

  BinaryLinearProgram eq;
  eq.add_var(1.0);
  eq.add_row({{0, 1.0}}, Relation::eq, 1.0);
  EXPECT_DOUBLE_EQ(solve_lp(eq).value, 1.0);
}

TEST(LpSimplex, InfeasibleRow) {
  BinaryLinearProgram bp;
  bp.add_var(0.0);
  bp.add_var(0.0);
  bp.add_row({{0, 1.0}, {1, 1.0}}, Relation::eq, 3.0);
  EXPECT_EQ(solve_lp(bp).status, LpStatus::infeasible);
}

TEST(LpSimplex, FixingsAct) {
  const auto bp = segment(-2.0, -1.0);
  std::vector<VarFix> fx{{0, 0.0}};
  const auto s = solve_lp(bp, LpRequest{nullptr, &fx, nullptr});
  ASSERT_EQ(s.status, LpStatus::optimal);
  EXPECT_DOUBLE_EQ(s.x[1], 1.0);
  std::vector<VarFix> both{{0, 1.0}, {1, 1.0}};
  EXPECT_EQ(solve_lp(bp, LpRequest{nullptr, &both, nullptr}).status, LpStatus::infeasible);
  std::vector<VarFix> bad{{0, 1.5}};
  EXPECT_THROW(solve_lp(bp, LpRequest{nullptr, &bad, nullptr}), ConfigError);
}

TEST(LpSimplex, ObjectiveOverride) {
  const auto bp = segment(-2.0, -1.0);
  std::vector<double> c{3.0, 1.0};
  const auto s = solve_lp(bp, LpRequest{&c, nullptr, nullptr});
  EXPECT_DOUBLE_EQ(s.x[1], 1.0);
  EXPECT_NEAR(s.value, 1.0, 1e-12);
}

TEST(LpSimplex, MatchesVertexEnumeration) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + trial % 6;
    const std::size_t m = 1 + trial % 4;
    const auto bp = random_lp(rng, n, m);
    const auto s = solve_lp(bp);
    const auto verts = enumerate_vertices(bp);
    if (verts.empty()) {
      EXPECT_EQ(s.status, LpStatus::infeasible) << "trial " << trial;
      continue;
    }
    expect_certified(bp, s);
    double best = 1e18;
    for (const auto& v : verts) best = std::min(best, bp.objective(v));
    EXPECT_NEAR(s.value, best, 1e-7) << "trial " << trial;
  }
}

TEST(LpSimplex, OptimalityCertificateAgainstSampledPoints) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    // Only inequality rows, so rejection sampling finds interior points.
    BinaryLinearProgram bp;
    const std::size_t n = 4;
    for (std::size_t j = 0; j < n; ++j) bp.add_var(unit(rng) * 2.0 - 1.0);
    for (int i = 0; i < 3; ++i) {
      std::vector<Term> terms;
      for (std::size_t j = 0; j < n; ++j) terms.push_back({j, unit(rng) * 2.0 - 0.5});
      bp.add_row(std::move(terms), Relation::le, 1.0 + unit(rng));
    }
    const auto s = solve_lp(bp);
    expect_certified(bp, s);
    std::size_t found = 0;
    while (found < 1000) {
      std::vector<double> y(n);
      for (auto& v : y) v = unit(rng);
      if (!rows_satisfied(bp, y, 0.0)) continue;
      ++found;
      EXPECT_LE(s.value, bp.objective(y) + 1e-9);
    }
  }
}

TEST(LpSimplex, VertexProperty) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const auto bp = random_lp(rng, 8, 4);
    const auto s = solve_lp(bp);
    if (s.status != LpStatus::optimal) continue;
    std::size_t interior = 0;
    for (std::size_t j = 0; j < bp.num_vars(); ++j)
      if (s.x[j] > bp.lb[j] + 1e-9 && s.x[j] < bp.ub[j] - 1e-9) ++interior;
    EXPECT_LE(interior, bp.rows.size());
  }
}

TEST(LpSimplex, WarmStartEquivalence) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto bp = random_lp(rng, 10, 5);
    const auto first = solve_lp(bp);
    if (first.status != LpStatus::optimal) continue;
    std::vector<double> c2(bp.num_vars());
    for (auto& v : c2) v = unit(rng);
    const auto cold = solve_lp(bp, LpRequest{&c2, nullptr, nullptr});
    const auto warm = solve_lp(bp, LpRequest{&c2, nullptr, &first.basis});
    ASSERT_EQ(warm.status, LpStatus::optimal);
    expect_certified(bp, warm);
    EXPECT_NEAR(cold.value, warm.value, 1e-9);
  }
}

TEST(LpSimplex, Deterministic) {
  std::mt19937_64 rng(3);
  const auto bp = random_lp(rng, 12, 6);
  const auto a = solve_lp(bp);
  const auto b = solve_lp(bp);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.basis.basic, b.basis.basic);
}

TEST(LpSimplex, DegenerateInstanceTerminates) {
  // Many rows through the same vertex.
  BinaryLinearProgram bp;
  for (int j = 0; j < 6; ++j) bp.add_var(-1.0 - 0.1 * j);
  for (int i = 0; i < 12; ++i) {
    std::vector<Term> terms;
    for (std::size_t j = 0; j < 6; ++j) terms.push_back({j, static_cast<double>((i + j) % 3 + 1)});
    bp.add_row(std::move(terms), Relation::le, 0.0);
  }
  const auto s = solve_lp(bp);
  ASSERT_EQ(s.status, LpStatus::optimal);
  EXPECT_NEAR(s.value, 0.0, 1e-12);
}
