#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "sentcomp/dc_solver.hpp"
#include "sentcomp/random_instance.hpp"

using namespace sentcomp;

namespace {

BinaryLinearProgram hand_instance() {
  BinaryLinearProgram bp;
  bp.add_var(-1.0);
  bp.add_var(0.0);
  bp.add_row({{0, 1.0}, {1, 1.0}}, Relation::eq, 1.0);
  return bp;
}

std::vector<bool> all_mask(std::size_t n) { return std::vector<bool>(n, true); }

void expect_descent(const DcaResult& r) {
  for (std::size_t k = 1; k < r.trajectory.size(); ++k)
    EXPECT_LE(r.trajectory[k].value, r.trajectory[k - 1].value + 1e-9) << "step " << k;
}

}  // namespace

TEST(Penalty, WorkedValues) {
  EXPECT_DOUBLE_EQ(penalty_value(PenaltyKind::p2, {0.5, 0.5}, all_mask(2)), 0.5);
  EXPECT_DOUBLE_EQ(penalty_value(PenaltyKind::p1, {1.0, 0.0, 1.0}, all_mask(3)), 0.0);
  EXPECT_NEAR(penalty_value(PenaltyKind::p3, {0.5}, all_mask(1)), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(penalty_value(PenaltyKind::p2, {0.5, 0.5}, {true, false}), 0.25);
}

TEST(Penalty, ZeroExactlyOnBinaryVectors) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  for (auto kind : {PenaltyKind::p1, PenaltyKind::p2, PenaltyKind::p3}) {
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> x(6);
      const bool binary = coin(rng);
      for (auto& v : x) v = binary ? (coin(rng) ? 1.0 : 0.0) : unit(rng);
      const double p = penalty_value(kind, x, all_mask(6));
      EXPECT_GE(p, -1e-15);
      if (binary) EXPECT_NEAR(p, 0.0, 1e-15);
      else EXPECT_GT(p, 0.0);
    }
  }
}

TEST(Subgradient, WorkedValues) {
  const std::vector<double> c{0.0};
  EXPECT_DOUBLE_EQ(subgrad_h(PenaltyKind::p2, {0.25}, 1.0, c, all_mask(1))[0], -0.5);
  EXPECT_NEAR(subgrad_h(PenaltyKind::p3, {0.0}, 1.0, c, all_mask(1))[0], 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(subgrad_h(PenaltyKind::p1, {0.5}, 1.0, c, all_mask(1))[0], 1.0);
  EXPECT_DOUBLE_EQ(subgrad_h(PenaltyKind::p1, {0.2}, 1.0, c, all_mask(1))[0], -1.0);
}

TEST(Subgradient, ShapeAndMask) {
  const std::vector<double> c{3.0, -2.0};
  const auto y = subgrad_h(PenaltyKind::p2, {0.75, 0.75}, 10.0, c, {true, false});
  EXPECT_DOUBLE_EQ(y[0], -3.0 + 10.0 * 0.5);
  EXPECT_DOUBLE_EQ(y[1], 2.0);  // off-mask: u = 0
}

TEST(Subgradient, SupportsConvexFunction) {
  // h(x) = -t p(x) - c.x is convex; check h(z) >= h(x) + y.(z - x).
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double t = 3.0;
  const std::vector<double> c{0.4, -1.1, 0.0};
  for (auto kind : {PenaltyKind::p1, PenaltyKind::p2}) {
    auto h = [&](const std::vector<double>& x) { return -t * penalty_value(kind, x, all_mask(3)) - (c[0] * x[0] + c[1] * x[1] + c[2] * x[2]); };
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<double> x(3), z(3);
      for (auto& v : x) v = unit(rng);
      for (auto& v : z) v = unit(rng);
      const auto y = subgrad_h(kind, x, t, c, all_mask(3));
      double lin = h(x);
      for (int j = 0; j < 3; ++j) lin += y[j] * (z[j] - x[j]);
      EXPECT_GE(h(z), lin - 1e-12);
    }
  }
  // p3: g - h with g = t pi^2 ||x||^2, h = g - t p3 - c.x, still convex.
  const double w = t * std::numbers::pi * std::numbers::pi;
  auto h3 = [&](const std::vector<double>& x) {
    double s = 0.0;
    for (int j = 0; j < 3; ++j) s += w * x[j] * x[j] - t * penalty_term(PenaltyKind::p3, x[j]) - c[j] * x[j];
    return s;
  };
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> x(3), z(3);
    for (auto& v : x) v = unit(rng);
    for (auto& v : z) v = unit(rng);
    const auto y = subgrad_h(PenaltyKind::p3, x, t, c, all_mask(3));
    double lin = h3(x);
    for (int j = 0; j < 3; ++j) lin += y[j] * (z[j] - x[j]);
    EXPECT_GE(h3(z), lin - 1e-9);
  }
}

TEST(Dca, HandTracedExample) {
  const auto bp = hand_instance();
  DcaConfig cfg;
  cfg.t = 10.0;
  cfg.penalty = PenaltyKind::p2;
  // y0 = -c + t (2 x0 - 1) = (1, 0); argmin -y0.x on the segment is (1, 0).
  const auto y0 = subgrad_h(PenaltyKind::p2, {0.5, 0.5}, 10.0, bp.c, bp.binary_mask);
  EXPECT_DOUBLE_EQ(y0[0], 1.0);
  EXPECT_DOUBLE_EQ(y0[1], 0.0);
  const auto y1 = subgrad_h(PenaltyKind::p2, {1.0, 0.0}, 10.0, bp.c, bp.binary_mask);
  EXPECT_DOUBLE_EQ(y1[0], 11.0);
  EXPECT_DOUBLE_EQ(y1[1], -10.0);
  const auto r = dca(bp, cfg, {0.5, 0.5});
  EXPECT_LE(r.iterations, 2u);
  EXPECT_EQ(r.x, (std::vector<double>{1.0, 0.0}));
  EXPECT_TRUE(r.binary_feasible);
  EXPECT_DOUBLE_EQ(r.value, -1.0);
}

TEST(Dca, BinaryOptimumIsFixpoint) {
  const auto bp = hand_instance();
  DcaConfig cfg;
  const auto r = dca(bp, cfg, {1.0, 0.0});
  EXPECT_EQ(r.iterations, 1u);
  EXPECT_EQ(r.x, (std::vector<double>{1.0, 0.0}));
}

TEST(Dca, InfeasibleRowsPropagate) {
  BinaryLinearProgram bp;
  bp.add_var(0.0);
  bp.add_var(0.0);
  bp.add_row({{0, 1.0}, {1, 1.0}}, Relation::eq, 3.0);
  EXPECT_THROW(dca(bp, DcaConfig{}, {0.5, 0.5}), InfeasibleError);
}

TEST(Dca, ConfigValidation) {
  DcaConfig cfg;
  cfg.t = 0.0;
  EXPECT_THROW(dca(hand_instance(), cfg, {0.5, 0.5}), ConfigError);
  EXPECT_THROW(dca(hand_instance(), DcaConfig{}, {0.5}), ConfigError);
}

TEST(Dca, DescentAndTerminationOnRandomInstances) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto kind : {PenaltyKind::p1, PenaltyKind::p2}) {
    for (int inst = 0; inst < 30; ++inst) {
      RandomInstanceSpec spec;
      spec.vars = 6 + inst % 8;
      spec.rows = 1 + inst % 8;
      const auto bp = random_binary_program(spec, 1000 + inst);
      DcaConfig cfg;
      cfg.penalty = kind;
      std::vector<double> x0(bp.num_vars());
      for (auto& v : x0) v = unit(rng);
      const auto r = dca(bp, cfg, x0);
      expect_descent(r);
      EXPECT_TRUE(r.converged);
      EXPECT_LT(r.iterations, cfg.max_iters);
      // Fixpoint: restarting from x* stays there.
      const auto again = dca(bp, cfg, r.x);
      double d = 0.0;
      for (std::size_t j = 0; j < r.x.size(); ++j) d += (again.x[j] - r.x[j]) * (again.x[j] - r.x[j]);
      EXPECT_LE(std::sqrt(d), cfg.eps1);
    }
  }
}

TEST(Dca, TrigonometricPenaltyRuns) {
  const auto bp = hand_instance();
  DcaConfig cfg;
  cfg.t = 10.0;
  cfg.penalty = PenaltyKind::p3;
  const auto r = dca(bp, cfg, {0.5, 0.5});
  EXPECT_TRUE(rows_satisfied(bp, r.x, 1e-6));
  EXPECT_NEAR(r.x[0], 1.0, 1e-6);
}

TEST(Dca, IncreasingWeightReachesBinary) {
  // From (1, 0.2), y2 = 0.9 - 0.6 t stays positive while t < 1.5, so a small
  // fixed weight keeps the fractional vertex.
  BinaryLinearProgram bp;
  bp.add_var(-1.0);
  bp.add_var(-0.9);
  bp.add_row({{0, 1.0}, {1, 1.0}}, Relation::le, 1.2);
  DcaConfig cfg;
  cfg.t = 1e-3;
  const auto fixed = dca(bp, cfg, {0.5, 0.5});
  EXPECT_FALSE(fixed.binary_feasible);
  EXPECT_NEAR(fixed.x[1], 0.2, 1e-12);
  cfg.increase_t = true;
  const auto r = dca(bp, cfg, {0.5, 0.5});
  EXPECT_DOUBLE_EQ(r.t, 10.0);
  EXPECT_TRUE(r.binary_feasible);
  EXPECT_EQ(r.x, (std::vector<double>{1.0, 0.0}));
}

TEST(Dca, TrajectoryCsv) {
  const auto r = dca(hand_instance(), DcaConfig{}, {0.5, 0.5});
  std::ostringstream out;
  write_trajectory_csv(out, r);
  EXPECT_EQ(out.str().rfind("iteration,F,penalty\n", 0), 0u);
}

TEST(PenaltyThreshold, IntegralRelaxationGivesZero) {
  const auto rep = penalty_threshold_report(hand_instance(), PenaltyKind::p2);
  EXPECT_DOUBLE_EQ(rep.t0, 0.0);
  EXPECT_TRUE(rep.diagnostic_only);
}

TEST(PenaltyThreshold, FractionalVertexHalfHalf) {
  // Vertices of {x1 = x2, x1 + x2 <= 1}: (0,0) and (0.5,0.5).
  BinaryLinearProgram bp;
  bp.add_var(-1.0);
  bp.add_var(-1.0);
  bp.add_row({{0, 1.0}, {1, -1.0}}, Relation::eq, 0.0);
  bp.add_row({{0, 1.0}, {1, 1.0}}, Relation::le, 1.0);
  const auto verts = enumerate_vertices(bp);
  EXPECT_EQ(verts.size(), 2u);
  const auto rep = penalty_threshold_report(bp, PenaltyKind::p2);
  EXPECT_DOUBLE_EQ(rep.min_positive_penalty, 0.5);
  EXPECT_DOUBLE_EQ(rep.alpha0, -1.0);
  EXPECT_DOUBLE_EQ(rep.best_binary, 0.0);
  EXPECT_DOUBLE_EQ(rep.t0, 2.0);
}

TEST(PenaltyThreshold, AllVerticesBinaryGivesZero) {
  BinaryLinearProgram bp;
  bp.add_var(1.0);
  bp.add_var(-1.0);
  const auto rep = penalty_threshold_report(bp, PenaltyKind::p1);
  EXPECT_FALSE(std::isfinite(rep.min_positive_penalty));
  EXPECT_DOUBLE_EQ(rep.t0, 0.0);
}

TEST(ExactPenalty, BinaryOptimaMinimizePenalizedProblemOverVertices) {
  // Over the vertex set of K, the penalized minimum at t = 1e5 is attained
  // at a binary optimum of the original program.
  for (int inst = 0; inst < 25; ++inst) {
    RandomInstanceSpec spec;
    spec.vars = 3 + inst % 5;
    spec.rows = 1 + inst % 4;
    const auto bp = random_binary_program(spec, 77 + inst);
    const auto points = enumerate_feasible(bp);
    ASSERT_FALSE(points.empty());
    const double best = best_enumerated_value(bp, points);
    for (auto kind : {PenaltyKind::p1, PenaltyKind::p2}) {
      double pen_best = 1e300;
      for (const auto& v : enumerate_vertices(bp)) pen_best = std::min(pen_best, penalized_objective(bp, kind, 1e5, v));
      for (const auto& x : points) {
        if (bp.objective(x) == best) {
          EXPECT_NEAR(penalized_objective(bp, kind, 1e5, x), pen_best, 1e-9);
        }
      }
    }
  }
}
