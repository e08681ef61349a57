#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "sentcomp/binary_lp.hpp"
#include "sentcomp/error.hpp"

namespace sentcomp {

struct RandomInstanceSpec {
  std::size_t vars = 10;
  std::size_t rows = 5;
  double density = 0.6;  // chance that a variable appears in a row
  int max_coef = 5;
  int max_cost = 10;
  int slack = 3;          // largest gap between a planted point and an inequality's rhs
};

/// Random pure-binary program with integer data. Every row is built around a
/// planted binary point, so the feasible set is never empty.
inline BinaryLinearProgram random_binary_program(const RandomInstanceSpec& spec, std::uint64_t seed) {
  if (spec.vars == 0) throw ConfigError("random instance needs at least one variable");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> cost(-spec.max_cost, spec.max_cost);
  std::uniform_int_distribution<int> coef(-spec.max_coef, spec.max_coef);
  std::uniform_int_distribution<int> bit(0, 1);
  std::uniform_int_distribution<int> rel(0, 2);
  std::uniform_int_distribution<int> gap(0, spec.slack);
  std::bernoulli_distribution present(spec.density);

  BinaryLinearProgram bp;
  std::vector<double> planted(spec.vars);
  for (std::size_t j = 0; j < spec.vars; ++j) {
    bp.add_var(static_cast<double>(cost(rng)), 0.0, 1.0, true, "x" + std::to_string(j + 1));
    planted[j] = bit(rng);
  }
  for (std::size_t i = 0; i < spec.rows; ++i) {
    std::vector<Term> terms;
    for (std::size_t j = 0; j < spec.vars; ++j) {
      if (!present(rng)) continue;
      const int a = coef(rng);
      if (a != 0) terms.push_back({j, static_cast<double>(a)});
    }
    if (terms.empty()) terms.push_back({i % spec.vars, 1.0});
    double act = 0.0;
    for (const auto& t : terms) act += t.coef * planted[t.var];
    const int r = rel(rng);
    if (r == 0) bp.add_row(std::move(terms), Relation::eq, act, "r" + std::to_string(i + 1));
    else if (r == 1) bp.add_row(std::move(terms), Relation::le, act + gap(rng), "r" + std::to_string(i + 1));
    else bp.add_row(std::move(terms), Relation::ge, act - gap(rng), "r" + std::to_string(i + 1));
  }
  return bp;
}

}  // namespace sentcomp
