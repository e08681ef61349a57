#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "sentcomp/ilp_builder.hpp"

using namespace sentcomp;

namespace {

const NgramModel& lm() {
  static const NgramModel m = train(read_corpus(std::string(SENTCOMP_DATA_DIR) + "/corpus/lm.txt"));
  return m;
}

TokenSeq words(std::size_t n) {
  static const std::vector<std::string> pool{"the", "man", "saw", "a", "dog", "with", "the", "telescope", "in", "park"};
  std::vector<std::string> w;
  for (std::size_t i = 0; i < n; ++i) w.push_back(pool[i % pool.size()]);
  return TokenSeq(w);
}

// All ascending subsets of [1,n] with size in [lo,up].
std::set<std::vector<std::size_t>> subsequences(std::size_t n, std::size_t lo, std::size_t up) {
  std::set<std::vector<std::size_t>> out;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) s.push_back(i + 1);
    if (s.size() >= lo && s.size() <= up) out.insert(s);
  }
  return out;
}

std::set<std::vector<std::size_t>> decoded(const CompressionProblem& p, const std::vector<std::vector<double>>& pts,
                                           const TokenSeq& t) {
  std::set<std::vector<std::size_t>> out;
  for (const auto& x : pts) EXPECT_TRUE(out.insert(decode(x, p, t).selected).second);
  return out;
}

// Independent score: sum of log P from the language model's generic query.
double log_score(const TokenSeq& t, const std::vector<std::size_t>& sel) {
  std::vector<std::string> h{std::string(kStartMarker)};
  double s = 0.0;
  for (std::size_t i : sel) {
    s += std::log(lm().probability(h, t[i - 1]));
    h.push_back(t[i - 1]);
    if (h.size() > 2) h.erase(h.begin());
  }
  return s + std::log(lm().probability(h, kEndMarker));
}

EnumerateOptions wide() { return EnumerateOptions{400}; }

}  // namespace

TEST(Indexing, VariableCountFormula) {
  for (std::size_t n = 1; n <= 30; ++n) {
    // Oracle: count index tuples directly.
    std::size_t tuples = 2 * n;
    for (std::size_t i = 0; i + 1 <= n; ++i)
      for (std::size_t j = i + 1; j <= n; ++j) ++tuples;
    for (std::size_t i = 0; i + 2 <= n; ++i)
      for (std::size_t j = i + 1; j + 1 <= n; ++j)
        for (std::size_t k = j + 1; k <= n; ++k) ++tuples;
    EXPECT_EQ(full_variable_count(n), tuples);
    const auto full = build(words(n), lm(), {1, n}, nullptr, {}, BuildOptions{ScoreKind::log, false});
    EXPECT_EQ(full.program.num_vars(), full_variable_count(n)) << n;
    const auto elim = build(words(n), lm(), {1, n});
    EXPECT_EQ(elim.program.num_vars(), full_variable_count(n) - n) << n;
  }
  EXPECT_EQ(full_variable_count(5), 45u);
}

TEST(Indexing, PositionsAreABijection) {
  const CompressionIndexing idx(6, true);
  std::set<std::size_t> seen;
  for (std::size_t i = 1; i <= 6; ++i) {
    seen.insert(idx.delta(i));
    seen.insert(idx.alpha(i));
  }
  idx.for_each_beta([&](std::size_t, std::size_t, std::size_t v) { seen.insert(v); });
  idx.for_each_gamma([&](std::size_t, std::size_t, std::size_t, std::size_t v) { seen.insert(v); });
  EXPECT_EQ(seen.size(), idx.size());
  EXPECT_EQ(*seen.rbegin(), idx.size() - 1);
  EXPECT_EQ(idx.gamma(2, 1, 3), CompressionIndexing::kNone);
}

TEST(Build, ThreeWordExample) {
  const auto t = words(3);
  for (bool elim : {true, false}) {
    const auto p = build(t, lm(), {2, 3}, nullptr, {}, BuildOptions{ScoreKind::log, elim});
    const auto& idx = p.index;
    std::vector<double> x(idx.size(), 0.0);
    x[idx.delta(1)] = x[idx.delta(3)] = 1.0;
    x[idx.gamma(0, 1, 3)] = 1.0;
    x[idx.beta(1, 3)] = 1.0;
    if (!elim) x[idx.alpha(1)] = 1.0;
    EXPECT_TRUE(in_feasible_set(p.program, x));
    EXPECT_EQ(x, idx.encode({1, 3}));
  }
}

TEST(Build, EnumerateThreeWords) {
  const auto t = words(3);
  const auto p = build(t, lm(), {2, 3});
  const auto pts = enumerate_feasible(p.program);
  EXPECT_EQ(pts.size(), 4u);
  EXPECT_EQ(decoded(p, pts, t), subsequences(3, 2, 3));
}

TEST(Build, ErrorsAndEdgeBounds) {
  const auto t = words(4);
  EXPECT_THROW(build(t, lm(), {5, 5}), ConfigError);
  EXPECT_THROW(build(t, lm(), {0, 2}), ConfigError);
  EXPECT_THROW(build(t, lm(), {3, 2}), ConfigError);
  EXPECT_THROW(build(TokenSeq(), lm(), {1, 1}), ConfigError);
}

TEST(Build, InfeasibleEnumerationIsEmpty) {
  BinaryLinearProgram bp;
  bp.add_var(0.0, 1.0, 1.0);
  bp.add_row({{0, 1.0}}, Relation::eq, 0.0);
  EXPECT_TRUE(enumerate_feasible(bp).empty());
  // Length window above n, built by hand since build() refuses it.
  auto p = build(words(3), lm(), {3, 3});
  p.program.rows[p.program.rows.size() - 2].rhs = 4.0;
  EXPECT_TRUE(enumerate_feasible(p.program).empty());
}

TEST(Build, EnumerationGuard) {
  const auto p = build(words(6), lm(), {2, 6});
  EXPECT_THROW(enumerate_feasible(p.program), ConfigError);
}

TEST(Build, AllFixedOneGivesIdentity) {
  const auto t = words(5);
  const DeltaFixing all(5, Fixing::fixed_one);
  const auto p = build(t, lm(), {2, 5}, &all);
  const auto pts = enumerate_feasible(p.program);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(decode(pts[0], p, t).compressed, t);
}

TEST(Build, FeasibleSetBijection) {
  for (std::size_t n = 2; n <= 8; ++n) {
    const auto t = words(n);
    for (std::size_t lo = 2; lo <= n; ++lo)
      for (std::size_t up = lo; up <= n; ++up) {
        const auto p = build(t, lm(), {lo, up});
        EXPECT_EQ(decoded(p, enumerate_feasible(p.program, wide()), t), subsequences(n, lo, up))
            << "n=" << n << " l=[" << lo << "," << up << "]";
      }
  }
}

TEST(Build, AlphaEliminationPreservesPointsAndValues) {
  for (std::size_t n = 2; n <= 6; ++n) {
    const auto t = words(n);
    const auto elim = build(t, lm(), {2, n});
    const auto full = build(t, lm(), {2, n}, nullptr, {}, BuildOptions{ScoreKind::log, false});
    const auto pe = enumerate_feasible(elim.program, wide());
    const auto pf = enumerate_feasible(full.program, wide());
    ASSERT_EQ(pe.size(), pf.size());
    EXPECT_EQ(decoded(elim, pe, t), decoded(full, pf, t));
    for (const auto& x : pe) {
      const auto sel = decode(x, elim, t).selected;
      EXPECT_NEAR(elim.program.objective(x), full.program.objective(full.index.encode(sel)), 1e-9);
    }
  }
}

TEST(Build, ObjectiveMatchesLanguageModel) {
  const auto t = words(7);
  const auto p = build(t, lm(), {2, 7});
  const auto subs = subsequences(7, 2, 7);
  for (const auto& sel : subs) EXPECT_NEAR(p.program.objective(p.index.encode(sel)), -log_score(t, sel), 1e-9);
  const auto raw = build(t, lm(), {2, 7}, nullptr, {}, BuildOptions{ScoreKind::raw, true});
  const TermScores ts(t, lm(), ScoreKind::raw);
  for (const auto& sel : subs) EXPECT_NEAR(raw.program.objective(raw.index.encode(sel)), -ts.of(sel), 1e-12);
}

TEST(Build, FixingsAndPhraseRows) {
  const auto t = words(6);
  DeltaFixing df(6, Fixing::free);
  df[0] = Fixing::fixed_one;
  df[2] = Fixing::fixed_zero;
  const std::vector<PhraseSpan> spans{{4, {5, 6}}};
  for (bool skip : {true, false}) {
    const auto p = build(t, lm(), {2, 5}, &df, spans, BuildOptions{ScoreKind::log, true, skip});
    std::set<std::vector<std::size_t>> want;
    for (const auto& s : subsequences(6, 2, 5)) {
      const std::set<std::size_t> in(s.begin(), s.end());
      if (!in.count(1) || in.count(3)) continue;
      const bool intro = in.count(4), any = in.count(5) || in.count(6);
      if (intro != any) continue;
      want.insert(s);
    }
    EXPECT_EQ(decoded(p, enumerate_feasible(p.program, wide()), t), want);
  }
}

TEST(Decode, Examples) {
  const auto t = TokenSeq({"a", "b", "c", "d", "e", "f"});
  const auto p = build(t, lm(), {2, 6});
  EXPECT_EQ(decode(p.index.encode({2, 4, 5}), p, t).compressed.str(), "b d e");
  EXPECT_EQ(decode(p.index.encode({1, 2, 3, 4, 5, 6}), p, t).compressed, t);
  auto x = p.index.encode({2, 4, 5});
  x[p.index.delta(2)] = 0.4;
  EXPECT_THROW(decode(x, p, t), DecodeError);
  auto y = p.index.encode({2, 4, 5});
  y[p.index.beta(4, 5)] = 0.0;
  y[p.index.beta(2, 4)] = 1.0;
  EXPECT_THROW(decode(y, p, t), IntegrityError);
  EXPECT_THROW(decode(std::vector<double>(3, 0.0), p, t), DecodeError);
}

TEST(LengthBounds, FromRate) {
  EXPECT_EQ(length_bounds_for_rate(0.7, 10).low, 7u);
  EXPECT_EQ(length_bounds_for_rate(0.7, 10).up, 7u);
  EXPECT_EQ(length_bounds_for_rate(0.7, 12).low, 8u);
  EXPECT_EQ(length_bounds_for_rate(0.7, 12).up, 9u);
  EXPECT_EQ(length_bounds_for_rate(0.1, 5).low, 2u);
  EXPECT_EQ(length_bounds_for_rate(1.0, 9).low, 9u);
  EXPECT_THROW(length_bounds_for_rate(0.0, 5), ConfigError);
  EXPECT_THROW(length_bounds_for_rate(1.5, 5), ConfigError);
}
