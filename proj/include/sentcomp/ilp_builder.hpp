#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sentcomp/binary_lp.hpp"
#include "sentcomp/compression_rules.hpp"
#include "sentcomp/error.hpp"
#include "sentcomp/ngram_lm.hpp"
#include "sentcomp/solver_stats.hpp"
#include "sentcomp/tokens.hpp"

namespace sentcomp {

/// Closed-form variable count of the full model (choice, start, end and
/// trigram variables) for an n-word sentence.
constexpr std::size_t full_variable_count(std::size_t n) { return (n * n * n + 3 * n * n + 14 * n) / 6; }

/// Flat positions of the choice (delta), start (alpha), end-pair (beta) and
/// trigram (gamma) variables. Index 0 stands for the start token in the
/// first slot of beta and gamma. Alpha is absent when eliminated.
class CompressionIndexing {
 public:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  CompressionIndexing() = default;
  CompressionIndexing(std::size_t n, bool explicit_alpha) : n_(n), explicit_alpha_(explicit_alpha) {
    std::size_t next = 0;
    delta_.resize(n + 1, kNone);
    for (std::size_t i = 1; i <= n; ++i) delta_[i] = next++;
    alpha_.assign(n + 1, kNone);
    if (explicit_alpha)
      for (std::size_t i = 1; i <= n; ++i) alpha_[i] = next++;
    beta_.assign((n + 1) * (n + 1), kNone);
    for (std::size_t i = 0; i + 1 <= n; ++i)
      for (std::size_t j = i + 1; j <= n; ++j) beta_[i * (n + 1) + j] = next++;
    gamma_.assign((n + 1) * (n + 1) * (n + 1), kNone);
    for (std::size_t i = 0; i + 2 <= n; ++i)
      for (std::size_t j = i + 1; j + 1 <= n; ++j)
        for (std::size_t k = j + 1; k <= n; ++k) gamma_[(i * (n + 1) + j) * (n + 1) + k] = next++;
    total_ = next;
  }

  std::size_t n() const { return n_; }
  bool explicit_alpha() const { return explicit_alpha_; }
  std::size_t size() const { return total_; }

  std::size_t delta(std::size_t i) const { return delta_.at(i); }
  std::size_t alpha(std::size_t i) const { return alpha_.at(i); }
  std::size_t beta(std::size_t i, std::size_t j) const {
    if (i >= j || j > n_) return kNone;
    return beta_[i * (n_ + 1) + j];
  }
  std::size_t gamma(std::size_t i, std::size_t j, std::size_t k) const {
    if (!(i < j && j < k && k <= n_)) return kNone;
    return gamma_[(i * (n_ + 1) + j) * (n_ + 1) + k];
  }

  template <class Fn>
  void for_each_beta(Fn&& fn) const {
    for (std::size_t i = 0; i + 1 <= n_; ++i)
      for (std::size_t j = i + 1; j <= n_; ++j) fn(i, j, beta(i, j));
  }
  template <class Fn>
  void for_each_gamma(Fn&& fn) const {
    for (std::size_t i = 0; i + 2 <= n_; ++i)
      for (std::size_t j = i + 1; j + 1 <= n_; ++j)
        for (std::size_t k = j + 1; k <= n_; ++k) fn(i, j, k, gamma(i, j, k));
  }

  /// The 0/1 vector encoding a subsequence of 1-based word positions
  /// (ascending, nonempty).
  std::vector<double> encode(const std::vector<std::size_t>& selected) const {
    if (selected.empty()) throw ConfigError("cannot encode an empty compression");
    std::vector<double> x(total_, 0.0);
    for (std::size_t t = 0; t < selected.size(); ++t) {
      const std::size_t s = selected[t];
      if (s < 1 || s > n_ || (t > 0 && selected[t - 1] >= s)) throw ConfigError("selection must be ascending in [1,n]");
      x[delta(s)] = 1.0;
    }
    if (explicit_alpha_) x[alpha(selected.front())] = 1.0;
    // Trigrams over the sequence start, s1, s2, ..., sm.
    std::vector<std::size_t> padded{0};
    padded.insert(padded.end(), selected.begin(), selected.end());
    for (std::size_t t = 0; t + 2 < padded.size(); ++t) x[gamma(padded[t], padded[t + 1], padded[t + 2])] = 1.0;
    x[beta(padded[padded.size() - 2], padded.back())] = 1.0;
    return x;
  }

 private:
  std::size_t n_ = 0;
  bool explicit_alpha_ = false;
  std::size_t total_ = 0;
  std::vector<std::size_t> delta_, alpha_, beta_, gamma_;
};

enum class ScoreKind { log, raw };

struct LengthBounds {
  std::size_t low = 2;
  std::size_t up = 2;
};

/// Length window for a target compression rate r in (0,1]:
/// low = max(2, floor(r n)), up = max(low, ceil(r n)), both capped at n.
inline LengthBounds length_bounds_for_rate(double rate, std::size_t n) {
  if (!(rate > 0.0 && rate <= 1.0)) throw ConfigError("compression rate must lie in (0,1]");
  const double target = rate * static_cast<double>(n);
  // Absorb representation error such as 0.7 * 10 = 7.000000000000001.
  const double snapped = std::abs(target - std::round(target)) < 1e-9 ? std::round(target) : target;
  std::size_t low = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(snapped)));
  std::size_t up = std::max(low, static_cast<std::size_t>(std::ceil(snapped)));
  low = std::min(low, n);
  up = std::min(up, n);
  return {low, up};
}

struct BuildOptions {
  ScoreKind score = ScoreKind::log;
  bool eliminate_alpha = true;
  // Zero out context variables that would skip over a word fixed to 1.
  bool skip_presolve = true;
};

struct CompressionProblem {
  BinaryLinearProgram program;
  CompressionIndexing index;
};

/// Per-term scores read from the language model.
class TermScores {
 public:
  TermScores(const TokenSeq& tokens, const NgramModel& lm, ScoreKind kind) : tokens_(tokens), lm_(lm), kind_(kind) {}

  double start(std::size_t i) const { return value(lm_.prob_start(tokens_.word(i))); }
  double trigram(std::size_t i, std::size_t j, std::size_t k) const {
    return value(lm_.prob_trigram(tokens_.word(i), tokens_.word(j), tokens_.word(k)));
  }
  double end(std::size_t i, std::size_t j) const { return value(lm_.prob_end(tokens_.word(i), tokens_.word(j))); }

  /// Total score of a subsequence, computed term by term.
  double of(const std::vector<std::size_t>& selected) const {
    std::vector<std::size_t> padded{0};
    padded.insert(padded.end(), selected.begin(), selected.end());
    double s = start(selected.front());
    for (std::size_t t = 0; t + 2 < padded.size(); ++t) s += trigram(padded[t], padded[t + 1], padded[t + 2]);
    return s + end(padded[padded.size() - 2], padded.back());
  }

 private:
  double value(double p) const { return kind_ == ScoreKind::log ? std::log(p) : p; }

  const TokenSeq& tokens_;
  const NgramModel& lm_;
  ScoreKind kind_;
};

/// Builds the compression ILP in minimization form (c = -score).
///
/// Rows: exactly one start word; every chosen word is the middle of a chosen
/// trigram or the first of a chosen end pair; every chosen word is followed
/// by two words, or ends or closes the sentence; exactly one end pair; the
/// length window; PP/SBAR phrase rows. With alpha eliminated, alpha_k is
/// replaced by delta_k - sum gamma_{..k} and kept nonnegative by a row.
inline CompressionProblem build(const TokenSeq& tokens, const NgramModel& lm, LengthBounds len,
                                const DeltaFixing* fixing = nullptr, const std::vector<PhraseSpan>& phrases = {},
                                BuildOptions opt = {}) {
  const std::size_t n = tokens.size();
  if (n == 0) throw ConfigError("cannot build a model for an empty sentence");
  if (len.low < 1 || len.low > n) throw ConfigError("lower length bound must lie in [1,n]");
  if (len.up < len.low || len.up > n) throw ConfigError("upper length bound must lie in [lower,n]");
  if (fixing && fixing->size() != n) throw ConfigError("fixing length differs from sentence length");

  CompressionIndexing idx(n, !opt.eliminate_alpha);
  BinaryLinearProgram bp;
  bp.c.assign(idx.size(), 0.0);
  bp.lb.assign(idx.size(), 0.0);
  bp.ub.assign(idx.size(), 1.0);
  bp.binary_mask.assign(idx.size(), true);
  bp.names.assign(idx.size(), {});

  const TermScores score(tokens, lm, opt.score);
  std::vector<double> start_score(n + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    start_score[i] = score.start(i);
    bp.names[idx.delta(i)] = "d" + std::to_string(i);
    if (opt.eliminate_alpha) {
      bp.c[idx.delta(i)] = -start_score[i];
    } else {
      bp.names[idx.alpha(i)] = "a" + std::to_string(i);
      bp.c[idx.alpha(i)] = -start_score[i];
    }
  }
  idx.for_each_beta([&](std::size_t i, std::size_t j, std::size_t v) {
    bp.names[v] = "b" + std::to_string(i) + "_" + std::to_string(j);
    bp.c[v] = -score.end(i, j);
  });
  idx.for_each_gamma([&](std::size_t i, std::size_t j, std::size_t k, std::size_t v) {
    bp.names[v] = "g" + std::to_string(i) + "_" + std::to_string(j) + "_" + std::to_string(k);
    bp.c[v] = -score.trigram(i, j, k) + (opt.eliminate_alpha ? start_score[k] : 0.0);
  });

  // Exactly one start word.
  {
    std::vector<Term> t;
    if (opt.eliminate_alpha) {
      for (std::size_t k = 1; k <= n; ++k) t.push_back({idx.delta(k), 1.0});
      idx.for_each_gamma([&](std::size_t, std::size_t, std::size_t, std::size_t v) { t.push_back({v, -1.0}); });
    } else {
      for (std::size_t k = 1; k <= n; ++k) t.push_back({idx.alpha(k), 1.0});
    }
    bp.add_row(std::move(t), Relation::eq, 1.0, "start");
  }
  // A chosen word starts the compression or closes a trigram.
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<Term> t{{idx.delta(k), 1.0}};
    if (!opt.eliminate_alpha) t.push_back({idx.alpha(k), -1.0});
    for (std::size_t i = 0; i + 2 <= k; ++i)
      for (std::size_t j = i + 1; j < k; ++j) t.push_back({idx.gamma(i, j, k), -1.0});
    if (opt.eliminate_alpha) bp.add_row(std::move(t), Relation::ge, 0.0, "alpha" + std::to_string(k));
    else bp.add_row(std::move(t), Relation::eq, 0.0, "pre" + std::to_string(k));
  }
  // A chosen word sits in the middle of a trigram or opens the end pair.
  for (std::size_t j = 1; j <= n; ++j) {
    std::vector<Term> t{{idx.delta(j), 1.0}};
    for (std::size_t i = 0; i < j; ++i)
      for (std::size_t k = j + 1; k <= n; ++k) t.push_back({idx.gamma(i, j, k), -1.0});
    for (std::size_t i = 0; i < j; ++i) t.push_back({idx.beta(i, j), -1.0});
    bp.add_row(std::move(t), Relation::eq, 0.0, "mid" + std::to_string(j));
  }
  // A chosen word is followed by two words, or by one word and the end.
  for (std::size_t i = 1; i <= n; ++i) {
    std::vector<Term> t{{idx.delta(i), 1.0}};
    for (std::size_t j = i + 1; j + 1 <= n; ++j)
      for (std::size_t k = j + 1; k <= n; ++k) t.push_back({idx.gamma(i, j, k), -1.0});
    for (std::size_t j = i + 1; j <= n; ++j) t.push_back({idx.beta(i, j), -1.0});
    for (std::size_t h = 0; h < i; ++h) t.push_back({idx.beta(h, i), -1.0});
    bp.add_row(std::move(t), Relation::eq, 0.0, "post" + std::to_string(i));
  }
  // Exactly one end pair.
  {
    std::vector<Term> t;
    idx.for_each_beta([&](std::size_t, std::size_t, std::size_t v) { t.push_back({v, 1.0}); });
    bp.add_row(std::move(t), Relation::eq, 1.0, "end");
  }
  // Length window.
  {
    std::vector<Term> t;
    for (std::size_t i = 1; i <= n; ++i) t.push_back({idx.delta(i), 1.0});
    bp.add_row(t, Relation::ge, static_cast<double>(len.low), "len_lo");
    bp.add_row(std::move(t), Relation::le, static_cast<double>(len.up), "len_up");
  }
  // Phrases: the introducing word is kept iff some other word of the phrase is.
  for (std::size_t p = 0; p < phrases.size(); ++p) {
    const auto& ph = phrases[p];
    if (ph.intro < 1 || ph.intro > n) throw ConfigError("phrase intro outside the sentence");
    std::vector<Term> t{{idx.delta(ph.intro), -1.0}};
    for (std::size_t j : ph.members) {
      if (j < 1 || j > n || j == ph.intro) throw ConfigError("phrase member outside the sentence");
      t.push_back({idx.delta(j), 1.0});
    }
    if (ph.members.empty()) continue;
    bp.add_row(std::move(t), Relation::ge, 0.0, "phrase" + std::to_string(p));
    for (std::size_t j : ph.members)
      bp.add_row({{idx.delta(ph.intro), 1.0}, {idx.delta(j), -1.0}}, Relation::ge, 0.0,
                 "phrase" + std::to_string(p) + "_" + std::to_string(j));
  }

  if (fixing) {
    std::vector<bool> zero(n + 1, false), one(n + 1, false);
    for (std::size_t i = 1; i <= n; ++i) {
      const Fixing f = (*fixing)[i - 1];
      const std::size_t v = idx.delta(i);
      if (f == Fixing::fixed_one) {
        bp.lb[v] = bp.ub[v] = 1.0;
        one[i] = true;
      } else if (f == Fixing::fixed_zero) {
        bp.lb[v] = bp.ub[v] = 0.0;
        zero[i] = true;
      }
    }
    // Prefix counts of words fixed to 1, to test "some fixed word in (a,b)".
    std::vector<std::size_t> ones(n + 2, 0);
    for (std::size_t i = 1; i <= n; ++i) ones[i] = ones[i - 1] + (one[i] ? 1 : 0);
    auto skips = [&](std::size_t a, std::size_t b) { return b > a + 1 && ones[b - 1] - ones[a] > 0; };
    auto fix0 = [&](std::size_t v) { bp.lb[v] = bp.ub[v] = 0.0; };
    idx.for_each_beta([&](std::size_t i, std::size_t j, std::size_t v) {
      if (zero[i] || zero[j]) fix0(v);
      else if (opt.skip_presolve && (skips(i, j) || ones[n] - ones[j] > 0)) fix0(v);
    });
    idx.for_each_gamma([&](std::size_t i, std::size_t j, std::size_t k, std::size_t v) {
      if (zero[i] || zero[j] || zero[k]) fix0(v);
      else if (opt.skip_presolve && (skips(i, j) || skips(j, k))) fix0(v);
    });
    if (opt.eliminate_alpha == false) {
      // A start word cannot follow a word fixed to 1.
      for (std::size_t i = 1; i <= n; ++i)
        if (zero[i] || (opt.skip_presolve && ones[i - 1] > 0)) fix0(idx.alpha(i));
    }
  }
  return {std::move(bp), std::move(idx)};
}

struct CompressionResult {
  std::vector<std::size_t> selected;  // 1-based, ascending
  TokenSeq compressed;
  double score = 0.0;  // maximized objective, i.e. -c^T x
  SolverStats stats;
};

/// Reads a solver point back as a compression and checks that the context
/// variables are exactly the encoding of the chosen words.
inline CompressionResult decode(const std::vector<double>& x, const CompressionProblem& prob, const TokenSeq& tokens) {
  const auto& idx = prob.index;
  if (x.size() != idx.size()) throw DecodeError("solution length does not match the model");
  if (tokens.size() != idx.n()) throw DecodeError("sentence length does not match the model");
  for (std::size_t v = 0; v < x.size(); ++v)
    if (prob.program.binary_mask[v] && std::min(std::abs(x[v]), std::abs(1.0 - x[v])) > kBinaryTolerance)
      throw DecodeError("coordinate " + prob.program.var_name(v) + " = " + std::to_string(x[v]) + " is not binary");
  CompressionResult r;
  for (std::size_t i = 1; i <= idx.n(); ++i)
    if (x[idx.delta(i)] > 0.5) r.selected.push_back(i);
  if (r.selected.empty()) throw IntegrityError("no word selected");
  const auto expect = idx.encode(r.selected);
  for (std::size_t v = 0; v < x.size(); ++v)
    if ((x[v] > 0.5) != (expect[v] > 0.5))
      throw IntegrityError("context variable " + prob.program.var_name(v) + " disagrees with the chosen words");
  std::vector<std::string> words;
  for (std::size_t i : r.selected) words.push_back(tokens[i - 1]);
  r.compressed = TokenSeq(std::move(words));
  r.score = -prob.program.objective(snap_binary(prob.program, x));
  return r;
}

}  // namespace sentcomp
