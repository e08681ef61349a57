// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any reproducible criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sentcomp/sentcomp.hpp"

using namespace sentcomp;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string data(const std::string& rel) { return std::string(SENTCOMP_DATA_DIR) + "/" + rel; }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("criterion %2d: %s  %s (%s)\n", id, o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const NgramModel& lm() {
  static const NgramModel m = train(read_corpus(data("corpus/lm.txt")));
  return m;
}

// At most 14 binaries and 8 rows, always feasible.
BinaryLinearProgram oracle_instance(int k) {
  RandomInstanceSpec spec;
  spec.vars = 4 + k % 11;
  spec.rows = 1 + k % 8;
  return random_binary_program(spec, 5000 + k);
}

Outcome fscore_example() {
  const auto ref = tokenize("The aim is to give councils control over the growth of homes .");
  const auto cand = tokenize("aim is to give councils some control .");
  const auto t0 = Clock::now();
  const auto r = fscore(cand, ref);
  const double ms = 1e3 * seconds_since(t0);
  const bool ok = r.A == 7 && r.B == 6 && r.C == 1 && std::abs(100 * r.P - 87.5) <= 0.1 &&
                  std::abs(100 * r.R - 53.8) <= 0.1 && std::abs(100 * r.F - 66.7) <= 0.1 && ms < 1.0;
  return {ok, fmt("A=%zu B=%zu C=%zu P=%.2f%% R=%.2f%% F1=%.2f%%, %.4f ms", r.A, r.B, r.C, 100 * r.P, 100 * r.R,
                  100 * r.F, ms)};
}

Outcome variable_count() {
  std::size_t bad = 0;
  for (std::size_t n = 1; n <= 30; ++n) {
    std::vector<std::string> w(n, "word");
    const auto p = build(TokenSeq(w), lm(), {1, n}, nullptr, {}, BuildOptions{ScoreKind::log, false});
    if (p.program.num_vars() != (n * n * n + 3 * n * n + 14 * n) / 6) ++bad;
  }
  return {bad == 0, fmt("%zu of 30 sizes differ from (n^3+3n^2+14n)/6", bad)};
}

Outcome bijection() {
  std::size_t cases = 0, bad = 0;
  for (std::size_t n = 2; n <= 8; ++n) {
    std::vector<std::string> w;
    for (std::size_t i = 0; i < n; ++i) w.push_back("w" + std::to_string(i % 4));
    const TokenSeq t(w);
    for (std::size_t lo = 2; lo <= n; ++lo)
      for (std::size_t up = lo; up <= n; ++up) {
        ++cases;
        const auto p = build(t, lm(), {lo, up});
        std::set<std::vector<std::size_t>> got;
        std::size_t points = 0;
        for (const auto& x : enumerate_feasible(p.program, EnumerateOptions{400})) {
          ++points;
          got.insert(decode(x, p, t).selected);
        }
        std::set<std::vector<std::size_t>> want;
        for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
          std::vector<std::size_t> s;
          for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) s.push_back(i + 1);
          if (s.size() >= lo && s.size() <= up) want.insert(s);
        }
        if (got != want || points != got.size()) ++bad;
      }
  }
  return {bad == 0, fmt("%zu windows checked, %zu mismatched", cases, bad)};
}

Outcome solver_soundness() {
  const auto t0 = Clock::now();
  std::size_t agree = 0, consistent = 0;
  for (int k = 0; k < 100; ++k) {
    const auto bp = oracle_instance(k);
    const double truth = best_enumerated_value(bp, enumerate_feasible(bp));
    std::vector<double> values;
    for (std::size_t s : {1u, 2u, 4u}) {
      SolverConfig cfg;
      cfg.workers = s;
      cfg.eps4 = 1e-5;
      cfg.seed = static_cast<std::uint64_t>(k);
      values.push_back(solve(bp, cfg).incumbent.value);
    }
    if (std::abs(values[0] - truth) <= 1e-9) ++agree;
    if (values[0] == values[1] && values[1] == values[2]) ++consistent;
  }
  const double secs = seconds_since(t0);
  return {agree == 100 && consistent == 100 && secs < 60.0,
          fmt("%zu/100 optimal, %zu/100 equal across s=1,2,4, %.2f s", agree, consistent, secs)};
}

Outcome dca_descent() {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t runs = 0, monotone = 0, terminated = 0, max_iters = 0;
  for (int k = 0; k < 100; ++k) {
    const auto bp = oracle_instance(k);
    for (auto kind : {PenaltyKind::p1, PenaltyKind::p2}) {
      DcaConfig cfg;
      cfg.penalty = kind;
      std::vector<double> x0(bp.num_vars());
      for (auto& v : x0) v = unit(rng);
      const auto r = dca(bp, cfg, x0);
      ++runs;
      bool mono = true;
      for (std::size_t i = 1; i < r.trajectory.size(); ++i)
        mono = mono && r.trajectory[i].value <= r.trajectory[i - 1].value + 1e-9;
      monotone += mono;
      terminated += r.converged && r.iterations < cfg.max_iters;
      max_iters = std::max(max_iters, r.iterations);
    }
  }
  return {monotone == runs && terminated == runs,
          fmt("%zu runs, %zu non-increasing, %zu stopped before the cap, longest %zu iterations", runs, monotone,
              terminated, max_iters)};
}

Outcome hand_traced() {
  BinaryLinearProgram bp;
  bp.add_var(-1.0);
  bp.add_var(0.0);
  bp.add_row({{0, 1.0}, {1, 1.0}}, Relation::eq, 1.0);
  DcaConfig cfg;
  cfg.penalty = PenaltyKind::p2;
  cfg.t = 10.0;
  const auto r = dca(bp, cfg, {0.5, 0.5});
  const bool ok = r.x == std::vector<double>{1.0, 0.0} && r.iterations <= 2;
  return {ok, fmt("x = (%g, %g) after %zu iterations", r.x[0], r.x[1], r.iterations)};
}

Outcome groucho() {
  std::vector<std::string> w, t;
  for (const auto& [word, tag] : parse_tagged_line("I/P shot/V an/DT elephant/N in/IN my/P pajamas/N ./SYM")) {
    w.push_back(word);
    t.push_back(tag);
  }
  const TokenSeq tokens(w);
  const auto g = generate_grammar(t, tokens, read_productions_file(data("grammar/groucho.cfg")));
  const auto r = parse(g, tokens, ParseMode::all);
  return {r.trees.size() == 2 && !r.truncated, fmt("%zu parses", r.trees.size())};
}

Outcome trunk() {
  const Models m{lm(), train_tagger(read_tagged_corpus(data("corpus/tagged.txt"))), default_templates()};
  PipelineConfig cfg;
  cfg.model = ModelKind::hybrid;
  cfg.rate = 0.7;
  const auto o = compress("This is an example to test sentence compression with MIP model .", m, cfg);
  const auto fixed = sentence_trunk(o.fixing, o.original);
  const std::string want = "This is an example to test sentence compression .";
  std::size_t j = 0;
  for (std::size_t i = 0; i < o.result.compressed.size() && j < fixed.size(); ++i)
    if (o.result.compressed[i] == fixed[j]) ++j;
  const bool ok = fixed.str() == want && j == fixed.size();
  return {ok, "fixed: \"" + fixed.str() + "\", output: \"" + o.result.compressed.str() + "\""};
}

Outcome desk_speed() {
  const Models m{lm(), train_tagger(read_tagged_corpus(data("corpus/tagged.txt"))), default_templates()};
  const std::vector<std::string> sentences{
      "The company said that the software products will reach many users in the city by the end of June .",
      "The man saw the dog with the telescope in the park near the river on a cold morning .",
      "Researchers proposed a hybrid model for sentence compression with parse trees and language models .",
      "The police arrested the man in the car after a long chase through the streets of the town .",
      "Students learn computer science at school and write programs for the company during the summer .",
  };
  double worst = 0.0;
  std::size_t runs = 0, longest = 0;
  for (const auto& s : sentences) {
    longest = std::max(longest, tokenize(s).size());
    for (double rate : {0.5, 0.7, 0.9}) {
      PipelineConfig cfg;
      cfg.model = ModelKind::hybrid;
      cfg.rate = rate;
      cfg.solver.workers = 2;
      cfg.solver.dca.penalty = PenaltyKind::p2;
      const auto t0 = Clock::now();
      try {
        compress(s, m, cfg);
      } catch (const InfeasibleError&) {
        // a rate below the trunk length; the diagnosis still counts as a run
      }
      worst = std::max(worst, seconds_since(t0));
      ++runs;
    }
  }
  return {worst < 10.0 && longest <= 20, fmt("%zu runs on sentences of up to %zu tokens, slowest %.3f s", runs, longest, worst)};
}

}  // namespace

int main() {
  report(1, "F-score worked example", fscore_example);
  report(2, "variable count formula, n = 1..30", variable_count);
  report(3, "feasible set equals subsequences, n <= 8", bijection);
  report(4, "PDCABB optimum on 100 random instances", solver_soundness);
  report(5, "DCA descent and finite termination", dca_descent);
  report(6, "hand-traced DCA example", hand_traced);
  report(7, "Groucho sentence has exactly 2 parses", groucho);
  report(8, "sentence trunk fixed and kept", trunk);
  report(9, "20-word hybrid compression under 10 s", desk_speed);
  std::printf("criterion 10: NOT REPRODUCIBLE  corpus-level F-scores and timings need the Penn Treebank and the "
              "compression corpora; run `sentcomp evaluate` on them for the same report columns\n");
  return failures == 0 ? 0 : 1;
}
