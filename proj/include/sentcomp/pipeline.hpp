#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <sstream>
#include <ostream>
#include <string>
#include <vector>

#include "sentcomp/cfg_parser.hpp"
#include "sentcomp/compression_rules.hpp"
#include "sentcomp/error.hpp"
#include "sentcomp/eval_fscore.hpp"
#include "sentcomp/ilp_builder.hpp"
#include "sentcomp/ngram_lm.hpp"
#include "sentcomp/pdcabb.hpp"
#include "sentcomp/pos_tagger.hpp"
#include "sentcomp/random_instance.hpp"
#include "sentcomp/tokens.hpp"

namespace sentcomp {

enum class ModelKind { prob, hybrid };

inline const char* to_string(ModelKind m) { return m == ModelKind::prob ? "prob" : "hybrid"; }

inline ModelKind parse_model(const std::string& s) {
  if (s == "prob" || s == "P") return ModelKind::prob;
  if (s == "hybrid" || s == "H") return ModelKind::hybrid;
  throw ConfigError("unknown model '" + s + "' (expected prob or hybrid)");
}

inline ScoreKind parse_score(const std::string& s) {
  if (s == "log") return ScoreKind::log;
  if (s == "raw") return ScoreKind::raw;
  throw ConfigError("unknown score scale '" + s + "' (expected log or raw)");
}

inline const std::string kParseFallback = "no complete parse; solved with the probabilistic model";

struct PipelineConfig {
  ModelKind model = ModelKind::hybrid;
  double rate = 0.7;
  ScoreKind score = ScoreKind::log;
  SolverConfig solver;
  bool skip_presolve = true;

  void validate() const {
    if (!(rate > 0.0 && rate <= 1.0)) throw ConfigError("compression rate must lie in (0,1]");
    solver.validate();
  }
};

/// Everything the hybrid model reads besides the sentence. The tagger may be
/// absent when every input is pre-tagged.
struct Models {
  NgramModel lm;
  std::optional<TaggerModel> tagger;
  std::vector<Production> templates = default_templates();
};

/// A sentence given as `word/TAG ...` with every tag mappable is taken as
/// pre-tagged; anything else is raw text.
struct SentenceInput {
  TokenSeq tokens;
  std::vector<std::string> tags;  // empty for raw text
};

inline SentenceInput read_sentence(const std::string& text) {
  const auto items = split_ws(text);
  bool tagged = !items.empty();
  std::vector<std::string> words, tags;
  for (const auto& item : items) {
    const auto slash = item.rfind('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == item.size()) {
      tagged = false;
      break;
    }
    auto mapped = map_penn_tag(item.substr(slash + 1));
    if (!mapped) {
      tagged = false;
      break;
    }
    words.push_back(item.substr(0, slash));
    tags.push_back(*mapped);
  }
  if (tagged) return {TokenSeq(std::move(words)), std::move(tags)};
  return {tokenize(text), {}};
}

struct PipelineOutput {
  CompressionResult result;
  TokenSeq original;
  LengthBounds bounds;
  ModelKind model_used = ModelKind::prob;
  std::vector<std::string> tags;
  std::optional<ParseTree> tree;
  DeltaFixing fixing;  // empty unless a parse was used
  double lower_bound = 0.0;
  std::vector<NodeLogEntry> node_log;  // filled when the solver keeps one
};

namespace detail {

inline std::string infeasible_message(std::size_t n, LengthBounds len, const DeltaFixing& df, double rate) {
  const std::size_t ones = count_fixed(df, Fixing::fixed_one);
  const std::size_t zeros = count_fixed(df, Fixing::fixed_zero);
  std::ostringstream msg;
  msg << "no compression of the " << n << "-word sentence fits the length window [" << len.low << "," << len.up
      << "] at rate " << rate;
  if (ones > len.up) {
    msg << ": the grammar keeps " << ones << " words, so raise the rate to at least "
        << std::setprecision(3) << static_cast<double>(ones) / static_cast<double>(n);
  } else if (n - zeros < len.low) {
    msg << ": the grammar deletes " << zeros << " words, so lower the rate";
  } else {
    msg << "; raise the rate";
  }
  return msg.str();
}

}  // namespace detail

/// Builds and solves the model for an already tokenized sentence.
inline PipelineOutput compress(const SentenceInput& in, const Models& models, const PipelineConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  PipelineOutput out;
  out.original = in.tokens;
  const std::size_t n = in.tokens.size();
  if (n < 2) throw InputError("sentence needs at least 2 tokens, got " + std::to_string(n));
  out.bounds = length_bounds_for_rate(cfg.rate, n);

  std::vector<std::string> warnings;
  std::vector<PhraseSpan> spans;
  if (cfg.model == ModelKind::hybrid) {
    if (!in.tags.empty()) {
      out.tags = in.tags;
    } else {
      if (!models.tagger) throw ConfigError("hybrid model needs a tagger model or pre-tagged input");
      out.tags = models.tagger->tag(in.tokens);
    }
    const auto grammar = generate_grammar(out.tags, in.tokens, models.templates);
    auto parsed = parse(grammar, in.tokens, ParseMode::first);
    if (parsed.parsed()) {
      out.tree = std::move(parsed.trees.front());
      out.fixing = fix_deltas(label_tree(*out.tree));
      spans = phrase_spans(*out.tree);
      out.model_used = ModelKind::hybrid;
    } else {
      warnings.push_back(kParseFallback);
    }
  }

  BuildOptions bo;
  bo.score = cfg.score;
  bo.skip_presolve = cfg.skip_presolve;
  const DeltaFixing* df = out.fixing.empty() ? nullptr : &out.fixing;
  if (df && count_fixed(out.fixing, Fixing::fixed_one) > out.bounds.up)
    throw InfeasibleError(detail::infeasible_message(n, out.bounds, out.fixing, cfg.rate));
  const auto prob = build(in.tokens, models.lm, out.bounds, df, spans, bo);

  const auto solved = solve(prob.program, cfg.solver);
  if (solved.status != SolveStatus::optimal || !solved.incumbent.present())
    throw InfeasibleError(detail::infeasible_message(n, out.bounds, out.fixing, cfg.rate));
  out.result = decode(*solved.incumbent.x, prob, in.tokens);
  out.result.stats = solved.stats;
  for (auto& w : warnings) out.result.stats.warnings.insert(out.result.stats.warnings.begin(), w);
  out.lower_bound = solved.lower_bound;
  out.node_log = solved.log;
  out.result.stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

inline PipelineOutput compress(const std::string& text, const Models& models, const PipelineConfig& cfg) {
  return compress(read_sentence(text), models, cfg);
}

// ---- evaluation over a gold file

struct GoldPair {
  std::string original;
  std::string reference;
};

struct GoldFile {
  std::vector<GoldPair> rows;
  std::size_t malformed = 0;
};

/// Tab-separated `original<TAB>reference_compression`; an optional header
/// line with those names is skipped. Rows without exactly two nonempty
/// fields are counted as malformed.
inline GoldFile read_gold(std::istream& in) {
  GoldFile g;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      first = false;
      if (line.rfind("original\t", 0) == 0) continue;
    }
    if (split_ws(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      ++g.malformed;
      continue;
    }
    GoldPair p{line.substr(0, tab), line.substr(tab + 1)};
    if (split_ws(p.original).empty() || split_ws(p.reference).empty()) {
      ++g.malformed;
      continue;
    }
    g.rows.push_back(std::move(p));
  }
  if (g.rows.empty()) throw InputError("gold file has no usable rows");
  return g;
}

inline GoldFile read_gold(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open gold file '" + path + "'");
  return read_gold(in);
}

struct SentenceEval {
  std::size_t row = 0;
  ModelKind model = ModelKind::prob;
  double rate = 0.0;
  std::string status;  // ok, fallback, infeasible, rejected
  std::size_t length = 0;
  std::size_t kept = 0;
  EvalReport report;
  double seconds = 0.0;
  std::string compression;
};

struct EvalSummary {
  ModelKind model = ModelKind::prob;
  double rate = 0.0;
  std::size_t sentences = 0;  // scored
  std::size_t failed = 0;     // infeasible or rejected, left out of the means
  std::size_t fallbacks = 0;
  double mean_P = 0.0, mean_R = 0.0, mean_F = 0.0;
  double mean_seconds = 0.0;
  double mean_rate = 0.0;            // achieved compression rate
  double mean_reference_rate = 0.0;  // the reference's own rate
};

struct EvalResult {
  std::vector<SentenceEval> sentences;
  std::vector<EvalSummary> summary;  // one per (model, rate)
  std::size_t malformed = 0;
};

/// Compresses every gold sentence with each model at each rate and scores
/// the output against the reference with F_mu.
inline EvalResult evaluate(const GoldFile& gold, const Models& models, const PipelineConfig& base,
                           const std::vector<ModelKind>& model_list, const std::vector<double>& rates, double mu = 1.0) {
  EvalResult res;
  res.malformed = gold.malformed;
  for (ModelKind m : model_list) {
    for (double rate : rates) {
      PipelineConfig cfg = base;
      cfg.model = m;
      cfg.rate = rate;
      cfg.validate();
      EvalSummary sum{m, rate};
      for (std::size_t r = 0; r < gold.rows.size(); ++r) {
        SentenceEval se;
        se.row = r + 1;
        se.model = m;
        se.rate = rate;
        const auto input = read_sentence(gold.rows[r].original);
        const auto reference = read_sentence(gold.rows[r].reference).tokens;
        se.length = input.tokens.size();
        const auto t0 = std::chrono::steady_clock::now();
        try {
          const auto out = compress(input, models, cfg);
          se.status = m == ModelKind::hybrid && out.model_used == ModelKind::prob ? "fallback" : "ok";
          se.kept = out.result.compressed.size();
          se.compression = out.result.compressed.str();
          se.report = fscore(out.result.compressed, reference, mu);
        } catch (const InfeasibleError&) {
          se.status = "infeasible";
        } catch (const InputError&) {
          se.status = "rejected";
        }
        se.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (se.status == "ok" || se.status == "fallback") {
          ++sum.sentences;
          if (se.status == "fallback") ++sum.fallbacks;
          sum.mean_P += se.report.P;
          sum.mean_R += se.report.R;
          sum.mean_F += se.report.F;
          sum.mean_seconds += se.seconds;
          sum.mean_rate += compression_rate(TokenSeq(split_ws(se.compression)), input.tokens);
          sum.mean_reference_rate += compression_rate(reference, input.tokens);
        } else {
          ++sum.failed;
        }
        res.sentences.push_back(std::move(se));
      }
      if (sum.sentences > 0) {
        const double k = static_cast<double>(sum.sentences);
        sum.mean_P /= k;
        sum.mean_R /= k;
        sum.mean_F /= k;
        sum.mean_seconds /= k;
        sum.mean_rate /= k;
        sum.mean_reference_rate /= k;
      }
      res.summary.push_back(sum);
    }
  }
  return res;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline void write_sentence_csv(std::ostream& out, const EvalResult& r) {
  out << "row,model,rate,status,length,kept,A,B,C,P,R,F,seconds,compression\n";
  for (const auto& s : r.sentences)
    out << s.row << ',' << to_string(s.model) << ',' << s.rate << ',' << s.status << ',' << s.length << ',' << s.kept
        << ',' << s.report.A << ',' << s.report.B << ',' << s.report.C << ',' << s.report.P << ',' << s.report.R << ','
        << s.report.F << ',' << s.seconds << ',' << detail::csv_field(s.compression) << '\n';
}

inline void write_summary(std::ostream& out, const EvalResult& r) {
  out << "model,rate,sentences,failed,fallbacks,mean_P,mean_R,mean_F,mean_seconds,mean_rate,mean_reference_rate\n";
  for (const auto& s : r.summary)
    out << to_string(s.model) << ',' << s.rate << ',' << s.sentences << ',' << s.failed << ',' << s.fallbacks << ','
        << s.mean_P << ',' << s.mean_R << ',' << s.mean_F << ',' << s.mean_seconds << ',' << s.mean_rate << ','
        << s.mean_reference_rate << '\n';
}

// ---- solver benchmark on random instances

struct BenchmarkSpec {
  std::size_t instances = 20;
  RandomInstanceSpec shape;
  std::uint64_t seed = 1;
};

struct BenchmarkRow {
  std::size_t instance = 0;
  double value = 0.0;  // PDCABB f_opt (+inf when infeasible)
  double seconds = 0.0;
  std::size_t nodes = 0;
  std::optional<double> brute;  // only within the enumeration guard
  bool agree = true;
};

inline std::vector<BenchmarkRow> benchmark(const BenchmarkSpec& spec, const SolverConfig& cfg) {
  std::vector<BenchmarkRow> rows;
  for (std::size_t i = 0; i < spec.instances; ++i) {
    const auto bp = random_binary_program(spec.shape, spec.seed + i);
    BenchmarkRow row;
    row.instance = i + 1;
    const auto r = solve(bp, cfg);
    row.value = r.incumbent.value;
    row.seconds = r.stats.wall_seconds;
    row.nodes = r.stats.nodes;
    if (spec.shape.vars <= EnumerateOptions{}.max_binaries) {
      row.brute = best_enumerated_value(bp, enumerate_feasible(bp));
      row.agree = std::isinf(*row.brute) ? std::isinf(row.value)
                                         : std::abs(row.value - *row.brute) <= 1e-6 * (1.0 + std::abs(*row.brute));
    }
    rows.push_back(row);
  }
  return rows;
}

inline void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows) {
  out << "instance,pdcabb,seconds,nodes,brute_force,agree\n";
  for (const auto& r : rows) {
    out << r.instance << ',' << r.value << ',' << r.seconds << ',' << r.nodes << ',';
    if (r.brute) out << *r.brute;
    out << ',' << (r.brute ? (r.agree ? "yes" : "no") : "n/a") << '\n';
  }
}

}  // namespace sentcomp
