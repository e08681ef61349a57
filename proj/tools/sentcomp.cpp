// Command-line front end: model training, tagging, parsing, compression,
// evaluation against a gold file and a solver benchmark.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "sentcomp/sentcomp.hpp"

using namespace sentcomp;

namespace {

constexpr int kExitInfeasible = 2;
constexpr int kExitInput = 3;

// Flags shared by compress, evaluate and benchmark.
struct SolverFlags {
  std::string penalty = "p2";
  std::size_t workers = 1;
  double t = 1e5;
  double eps4 = 1e-5;
  std::uint64_t seed = 1;
  std::string node_select = "best";
  std::string branch = "half";
  bool increase_t = false;

  void add(CLI::App* cmd, bool with_seed = true) {
    cmd->add_option("--penalty", penalty, "penalty function: p1, p2 or p3")->capture_default_str();
    cmd->add_option("--workers", workers, "nodes processed in parallel per round")->capture_default_str();
    cmd->add_option("--t", t, "initial penalty weight")->capture_default_str();
    cmd->add_option("--eps4", eps4, "branching gap tolerance")->capture_default_str();
    if (with_seed) cmd->add_option("--seed", seed, "seed for the random DCA starts")->capture_default_str();
    cmd->add_option("--node-select", node_select, "best or depth")->capture_default_str();
    cmd->add_option("--branch", branch, "half, infeas or cost")->capture_default_str();
    cmd->add_flag("--increase-t", increase_t, "raise t tenfold while the DCA point is not binary");
  }

  SolverConfig config() const {
    SolverConfig c;
    c.workers = workers;
    c.eps4 = eps4;
    c.seed = seed;
    c.node_select = parse_node_select(node_select);
    c.branching = parse_branch_rule(branch);
    c.dca.penalty = parse_penalty(penalty);
    c.dca.t = t;
    c.dca.increase_t = increase_t;
    c.validate();
    return c;
  }
};

// Model files read by compress and evaluate.
struct ModelFlags {
  std::string lm;
  std::string tagger;
  std::string grammar;
  std::string score = "log";

  void add(CLI::App* cmd) {
    cmd->add_option("--lm", lm, "language model file (train-lm output)")->required();
    cmd->add_option("--tagger", tagger, "tagger model file; not needed for pre-tagged input");
    cmd->add_option("--grammar", grammar, "grammar file; default is the built-in statement grammar");
    cmd->add_option("--score", score, "log or raw probabilities in the objective")->capture_default_str();
  }

  Models load() const {
    Models m{NgramModel::load(lm), std::nullopt, default_templates()};
    if (!tagger.empty()) m.tagger = TaggerModel::load(tagger);
    if (!grammar.empty()) m.templates = read_productions_file(grammar);
    return m;
  }
};

void print_stats(std::ostream& out, const PipelineOutput& o) {
  const auto& s = o.result.stats;
  out << "model used: " << to_string(o.model_used) << "\n"
      << "length window: [" << o.bounds.low << "," << o.bounds.up << "]\n";
  if (o.tree) out << "parse: " << o.tree->bracketed() << "\n";
  if (!o.fixing.empty())
    out << "fixed to 1: " << count_fixed(o.fixing, Fixing::fixed_one)
        << ", fixed to 0: " << count_fixed(o.fixing, Fixing::fixed_zero) << "\n";
  out << "score: " << o.result.score << "\n"
      << "nodes: " << s.nodes << ", branched: " << s.branched << ", pruned: " << s.pruned << "\n"
      << "dca runs: " << s.dca_runs << ", dca restarts: " << s.dca_restarts << ", lp solves: " << s.lp_solves << "\n"
      << "incumbent updates: " << s.incumbent_updates << "\n"
      << "seconds: " << s.wall_seconds << "\n";
  for (const auto& w : s.warnings) out << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sentence compression with a hybrid ILP and parse-tree model"};
  app.require_subcommand(1);

  // train-lm
  std::string corpus, out_path;
  double discount = kDefaultDiscount;
  auto* train_lm = app.add_subcommand("train-lm", "train the trigram language model");
  train_lm->add_option("--corpus", corpus, "text file, one sentence per line")->required();
  train_lm->add_option("--out", out_path, "model file to write")->required();
  train_lm->add_option("--discount", discount, "absolute discount")->capture_default_str();

  // train-tagger
  auto* train_tag = app.add_subcommand("train-tagger", "train the part-of-speech tagger");
  train_tag->add_option("--corpus", corpus, "word/TAG file, one sentence per line")->required();
  train_tag->add_option("--out", out_path, "model file to write")->required();

  // tag
  std::string tagger_path, text, grammar_path;
  auto* tag_cmd = app.add_subcommand("tag", "tag a sentence");
  tag_cmd->add_option("--tagger", tagger_path, "tagger model file")->required();
  tag_cmd->add_option("--text", text, "sentence")->required();

  // parse
  bool all_parses = false;
  auto* parse_cmd = app.add_subcommand("parse", "parse a sentence");
  parse_cmd->add_option("--grammar", grammar_path, "grammar file; default is the built-in statement grammar");
  parse_cmd->add_option("--tagger", tagger_path, "tagger model file; not needed for pre-tagged input");
  parse_cmd->add_option("--text", text, "sentence, raw or word/TAG")->required();
  parse_cmd->add_flag("--all", all_parses, "list every parse (up to the ambiguity cap)");

  // compress
  ModelFlags models;
  SolverFlags solver;
  double rate = 0.7;
  std::string model = "hybrid";
  bool stats = false;
  std::string node_log;
  auto* compress_cmd = app.add_subcommand("compress", "compress one sentence");
  models.add(compress_cmd);
  solver.add(compress_cmd);
  compress_cmd->add_option("--text", text, "sentence, raw or word/TAG")->required();
  compress_cmd->add_option("--rate", rate, "target compression rate in (0,1]")->capture_default_str();
  compress_cmd->add_option("--model", model, "prob or hybrid")->capture_default_str();
  compress_cmd->add_flag("--stats", stats, "print solver statistics to stderr");
  compress_cmd->add_option("--node-log", node_log, "write the branch-and-bound node log as CSV");

  // evaluate
  std::string gold, csv_path;
  std::vector<double> rates{0.5, 0.7, 0.9};
  std::vector<std::string> model_names{"prob", "hybrid"};
  double mu = 1.0;
  auto* eval_cmd = app.add_subcommand("evaluate", "compress a gold file and report F-scores");
  models.add(eval_cmd);
  solver.add(eval_cmd);
  eval_cmd->add_option("--gold", gold, "TSV: original, reference_compression")->required();
  eval_cmd->add_option("--rate", rates, "one or more rates")->delimiter(',')->capture_default_str();
  eval_cmd->add_option("--model", model_names, "one or more of prob, hybrid")->delimiter(',')->capture_default_str();
  eval_cmd->add_option("--mu", mu, "F-score preference parameter")->capture_default_str();
  eval_cmd->add_option("--csv", csv_path, "write per-sentence results as CSV");

  // benchmark
  BenchmarkSpec bench;
  auto* bench_cmd = app.add_subcommand("benchmark", "solve random binary programs and compare with brute force");
  solver.add(bench_cmd, false);
  bench_cmd->add_option("--instances", bench.instances, "number of instances")->capture_default_str();
  bench_cmd->add_option("--vars", bench.shape.vars, "binary variables per instance")->capture_default_str();
  bench_cmd->add_option("--rows", bench.shape.rows, "rows per instance")->capture_default_str();
  bench_cmd->add_option("--density", bench.shape.density, "chance a variable appears in a row")->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "seed of the first instance")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (*train_lm) {
      const auto sentences = read_corpus(corpus);
      const auto lm = train(sentences, discount);
      lm.save(out_path);
      std::cerr << "trained on " << sentences.size() << " sentences, vocabulary " << lm.vocabulary_size() << "\n";
    } else if (*train_tag) {
      const auto m = train_tagger(read_tagged_corpus(corpus));
      m.save(out_path);
      std::cerr << "trained on " << m.trained_tokens() << " tokens";
      if (m.skipped_tokens() > 0) std::cerr << ", skipped " << m.skipped_tokens() << " with unmapped tags";
      std::cerr << "\n";
    } else if (*tag_cmd) {
      const auto m = TaggerModel::load(tagger_path);
      const auto tokens = tokenize(text);
      const auto tags = m.tag(tokens);
      for (std::size_t i = 0; i < tokens.size(); ++i) std::cout << (i ? " " : "") << tokens[i] << '/' << tags[i];
      std::cout << "\n";
    } else if (*parse_cmd) {
      auto input = read_sentence(text);
      if (input.tags.empty()) {
        if (tagger_path.empty()) throw ConfigError("raw text needs --tagger");
        input.tags = TaggerModel::load(tagger_path).tag(input.tokens);
      }
      const auto templates = grammar_path.empty() ? default_templates() : read_productions_file(grammar_path);
      const auto g = generate_grammar(input.tags, input.tokens, templates);
      const auto r = parse(g, input.tokens, all_parses ? ParseMode::all : ParseMode::first);
      for (const auto& t : r.trees) std::cout << t.bracketed() << "\n";
      if (!r.parsed()) std::cerr << "no complete parse\n";
      if (r.truncated) std::cerr << "parse list truncated at " << kAmbiguityCap << "\n";
    } else if (*compress_cmd) {
      PipelineConfig cfg;
      cfg.model = parse_model(model);
      cfg.rate = rate;
      cfg.score = parse_score(models.score);
      cfg.solver = solver.config();
      cfg.solver.keep_log = !node_log.empty();
      const auto m = models.load();
      const auto o = compress(text, m, cfg);
      std::cout << o.result.compressed.str() << "\n";
      if (stats) print_stats(std::cerr, o);
      if (!node_log.empty()) {
        std::ofstream out(node_log);
        if (!out) throw InputError("cannot write '" + node_log + "'");
        write_node_log(out, o.node_log);
      }
    } else if (*eval_cmd) {
      PipelineConfig cfg;
      cfg.score = parse_score(models.score);
      cfg.solver = solver.config();
      std::vector<ModelKind> kinds;
      for (const auto& name : model_names) kinds.push_back(parse_model(name));
      const auto m = models.load();
      const auto g = read_gold(gold);
      const auto r = evaluate(g, m, cfg, kinds, rates, mu);
      write_summary(std::cout, r);
      if (r.malformed > 0) std::cerr << "skipped " << r.malformed << " malformed rows\n";
      if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out) throw InputError("cannot write '" + csv_path + "'");
        write_sentence_csv(out, r);
      }
    } else if (*bench_cmd) {
      const auto rows = benchmark(bench, solver.config());
      write_benchmark_csv(std::cout, rows);
      std::size_t checked = 0, agree = 0;
      for (const auto& r : rows)
        if (r.brute) {
          ++checked;
          agree += r.agree;
        }
      std::cerr << "agreement with brute force: " << agree << "/" << checked << "\n";
    }
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitInput;
  } catch (const GrammarError& e) {
    std::cerr << "grammar error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
