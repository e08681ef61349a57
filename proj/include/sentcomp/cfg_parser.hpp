#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sentcomp/error.hpp"
#include "sentcomp/tokens.hpp"

namespace sentcomp {

/// Grammar symbol. Terminals are quoted words in grammar files and match a
/// token verbatim; everything else is a category.
struct Symbol {
  std::string name;
  bool terminal = false;

  friend bool operator==(const Symbol&, const Symbol&) = default;
  friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

/// A production with its compression rule: one label in {0,1,2} per rhs
/// symbol (0 delete, 1 keep, 2 left to the solver).
struct Production {
  std::string lhs;
  std::vector<Symbol> rhs;
  std::vector<int> rule;

  std::string str() const {
    std::string out = lhs + " ->";
    for (const auto& s : rhs) out += s.terminal ? " \"" + s.name + "\"" : " " + s.name;
    out += " :";
    for (int r : rule) out += " " + std::to_string(r);
    return out;
  }

  friend bool operator==(const Production&, const Production&) = default;
};

inline void validate_production(const Production& p) {
  if (p.lhs.empty()) throw GrammarError("production without left-hand side");
  if (p.rhs.empty()) throw GrammarError("empty right-hand side for " + p.lhs);
  if (p.rule.size() != p.rhs.size())
    throw GrammarError("rule vector length " + std::to_string(p.rule.size()) + " does not match rhs length " +
                       std::to_string(p.rhs.size()) + " in '" + p.str() + "'");
  for (int r : p.rule)
    if (r < 0 || r > 2) throw GrammarError("rule labels must be 0, 1 or 2 in '" + p.str() + "'");
}

/// Parses one grammar line `LHS -> A B "word" : r1 r2 r3`. The rule part is
/// optional and defaults to all 1.
inline Production parse_production(std::string_view line) {
  const auto arrow = line.find("->");
  if (arrow == std::string_view::npos) throw GrammarError("missing '->' in '" + std::string(line) + "'");
  Production p;
  auto lhs = split_ws(line.substr(0, arrow));
  if (lhs.size() != 1) throw GrammarError("expected a single left-hand symbol in '" + std::string(line) + "'");
  p.lhs = lhs.front();
  std::string_view rest = line.substr(arrow + 2);

  // Scan rhs symbols up to an unquoted ':'.
  std::size_t i = 0;
  bool have_rule = false;
  while (i < rest.size()) {
    const char c = rest[i];
    if (c == ' ' || c == '\t') {
      ++i;
    } else if (c == '"') {
      const auto close = rest.find('"', i + 1);
      if (close == std::string_view::npos) throw GrammarError("unterminated quote in '" + std::string(line) + "'");
      p.rhs.push_back({std::string(rest.substr(i + 1, close - i - 1)), true});
      i = close + 1;
    } else if (c == ':') {
      have_rule = true;
      ++i;
      break;
    } else {
      std::size_t j = i;
      while (j < rest.size() && rest[j] != ' ' && rest[j] != '\t' && rest[j] != ':') ++j;
      p.rhs.push_back({std::string(rest.substr(i, j - i)), false});
      i = j;
    }
  }
  if (have_rule) {
    for (const auto& tok : split_ws(rest.substr(i))) {
      if (tok.size() != 1 || tok[0] < '0' || tok[0] > '2')
        throw GrammarError("bad rule label '" + tok + "' in '" + std::string(line) + "'");
      p.rule.push_back(tok[0] - '0');
    }
  } else {
    p.rule.assign(p.rhs.size(), 1);
  }
  validate_production(p);
  return p;
}

/// Ordered production list. Order matters: the first parse follows it.
class CfgGrammar {
 public:
  CfgGrammar() = default;
  explicit CfgGrammar(std::vector<Production> productions, std::string start = "S")
      : productions_(std::move(productions)), start_(std::move(start)) {
    for (const auto& p : productions_) validate_production(p);
    index();
  }

  const std::vector<Production>& productions() const { return productions_; }
  const std::string& start() const { return start_; }
  bool is_nonterminal(const std::string& sym) const { return by_lhs_.count(sym) > 0; }

  const std::vector<std::size_t>& expansions(const std::string& sym) const {
    static const std::vector<std::size_t> kNone;
    auto it = by_lhs_.find(sym);
    return it == by_lhs_.end() ? kNone : it->second;
  }

  bool contains(const Production& p) const {
    return std::find(productions_.begin(), productions_.end(), p) != productions_.end();
  }

  std::string str() const {
    std::string out;
    for (const auto& p : productions_) out += p.str() + "\n";
    return out;
  }

 private:
  void index() {
    by_lhs_.clear();
    for (std::size_t i = 0; i < productions_.size(); ++i) by_lhs_[productions_[i].lhs].push_back(i);
  }

  std::vector<Production> productions_;
  std::string start_ = "S";
  std::map<std::string, std::vector<std::size_t>> by_lhs_;
};

/// Reads a grammar file: one production per line, '#' starts a comment.
inline std::vector<Production> read_productions(std::istream& in) {
  std::vector<Production> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (split_ws(line).empty()) continue;
    try {
      out.push_back(parse_production(line));
    } catch (const GrammarError& e) {
      throw GrammarError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<Production> read_productions_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_productions(in);
}

inline std::vector<Production> read_productions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open grammar file '" + path + "'");
  return read_productions(in);
}

// Production templates and compression rules for statements. Two rows carry
// one rule label per rhs symbol where the source rule lists three, and
// NP -> DT N TOP keeps the determiner of a noun with an infinitive
// complement ("an example to test ...").
inline constexpr std::string_view kStatementGrammar = R"(# statements
S -> NP VP SYM : 1 1 1
S -> NP VP : 1 1
NP -> N : 1
NP -> N NP : 1 1
NP -> N PP : 1 2
NP -> N ATTC : 1 2
NP -> N SBAR : 1 2
NP -> SC : 1
NP -> N CC NP : 1 1 1
NP -> N ADVP : 1 2
NP -> DT : 1
NP -> DT N TOP : 1 1 1
NP -> DT NP : 2 1
NP -> DT ADJP : 2 1
NP -> EX : 1
NP -> ADJP NP : 2 1
NP -> CC NP : 1 1
NP -> CD NP : 2 1
NP -> QP NP : 2 1
NP -> P : 1
NP -> P NP : 1 1
NP -> N TOP : 1 1
VP -> V : 1
VP -> V IN OC : 1 1 1
VP -> V IN NP : 1 1 1
VP -> V NP : 1 1
VP -> V VP : 1 1
VP -> V OC : 1 1
VP -> V P OC : 1 1 1
VP -> V NP VP : 1 1 1
VP -> V NP PP : 1 1 2
VP -> ADVP VP : 1 1
VP -> V ADVP : 1 1
VP -> V ADVP PP : 1 2 2
VP -> V ADVP NP : 1 2 1
VP -> V PP : 1 2
VP -> V PP PP : 1 2 2
VP -> V TOP : 1 1
VP -> V ADJP : 1 1
VP -> V ADVP ADVC : 1 1 2
VP -> V ADJP ADVC : 1 1 2
ADJP -> ADJ : 2
ADJP -> ADV ADJ : 2 1
ADJP -> ADJ OC : 1 2
ADVP -> ADV : 2
ADVP -> ADJ ADV : 2 2
ADVP -> ADV ADV : 2 1
CONJP -> IN ADV IN : 2 2 2
CONJP -> CC : 1
PP -> IN NP : 1 1
PP -> IN ADJ : 1 1
PP -> IN NP IN : 1 1 1
PP -> IN CD NP : 1 1 1
ATTC -> P VP : 2 2
ATTC -> WDT S : 2 2
ATTC -> WRB S : 2 2
ADVC -> IN S : 1 1
OC -> IN S : 1 1
OC -> WP VP : 1 1
OC -> WRB TOP : 1 1
OC -> WRB ADV S : 1 1 1
OC -> WP S : 1 1
SC -> IN S : 1 1
SC -> WP S : 1 1
SC -> WDT VP : 1 1
SC -> WDT PP VP : 1 2 1
SC -> WRB S : 1 1
TOP -> TO VP : 1 1
QP -> ADJ IN CD : 1 1 1
QP -> IN CD N : 1 1 1
QP -> CD IN N : 1 1 1
QP -> DT N IN : 1 1 1
QP -> DT ADJ N IN : 1 1 1 1
QP -> ADV DT ADJ : 1 1 1
QP -> N IN : 1 1
QP -> CD N IN : 1 1 1
SBAR -> WDT S : 1 1
)";

inline std::vector<Production> default_templates() { return read_productions_text(kStatementGrammar); }

/// Sentence-specific grammar: the templates that can derive a string over
/// the observed tags and words, in template order, followed by one lexical
/// production `TAG -> "word"` (rule 1) per distinct (tag, word) pair.
inline CfgGrammar generate_grammar(const std::vector<std::string>& tags, const TokenSeq& tokens,
                                   const std::vector<Production>& templates) {
  if (tags.size() != tokens.size())
    throw ConfigError("tag count " + std::to_string(tags.size()) + " differs from token count " +
                      std::to_string(tokens.size()));
  std::set<std::string> words(tokens.begin(), tokens.end());
  std::set<std::string> productive(tags.begin(), tags.end());

  auto usable = [&](const Production& p) {
    return std::all_of(p.rhs.begin(), p.rhs.end(), [&](const Symbol& s) {
      return s.terminal ? words.count(s.name) > 0 : productive.count(s.name) > 0;
    });
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& p : templates)
      if (!productive.count(p.lhs) && usable(p)) {
        productive.insert(p.lhs);
        changed = true;
      }
  }

  std::vector<Production> out;
  auto add = [&](Production p) {
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
  };
  for (const auto& p : templates)
    if (usable(p)) add(p);
  for (std::size_t i = 0; i < tokens.size(); ++i) add(Production{tags[i], {Symbol{tokens[i], true}}, {1}});
  return CfgGrammar(std::move(out));
}

/// Ordered rooted tree. Leaves carry the token they cover; internal nodes
/// carry the rule vector of the production that expanded them.
struct ParseTree {
  std::string label;
  std::vector<ParseTree> children;
  std::optional<std::size_t> leaf_index;  // 0-based token position for leaves
  std::vector<int> applied_rule;

  bool is_leaf() const { return children.empty(); }

  /// Bracketed form: (S (NP (DT the) (N man)) ...).
  std::string bracketed() const {
    if (is_leaf()) return label;
    std::string out = "(" + label;
    for (const auto& c : children) out += " " + c.bracketed();
    return out + ")";
  }

  std::vector<std::size_t> leaves() const {
    std::vector<std::size_t> out;
    collect_leaves(out);
    return out;
  }

  friend bool operator==(const ParseTree&, const ParseTree&) = default;

 private:
  void collect_leaves(std::vector<std::size_t>& out) const {
    if (is_leaf()) {
      if (leaf_index) out.push_back(*leaf_index);
      return;
    }
    for (const auto& c : children) c.collect_leaves(out);
  }
};

enum class ParseMode { first, all };

inline constexpr std::size_t kAmbiguityCap = 64;

struct ParseResult {
  std::vector<ParseTree> trees;  // empty: no complete parse
  bool truncated = false;        // the ambiguity cap was hit somewhere

  bool parsed() const { return !trees.empty(); }
};

namespace detail {

// Memoized top-down parser. Results per (symbol, position) are kept in
// depth-first production order, so the first complete analysis is the one a
// backtracking recursive-descent parser would find first.
class RecursiveDescent {
 public:
  RecursiveDescent(const CfgGrammar& g, const TokenSeq& tokens, std::size_t cap)
      : g_(g), tokens_(tokens), cap_(cap) {}

  struct Node {
    std::string label;
    std::vector<std::shared_ptr<const Node>> kids;
    std::optional<std::size_t> leaf;
    const Production* prod = nullptr;
  };
  using NodePtr = std::shared_ptr<const Node>;
  struct Item {
    std::size_t end;
    NodePtr node;
  };
  struct Seq {
    std::size_t end;
    std::vector<NodePtr> kids;
  };

  std::vector<Item> parse(const Symbol& sym, std::size_t pos) {
    if (pos >= tokens_.size()) return {};
    if (sym.terminal) {
      if (tokens_[pos] != sym.name) return {};
      auto leaf = std::make_shared<Node>();
      leaf->label = sym.name;
      leaf->leaf = pos;
      return {Item{pos + 1, leaf}};
    }
    const auto key = std::make_pair(sym.name, pos);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    // A symbol re-entered at the same position without consuming input is a
    // left-recursive loop; that branch contributes nothing.
    if (!active_.insert(key).second) return {};

    std::vector<Item> items;
    std::map<std::size_t, std::size_t> per_end;
    for (std::size_t pi : g_.expansions(sym.name)) {
      const Production& p = g_.productions()[pi];
      for (auto& seq : sequence(p.rhs, 0, pos)) {
        if (per_end[seq.end] >= cap_) {
          truncated_ = true;
          continue;
        }
        ++per_end[seq.end];
        auto node = std::make_shared<Node>();
        node->label = p.lhs;
        node->kids = std::move(seq.kids);
        node->prod = &p;
        items.push_back(Item{seq.end, std::move(node)});
      }
    }
    active_.erase(key);
    memo_.emplace(key, items);
    return items;
  }

  bool truncated() const { return truncated_; }

 private:
  std::vector<Seq> sequence(const std::vector<Symbol>& rhs, std::size_t k, std::size_t pos) {
    if (k == rhs.size()) return {Seq{pos, {}}};
    // Every symbol covers at least one token.
    if (tokens_.size() - std::min(pos, tokens_.size()) < rhs.size() - k) return {};
    std::vector<Seq> out;
    std::map<std::size_t, std::size_t> per_end;
    for (const auto& head : parse(rhs[k], pos)) {
      for (auto& tail : sequence(rhs, k + 1, head.end)) {
        if (per_end[tail.end] >= cap_) {
          truncated_ = true;
          continue;
        }
        ++per_end[tail.end];
        Seq s{tail.end, {}};
        s.kids.reserve(tail.kids.size() + 1);
        s.kids.push_back(head.node);
        for (auto& kid : tail.kids) s.kids.push_back(std::move(kid));
        out.push_back(std::move(s));
      }
    }
    return out;
  }

  const CfgGrammar& g_;
  const TokenSeq& tokens_;
  std::size_t cap_;
  bool truncated_ = false;
  std::map<std::pair<std::string, std::size_t>, std::vector<Item>> memo_;
  std::set<std::pair<std::string, std::size_t>> active_;
};

inline ParseTree materialize(const RecursiveDescent::Node& n) {
  ParseTree t;
  t.label = n.label;
  t.leaf_index = n.leaf;
  if (n.prod) t.applied_rule = n.prod->rule;
  t.children.reserve(n.kids.size());
  for (const auto& k : n.kids) t.children.push_back(materialize(*k));
  return t;
}

}  // namespace detail

/// Parses the token sequence from the grammar's start symbol. Tags are not
/// consulted directly: the grammar's lexical productions carry them.
inline ParseResult parse(const CfgGrammar& grammar, const TokenSeq& tokens, ParseMode mode = ParseMode::first,
                         std::size_t cap = kAmbiguityCap) {
  ParseResult result;
  if (tokens.empty()) return result;
  detail::RecursiveDescent rd(grammar, tokens, cap);
  for (const auto& item : rd.parse(Symbol{grammar.start(), false}, 0)) {
    if (item.end != tokens.size()) continue;
    result.trees.push_back(detail::materialize(*item.node));
    if (mode == ParseMode::first || result.trees.size() >= cap) break;
  }
  result.truncated = rd.truncated();
  return result;
}

inline ParseResult parse(const CfgGrammar& grammar, const TokenSeq& tokens, const std::vector<std::string>& tags,
                         ParseMode mode = ParseMode::first, std::size_t cap = kAmbiguityCap) {
  if (tags.size() != tokens.size()) throw ConfigError("tag count differs from token count");
  return parse(grammar, tokens, mode, cap);
}

/// Re-checks a tree against the grammar and the sentence. Throws GrammarError
/// when an internal node matches no production or the yield differs.
inline void validate_tree(const ParseTree& tree, const CfgGrammar& grammar, const TokenSeq& tokens) {
  auto check = [&](const auto& self, const ParseTree& t) -> void {
    if (t.is_leaf()) return;
    Production p{t.label, {}, t.applied_rule};
    for (const auto& c : t.children) {
      if (c.is_leaf()) p.rhs.push_back({c.label, true});
      else p.rhs.push_back({c.label, false});
      self(self, c);
    }
    if (!grammar.contains(p)) throw GrammarError("node does not match any production: " + p.str());
  };
  check(check, tree);
  const auto leaves = tree.leaves();
  if (leaves.size() != tokens.size()) throw GrammarError("tree yield length differs from sentence length");
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (leaves[i] != i) throw GrammarError("tree leaves are out of order");
  }
  auto words = [&](const auto& self, const ParseTree& t, std::vector<std::string>& out) -> void {
    if (t.is_leaf()) out.push_back(t.label);
    for (const auto& c : t.children) self(self, c, out);
  };
  std::vector<std::string> yield;
  words(words, tree, yield);
  if (yield != tokens.tokens()) throw GrammarError("tree yield differs from the sentence");
}

}  // namespace sentcomp
