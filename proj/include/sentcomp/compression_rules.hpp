#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "sentcomp/cfg_parser.hpp"
#include "sentcomp/error.hpp"
#include "sentcomp/tokens.hpp"

namespace sentcomp {

/// Parse tree with a compression label in {0,1,2} for every node. Labels are
/// stored in preorder (node, then children left to right).
struct LabeledTree {
  ParseTree tree;
  std::vector<int> node_labels;
};

enum class Fixing { free, fixed_one, fixed_zero };

/// One entry per word, in sentence order.
using DeltaFixing = std::vector<Fixing>;

/// Walks a tree in preorder, passing each node with its preorder id.
inline void for_each_preorder(const ParseTree& t, const std::function<void(const ParseTree&, std::size_t)>& fn) {
  std::size_t id = 0;
  auto walk = [&](const auto& self, const ParseTree& n) -> void {
    fn(n, id++);
    for (const auto& c : n.children) self(self, c);
  };
  walk(walk, t);
}

/// Root gets 1; every child gets the entry of its parent's rule vector at
/// its position.
inline LabeledTree label_tree(const ParseTree& tree) {
  LabeledTree lt{tree, {}};
  auto walk = [&](const auto& self, const ParseTree& n, int label) -> void {
    lt.node_labels.push_back(label);
    if (n.is_leaf()) return;
    if (n.applied_rule.size() != n.children.size())
      throw GrammarError("node " + n.label + " has " + std::to_string(n.children.size()) +
                         " children but a rule vector of length " + std::to_string(n.applied_rule.size()));
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      const int r = n.applied_rule[i];
      if (r < 0 || r > 2) throw GrammarError("rule label out of range at node " + n.label);
      self(self, n.children[i], r);
    }
  };
  walk(walk, tree, 1);
  return lt;
}

/// A word is fixed to 1 when every label from the root down to its leaf is 1,
/// fixed to 0 when any label on that path is 0, and free otherwise.
inline DeltaFixing fix_deltas(const LabeledTree& lt) {
  const auto leaves = lt.tree.leaves();
  DeltaFixing out(leaves.size(), Fixing::free);
  std::vector<int> path;
  std::size_t id = 0;
  auto walk = [&](const auto& self, const ParseTree& n) -> void {
    path.push_back(lt.node_labels.at(id++));
    if (n.is_leaf()) {
      if (!n.leaf_index || *n.leaf_index >= out.size()) throw GrammarError("leaf without a valid token index");
      const bool zero = std::find(path.begin(), path.end(), 0) != path.end();
      const bool all_one = std::all_of(path.begin(), path.end(), [](int l) { return l == 1; });
      out[*n.leaf_index] = zero ? Fixing::fixed_zero : all_one ? Fixing::fixed_one : Fixing::free;
    }
    for (const auto& c : n.children) self(self, c);
    path.pop_back();
  };
  walk(walk, lt.tree);
  return out;
}

/// The words fixed to 1, in their original order.
inline TokenSeq sentence_trunk(const DeltaFixing& df, const TokenSeq& tokens) {
  if (df.size() != tokens.size()) throw ConfigError("fixing length differs from sentence length");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < df.size(); ++i)
    if (df[i] == Fixing::fixed_one) out.push_back(tokens[i]);
  return TokenSeq(std::move(out));
}

/// A PP or SBAR phrase: its introducing word and the other words it covers,
/// as 1-based word positions.
struct PhraseSpan {
  std::size_t intro = 0;
  std::vector<std::size_t> members;

  friend bool operator==(const PhraseSpan&, const PhraseSpan&) = default;
};

/// Collects every PP/SBAR subtree. The first leaf introduces the phrase.
/// Single-word phrases impose nothing and are skipped.
inline std::vector<PhraseSpan> phrase_spans(const ParseTree& tree) {
  std::vector<PhraseSpan> out;
  auto walk = [&](const auto& self, const ParseTree& n) -> void {
    if (!n.is_leaf() && (n.label == "PP" || n.label == "SBAR")) {
      auto leaves = n.leaves();
      if (leaves.size() >= 2) {
        PhraseSpan span{leaves.front() + 1, {}};
        for (std::size_t i = 1; i < leaves.size(); ++i) span.members.push_back(leaves[i] + 1);
        out.push_back(std::move(span));
      }
    }
    for (const auto& c : n.children) self(self, c);
  };
  walk(walk, tree);
  return out;
}

inline std::size_t count_fixed(const DeltaFixing& df, Fixing which) {
  return static_cast<std::size_t>(std::count(df.begin(), df.end(), which));
}

}  // namespace sentcomp
