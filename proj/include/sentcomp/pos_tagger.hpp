#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sentcomp/error.hpp"
#include "sentcomp/tokens.hpp"

namespace sentcomp {

// Word-level tags, in table order. Viterbi ties resolve to the earliest.
inline constexpr std::array<std::string_view, 15> kLeafTags = {
    "ADJ", "ADV", "CC", "CD", "DT", "EX", "IN", "N", "P", "SYM", "TO", "V", "WDT", "WP", "WRB"};

// Phrase and clause labels used by the grammar.
inline constexpr std::array<std::string_view, 14> kPhraseLabels = {
    "ADJP", "ADVC", "ADVP", "ATTC", "CONJP", "NP", "OC", "PP", "QP", "S", "SBAR", "SC", "TOP", "VP"};

inline std::optional<std::size_t> leaf_tag_index(std::string_view tag) {
  for (std::size_t i = 0; i < kLeafTags.size(); ++i)
    if (kLeafTags[i] == tag) return i;
  return std::nullopt;
}

inline bool is_leaf_tag(std::string_view tag) { return leaf_tag_index(tag).has_value(); }

inline bool is_phrase_label(std::string_view l) {
  return std::find(kPhraseLabels.begin(), kPhraseLabels.end(), l) != kPhraseLabels.end();
}

/// Maps a Penn Treebank tag (or an already-normalized leaf tag) to the
/// closed tagset. Returns nullopt for tags outside the table (POS, RP, UH,
/// quotes, brackets, ...).
inline std::optional<std::string> map_penn_tag(std::string_view penn) {
  static const std::map<std::string, std::string, std::less<>> kPennMap = {
      {"JJ", "ADJ"},  {"JJR", "ADJ"}, {"JJS", "ADJ"}, {"RB", "ADV"},   {"RBR", "ADV"}, {"RBS", "ADV"},
      {"CC", "CC"},   {"CD", "CD"},   {"DT", "DT"},   {"EX", "EX"},    {"IN", "IN"},   {"NN", "N"},
      {"NNP", "N"},   {"NNPS", "N"},  {"NNS", "N"},   {"PRP", "P"},    {"PRP$", "P"},  {"WP$", "P"},
      {"WP", "WP"},   {".", "SYM"},   {",", "SYM"},   {"!", "SYM"},    {"?", "SYM"},   {";", "SYM"},
      {":", "SYM"},   {"TO", "TO"},   {"MD", "V"},    {"VB", "V"},     {"VBD", "V"},   {"VBG", "V"},
      {"VBN", "V"},   {"VBP", "V"},   {"VBZ", "V"},   {"WDT", "WDT"},  {"WRB", "WRB"},
  };
  if (is_leaf_tag(penn)) return std::string(penn);
  auto it = kPennMap.find(penn);
  if (it == kPennMap.end()) return std::nullopt;
  return it->second;
}

/// Tag for a word never seen in training, decided by its shape.
inline std::string_view shape_tag(std::string_view word) {
  if (is_punctuation_token(word)) return "SYM";
  for (char c : word)
    if (std::isdigit(static_cast<unsigned char>(c))) return "CD";
  return "N";
}

using TaggedSentence = std::vector<std::pair<std::string, std::string>>;

/// Parses `word/TAG word/TAG ...`. The tag is what follows the last '/'.
inline TaggedSentence parse_tagged_line(std::string_view line) {
  TaggedSentence out;
  for (const auto& item : split_ws(line)) {
    const auto slash = item.rfind('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == item.size())
      throw InputError("expected word/TAG, got '" + item + "'");
    out.emplace_back(item.substr(0, slash), item.substr(slash + 1));
  }
  return out;
}

inline std::vector<TaggedSentence> read_tagged_corpus(std::istream& in) {
  std::vector<TaggedSentence> out;
  std::string line;
  while (std::getline(in, line)) {
    auto s = parse_tagged_line(line);
    if (!s.empty()) out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<TaggedSentence> read_tagged_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open tagged corpus '" + path + "'");
  return read_tagged_corpus(in);
}

/// Bigram HMM over the leaf tagset with add-one smoothing. Known words are
/// restricted to the tags they carried in training.
class TaggerModel {
 public:
  static constexpr std::size_t kTags = kLeafTags.size();
  static constexpr std::size_t kBoundary = kTags;  // sentence start (as source) / end (as target)

  std::size_t skipped_tokens() const { return skipped_; }
  std::size_t trained_tokens() const { return trained_; }
  bool knows(std::string_view w) const { return emission_.count(std::string(w)) > 0; }

  std::vector<std::string> tag(const TokenSeq& sentence) const {
    std::vector<std::string> words(sentence.begin(), sentence.end());
    return tag(words);
  }

  /// Viterbi decoding; one tag per token.
  std::vector<std::string> tag(const std::vector<std::string>& words) const {
    const std::size_t n = words.size();
    if (n == 0) return {};
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    std::vector<std::array<double, kTags>> score(n);
    std::vector<std::array<std::size_t, kTags>> back(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto emit = emission_logs(words[i]);
      for (std::size_t t = 0; t < kTags; ++t) {
        score[i][t] = kNegInf;
        back[i][t] = 0;
        if (emit[t] == kNegInf) continue;
        if (i == 0) {
          score[i][t] = log_transition(kBoundary, t) + emit[t];
          continue;
        }
        for (std::size_t p = 0; p < kTags; ++p) {
          if (score[i - 1][p] == kNegInf) continue;
          const double s = score[i - 1][p] + log_transition(p, t) + emit[t];
          if (s > score[i][t]) {
            score[i][t] = s;
            back[i][t] = p;
          }
        }
      }
    }
    std::size_t best = 0;
    double best_score = kNegInf;
    for (std::size_t t = 0; t < kTags; ++t) {
      if (score[n - 1][t] == kNegInf) continue;
      const double s = score[n - 1][t] + log_transition(t, kBoundary);
      if (s > best_score) {
        best_score = s;
        best = t;
      }
    }
    std::vector<std::string> out(n);
    for (std::size_t i = n; i-- > 0;) {
      out[i] = std::string(kLeafTags[best]);
      if (i > 0) best = back[i][best];
    }
    return out;
  }

  void save(std::ostream& out) const {
    out << "tagger-model v1\n";
    for (std::size_t a = 0; a <= kTags; ++a)
      for (std::size_t b = 0; b <= kTags; ++b)
        if (transition_[a][b] > 0) out << "T\t" << label(a) << '\t' << label(b) << '\t' << transition_[a][b] << '\n';
    for (const auto& [word, counts] : emission_)
      for (std::size_t t = 0; t < kTags; ++t)
        if (counts[t] > 0) out << "E\t" << kLeafTags[t] << '\t' << word << '\t' << counts[t] << '\n';
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write tagger model '" + path + "'");
    save(out);
  }

  static TaggerModel load(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "tagger-model v1") throw InputError("not a tagger-model v1 file");
    TaggerModel m;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> f;
      std::size_t start = 0;
      for (std::size_t pos; (pos = line.find('\t', start)) != std::string::npos; start = pos + 1)
        f.push_back(line.substr(start, pos - start));
      f.push_back(line.substr(start));
      if (f.size() != 4) throw InputError("tagger model: expected 4 fields in '" + line + "'");
      std::size_t c = 0;
      try {
        c = std::stoul(f[3]);
      } catch (const std::exception&) {
        throw InputError("tagger model: bad count in '" + line + "'");
      }
      if (f[0] == "T") {
        m.transition_[parse_label(f[1])][parse_label(f[2])] += c;
      } else if (f[0] == "E") {
        auto t = leaf_tag_index(f[1]);
        if (!t) throw InputError("tagger model: unknown tag '" + f[1] + "'");
        m.emission_[f[2]][*t] += c;
      } else {
        throw InputError("tagger model: unknown record '" + f[0] + "'");
      }
    }
    m.recount();
    return m;
  }

  static TaggerModel load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open tagger model '" + path + "'");
    return load(in);
  }

  friend TaggerModel train_tagger(const std::vector<TaggedSentence>& corpus);

 private:
  static std::string label(std::size_t t) { return t == kBoundary ? "<b>" : std::string(kLeafTags[t]); }
  static std::size_t parse_label(const std::string& s) {
    if (s == "<b>") return kBoundary;
    auto t = leaf_tag_index(s);
    if (!t) throw InputError("tagger model: unknown tag '" + s + "'");
    return *t;
  }

  void recount() {
    tag_totals_.fill(0);
    from_totals_.fill(0);
    for (const auto& [w, counts] : emission_)
      for (std::size_t t = 0; t < kTags; ++t) tag_totals_[t] += counts[t];
    for (std::size_t a = 0; a <= kTags; ++a)
      for (std::size_t b = 0; b <= kTags; ++b) from_totals_[a] += transition_[a][b];
  }

  double log_transition(std::size_t from, std::size_t to) const {
    return std::log((static_cast<double>(transition_[from][to]) + 1.0) /
                    (static_cast<double>(from_totals_[from]) + kTags + 1.0));
  }

  const std::array<std::size_t, kTags>* lookup(std::string_view w) const {
    auto it = emission_.find(std::string(w));
    if (it != emission_.end()) return &it->second;
    std::string lower(w);
    for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    it = emission_.find(lower);
    return it == emission_.end() ? nullptr : &it->second;
  }

  std::array<double, kTags> emission_logs(std::string_view w) const {
    std::array<double, kTags> out;
    const auto* counts = lookup(w);
    if (!counts) {
      out.fill(-std::numeric_limits<double>::infinity());
      out[*leaf_tag_index(shape_tag(w))] = 0.0;
      return out;
    }
    // Tag dictionary: a known word only takes tags it was seen with.
    const double vocab = static_cast<double>(emission_.size());
    for (std::size_t t = 0; t < kTags; ++t)
      out[t] = (*counts)[t] == 0 ? -std::numeric_limits<double>::infinity()
                                 : std::log((static_cast<double>((*counts)[t]) + 1.0) /
                                            (static_cast<double>(tag_totals_[t]) + vocab + 1.0));
    return out;
  }

  std::map<std::string, std::array<std::size_t, kTags>> emission_;
  std::array<std::array<std::size_t, kTags + 1>, kTags + 1> transition_{};
  std::array<std::size_t, kTags> tag_totals_{};
  std::array<std::size_t, kTags + 1> from_totals_{};
  std::size_t skipped_ = 0;
  std::size_t trained_ = 0;
};

/// Trains the HMM from (word, tag) sentences. Tags may be Penn Treebank tags
/// or leaf tags; tokens with tags outside the mapping are skipped and counted.
inline TaggerModel train_tagger(const std::vector<TaggedSentence>& corpus) {
  if (corpus.empty()) throw ConfigError("tagged corpus is empty");
  TaggerModel m;
  for (const auto& sent : corpus) {
    std::size_t prev = TaggerModel::kBoundary;
    bool any = false;
    for (const auto& [word, penn] : sent) {
      auto mapped = map_penn_tag(penn);
      if (!mapped) {
        ++m.skipped_;
        continue;
      }
      const std::size_t t = *leaf_tag_index(*mapped);
      auto [it, inserted] = m.emission_.try_emplace(word);
      if (inserted) it->second.fill(0);
      ++it->second[t];
      ++m.transition_[prev][t];
      prev = t;
      any = true;
      ++m.trained_;
    }
    if (any) ++m.transition_[prev][TaggerModel::kBoundary];
  }
  if (m.trained_ == 0) throw ConfigError("tagged corpus has no mappable tokens");
  m.recount();
  return m;
}

}  // namespace sentcomp
