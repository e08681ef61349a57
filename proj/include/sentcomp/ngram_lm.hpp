#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sentcomp/error.hpp"
#include "sentcomp/tokens.hpp"

namespace sentcomp {

inline constexpr double kDefaultDiscount = 0.75;

/// Order-3 language model with interpolated Kneser-Ney smoothing.
///
/// Raw counts are kept for every 1-, 2- and 3-gram of the corpus sentences
/// padded as `<s> w1 .. wn </s>`. The highest order of a query uses raw
/// counts, lower orders use continuation counts, and the chain ends in a
/// uniform distribution over V plus the end marker. Immutable once built, so
/// concurrent queries are safe.
class NgramModel {
 public:
  using Count = std::uint64_t;

  NgramModel() = default;

  double discount() const { return discount_; }
  std::size_t vocabulary_size() const { return vocab_.size(); }
  const std::set<std::string>& vocabulary() const { return vocab_; }
  bool known(std::string_view w) const { return vocab_.count(std::string(w)) > 0; }

  /// Raw count of an n-gram (n in 1..3); tokens may include the markers.
  Count count(const std::vector<std::string>& gram) const {
    if (gram.empty() || gram.size() > 3) throw InputError("n-gram order must be 1..3");
    const auto& table = counts_[gram.size() - 1];
    auto it = table.find(join(gram));
    return it == table.end() ? 0 : it->second;
  }

  /// Smoothed P(w | history) with |history| <= 2. History entries may be the
  /// start marker; w may be the end marker.
  double probability(const std::vector<std::string>& history, std::string_view w) const {
    if (history.size() > 2) throw InputError("history longer than 2");
    if (w == kStartMarker) throw InputError("the start marker cannot be predicted");
    for (std::size_t i = 0; i < history.size(); ++i) {
      if (history[i] == kEndMarker) throw InputError("end marker inside a history");
      if (history[i] == kStartMarker && i != 0) throw InputError("start marker can only open a history");
    }
    if (history.size() == 2) return trigram_highest(history[0], history[1], w);
    if (history.size() == 1) return bigram_highest(history[0], w);
    return unigram(w);
  }

  /// P(w | start), the bigram sentence-opening probability.
  double prob_start(std::string_view w) const {
    reject_marker(w);
    return bigram_highest(std::string(kStartMarker), w);
  }

  /// P(w3 | w1, w2); w1 may be the start marker.
  double prob_trigram(std::string_view w1, std::string_view w2, std::string_view w3) const {
    if (w1 != kStartMarker) reject_marker(w1);
    reject_marker(w2);
    reject_marker(w3);
    return trigram_highest(std::string(w1), std::string(w2), w3);
  }

  /// P(end | w1, w2); w1 may be the start marker.
  double prob_end(std::string_view w1, std::string_view w2) const {
    if (w1 != kStartMarker) reject_marker(w1);
    reject_marker(w2);
    return trigram_highest(std::string(w1), std::string(w2), kEndMarker);
  }

  void save(std::ostream& out) const {
    out << "ngram-model v1 discount=" << std::setprecision(17) << discount_ << '\n';
    for (int n = 0; n < 3; ++n) {
      std::map<std::string, Count> sorted(counts_[n].begin(), counts_[n].end());
      for (const auto& [key, c] : sorted) {
        std::string toks = key;
        std::replace(toks.begin(), toks.end(), kSep, ' ');
        out << (n + 1) << '\t' << toks << '\t' << c << '\n';
      }
    }
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write model file '" + path + "'");
    save(out);
  }

  static NgramModel load(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty model file");
    const std::string prefix = "ngram-model v1 discount=";
    if (line.rfind(prefix, 0) != 0) throw InputError("not an ngram-model v1 file");
    NgramModel m;
    try {
      m.discount_ = std::stod(line.substr(prefix.size()));
    } catch (const std::exception&) {
      throw InputError("bad discount in model header");
    }
    if (!(m.discount_ > 0.0 && m.discount_ < 1.0)) throw InputError("discount outside (0,1)");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto t1 = line.find('\t');
      const auto t2 = line.rfind('\t');
      if (t1 == std::string::npos || t1 == t2) throw InputError("model line " + std::to_string(lineno) + ": expected 3 fields");
      int n = 0;
      Count c = 0;
      const std::string ns = line.substr(0, t1);
      const std::string cs = line.substr(t2 + 1);
      if (std::from_chars(ns.data(), ns.data() + ns.size(), n).ec != std::errc{} || n < 1 || n > 3 ||
          std::from_chars(cs.data(), cs.data() + cs.size(), c).ec != std::errc{})
        throw InputError("model line " + std::to_string(lineno) + ": bad order or count");
      auto toks = split_ws(line.substr(t1 + 1, t2 - t1 - 1));
      if (toks.size() != static_cast<std::size_t>(n))
        throw InputError("model line " + std::to_string(lineno) + ": token count does not match order");
      m.counts_[n - 1][join(toks)] += c;
    }
    m.finalize();
    return m;
  }

  static NgramModel load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open model file '" + path + "'");
    return load(in);
  }

  friend NgramModel train(const std::vector<TokenSeq>& corpus, double discount);

 private:
  static constexpr char kSep = '\x1f';

  struct ContextStats {
    Count total = 0;  // sum of following counts
    Count types = 0;  // distinct followers
  };

  static std::string join(const std::vector<std::string>& toks) {
    std::string key;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (i) key += kSep;
      key += toks[i];
    }
    return key;
  }
  static std::string join2(std::string_view a, std::string_view b) {
    std::string key(a);
    key += kSep;
    key += b;
    return key;
  }

  static void reject_marker(std::string_view w) {
    if (is_marker(w)) throw InputError("marker '" + std::string(w) + "' is not a word");
  }

  template <class Map>
  static Count lookup(const Map& m, const std::string& key) {
    auto it = m.find(key);
    return it == m.end() ? 0 : it->second;
  }

  // Recomputes every derived statistic from the raw counts.
  void finalize() {
    vocab_.clear();
    for (const auto& [key, c] : counts_[0])
      if (!is_marker(key) && c > 0) vocab_.insert(key);
    ctx3_.clear();
    ctx2_.clear();
    cont2_.clear();
    cont2_ctx_.clear();
    cont1_.clear();
    cont1_total_ = 0;
    cont1_types_ = 0;
    for (const auto& [key, c] : counts_[2]) {
      if (c == 0) continue;
      const auto p2 = key.rfind(kSep);
      const auto p1 = key.find(kSep);
      auto& ctx = ctx3_[key.substr(0, p2)];
      ctx.total += c;
      ctx.types += 1;
      // N1+(. v w): one more distinct left extension of the bigram (v, w).
      const std::string vw = key.substr(p1 + 1);
      if (cont2_[vw]++ == 0) {
        auto& cc = cont2_ctx_[vw.substr(0, vw.find(kSep))];
        cc.types += 1;
      }
      cont2_ctx_[vw.substr(0, vw.find(kSep))].total += 1;
    }
    for (const auto& [key, c] : counts_[1]) {
      if (c == 0) continue;
      const auto p = key.find(kSep);
      auto& ctx = ctx2_[key.substr(0, p)];
      ctx.total += c;
      ctx.types += 1;
      if (cont1_[key.substr(p + 1)]++ == 0) ++cont1_types_;
      ++cont1_total_;
    }
  }

  double uniform() const { return 1.0 / static_cast<double>(vocab_.size() + 1); }

  double unigram(std::string_view w) const {
    if (cont1_total_ == 0) return uniform();
    const double D = discount_;
    const double n = static_cast<double>(lookup(cont1_, std::string(w)));
    const double total = static_cast<double>(cont1_total_);
    return std::max(n - D, 0.0) / total + D * static_cast<double>(cont1_types_) / total * uniform();
  }

  // Lower-order bigram on continuation counts.
  double bigram_continuation(const std::string& v, std::string_view w) const {
    auto it = cont2_ctx_.find(v);
    if (it == cont2_ctx_.end() || it->second.total == 0) return unigram(w);
    const double D = discount_;
    const double total = static_cast<double>(it->second.total);
    const double n = static_cast<double>(lookup(cont2_, join2(v, w)));
    return std::max(n - D, 0.0) / total + D * static_cast<double>(it->second.types) / total * unigram(w);
  }

  double bigram_highest(const std::string& v, std::string_view w) const {
    auto it = ctx2_.find(v);
    if (it == ctx2_.end() || it->second.total == 0) return unigram(w);
    const double D = discount_;
    const double total = static_cast<double>(it->second.total);
    const double n = static_cast<double>(lookup(counts_[1], join2(v, w)));
    return std::max(n - D, 0.0) / total + D * static_cast<double>(it->second.types) / total * unigram(w);
  }

  double trigram_highest(const std::string& u, const std::string& v, std::string_view w) const {
    const std::string ctx = join2(u, v);
    auto it = ctx3_.find(ctx);
    if (it == ctx3_.end() || it->second.total == 0) return bigram_continuation(v, w);
    const double D = discount_;
    const double total = static_cast<double>(it->second.total);
    std::string key = ctx;
    key += kSep;
    key += w;
    const double n = static_cast<double>(lookup(counts_[2], key));
    return std::max(n - D, 0.0) / total +
           D * static_cast<double>(it->second.types) / total * bigram_continuation(v, w);
  }

  double discount_ = kDefaultDiscount;
  std::unordered_map<std::string, Count> counts_[3];
  std::set<std::string> vocab_;
  std::unordered_map<std::string, ContextStats> ctx3_;       // (u,v) -> c(uv.), N1+(uv.)
  std::unordered_map<std::string, ContextStats> ctx2_;       // v -> c(v.), N1+(v.)
  std::unordered_map<std::string, Count> cont2_;             // (v,w) -> N1+(.vw)
  std::unordered_map<std::string, ContextStats> cont2_ctx_;  // v -> sum_w N1+(.vw), #w
  std::unordered_map<std::string, Count> cont1_;             // w -> N1+(.w)
  Count cont1_total_ = 0;
  Count cont1_types_ = 0;
};

/// Counts every n-gram (n <= 3) of the padded corpus sentences.
inline NgramModel train(const std::vector<TokenSeq>& corpus, double discount = kDefaultDiscount) {
  if (corpus.empty()) throw ConfigError("language model corpus is empty");
  if (!(discount > 0.0 && discount < 1.0)) throw ConfigError("discount must lie in (0,1)");
  NgramModel m;
  m.discount_ = discount;
  std::size_t used = 0;
  for (const auto& sent : corpus) {
    if (sent.empty()) continue;
    ++used;
    std::vector<std::string> padded;
    padded.reserve(sent.size() + 2);
    padded.emplace_back(kStartMarker);
    padded.insert(padded.end(), sent.begin(), sent.end());
    padded.emplace_back(kEndMarker);
    for (std::size_t i = 0; i < padded.size(); ++i) {
      for (std::size_t n = 1; n <= 3 && i + n <= padded.size(); ++n) {
        std::vector<std::string> gram(padded.begin() + static_cast<std::ptrdiff_t>(i),
                                      padded.begin() + static_cast<std::ptrdiff_t>(i + n));
        ++m.counts_[n - 1][NgramModel::join(gram)];
      }
    }
  }
  if (used == 0) throw ConfigError("language model corpus has no tokens");
  m.finalize();
  return m;
}

/// Reads a corpus file: UTF-8 text, one sentence per line, blank lines ignored.
inline std::vector<TokenSeq> read_corpus(std::istream& in) {
  std::vector<TokenSeq> out;
  std::string line;
  while (std::getline(in, line)) {
    auto toks = tokenize(line);
    if (!toks.empty()) out.push_back(std::move(toks));
  }
  return out;
}

inline std::vector<TokenSeq> read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open corpus '" + path + "'");
  return read_corpus(in);
}

}  // namespace sentcomp
