#pragma once

#include <cctype>
#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sentcomp/error.hpp"

namespace sentcomp {

// Reserved boundary symbols. The tokenizer splits '<' and '>' off as
// punctuation, so neither can come out of tokenize().
inline constexpr std::string_view kStartMarker = "<s>";
inline constexpr std::string_view kEndMarker = "</s>";

inline bool is_marker(std::string_view w) { return w == kStartMarker || w == kEndMarker; }

/// A tokenized sentence x_1..x_n. Position 0 and n+1 are the implicit start
/// and end markers; word(i) uses those 1-based positions.
class TokenSeq {
 public:
  TokenSeq() = default;
  explicit TokenSeq(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    for (const auto& t : tokens_) {
      if (t.empty()) throw InputError("empty token");
      if (is_marker(t)) throw InputError("reserved marker '" + t + "' used as a word");
    }
  }

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }

  const std::string& operator[](std::size_t i) const { return tokens_[i]; }

  // 1-based access; 0 and n+1 return the markers.
  std::string_view word(std::size_t i) const {
    if (i == 0) return kStartMarker;
    if (i == tokens_.size() + 1) return kEndMarker;
    return tokens_.at(i - 1);
  }

  const std::vector<std::string>& tokens() const { return tokens_; }
  auto begin() const { return tokens_.begin(); }
  auto end() const { return tokens_.end(); }

  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (i) out += ' ';
      out += tokens_[i];
    }
    return out;
  }

  friend bool operator==(const TokenSeq&, const TokenSeq&) = default;

 private:
  std::vector<std::string> tokens_;
};

namespace detail {

inline bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }
inline bool is_alnum(char c) {
  // Bytes >= 0x80 belong to UTF-8 sequences and are kept inside words.
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || static_cast<unsigned char>(c) >= 0x80;
}

}  // namespace detail

/// Whitespace + punctuation tokenizer. Punctuation marks become their own
/// tokens, except apostrophes and hyphens between letters ("don't",
/// "mid-1890") and '.'/',' between digits ("3.5", "1,000").
inline TokenSeq tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
      continue;
    }
    if (detail::is_punct(c)) {
      const bool inner = !cur.empty() && i + 1 < text.size() && detail::is_alnum(text[i + 1]) &&
                         detail::is_alnum(cur.back());
      const bool word_joiner = (c == '\'' || c == '-') && inner;
      const bool digit_joiner = (c == '.' || c == ',') && inner &&
                                std::isdigit(static_cast<unsigned char>(cur.back())) &&
                                std::isdigit(static_cast<unsigned char>(text[i + 1]));
      if (word_joiner || digit_joiner) {
        cur += c;
        continue;
      }
      flush();
      out.emplace_back(1, c);
      continue;
    }
    cur += c;
  }
  flush();
  return TokenSeq(std::move(out));
}

// Splits on whitespace only; used for text that is already tokenized
// (model files, gold files written by this tool).
inline std::vector<std::string> split_ws(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

inline bool is_punctuation_token(std::string_view w) {
  if (w.empty()) return false;
  for (char c : w)
    if (!detail::is_punct(c)) return false;
  return true;
}

}  // namespace sentcomp
