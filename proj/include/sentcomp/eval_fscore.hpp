#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>

#include "sentcomp/error.hpp"
#include "sentcomp/tokens.hpp"

namespace sentcomp {

struct EvalReport {
  std::size_t A = 0;  // tokens in both
  std::size_t B = 0;  // reference only
  std::size_t C = 0;  // candidate only
  double P = 0.0;
  double R = 0.0;
  double F = 0.0;
  double mu = 1.0;
  double compression_rate = 0.0;  // candidate length over reference length
};

/// Multiset token overlap; case-sensitive, punctuation counted.
inline EvalReport fscore(const TokenSeq& candidate, const TokenSeq& reference, double mu = 1.0) {
  if (!(mu >= 0.0)) throw ConfigError("mu must be nonnegative");
  std::map<std::string, std::size_t> ref_counts;
  for (const auto& w : reference) ++ref_counts[w];
  EvalReport r;
  r.mu = mu;
  for (const auto& w : candidate) {
    auto it = ref_counts.find(w);
    if (it != ref_counts.end() && it->second > 0) {
      --it->second;
      ++r.A;
    }
  }
  r.C = candidate.size() - r.A;
  r.B = reference.size() - r.A;
  if (r.A == 0) {
    const bool both_empty = candidate.empty() && reference.empty();
    r.P = r.R = r.F = both_empty ? 1.0 : 0.0;
  } else {
    r.P = static_cast<double>(r.A) / static_cast<double>(r.A + r.C);
    r.R = static_cast<double>(r.A) / static_cast<double>(r.A + r.B);
    const double m2 = mu * mu;
    r.F = (m2 + 1.0) * r.P * r.R / (m2 * r.P + r.R);
  }
  r.compression_rate = reference.empty() ? 0.0 : static_cast<double>(candidate.size()) / static_cast<double>(reference.size());
  return r;
}

inline double compression_rate(const TokenSeq& candidate, const TokenSeq& original) {
  if (original.empty()) throw ConfigError("compression rate of an empty original");
  return static_cast<double>(candidate.size()) / static_cast<double>(original.size());
}

}  // namespace sentcomp
