#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace sentcomp {

struct SolverStats {
  std::size_t nodes = 0;         // node problems processed
  std::size_t branched = 0;      // nodes split into two children
  std::size_t pruned = 0;
  std::size_t dca_runs = 0;      // root starts plus node restarts
  std::size_t dca_restarts = 0;  // node restarts only
  std::size_t lp_solves = 0;
  std::size_t incumbent_updates = 0;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;
};

}  // namespace sentcomp
