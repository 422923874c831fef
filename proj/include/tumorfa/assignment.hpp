#pragma once

#include <cstdint>
#include <vector>

namespace tumorfa {

/// Square integer cost matrix, row-major.
struct CostMatrix {
  int n = 0;
  std::vector<std::int64_t> cost;

  std::int64_t operator()(int i, int j) const { return cost[static_cast<std::size_t>(i) * n + j]; }
};

struct Assignment {
  std::vector<int> col_of_row;  // row i is matched with column col_of_row[i]
  std::int64_t total = 0;
};

/// Minimum-cost perfect matching by the Hungarian method with potentials,
/// O(n^3).
Assignment solve_assignment(const CostMatrix& m);

/// Among all minimum-cost matchings, the lexicographically smallest
/// col_of_row.
Assignment solve_assignment_lexmin(const CostMatrix& m);

}  // namespace tumorfa
