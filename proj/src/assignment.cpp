#include "tumorfa/assignment.hpp"

#include <limits>
#include <stdexcept>

namespace tumorfa {

Assignment solve_assignment(const CostMatrix& m) {
  const int n = m.n;
  if (n < 0 || m.cost.size() != static_cast<std::size_t>(n) * n) {
    throw std::invalid_argument("solve_assignment: cost matrix is not square");
  }
  Assignment out;
  out.col_of_row.assign(n, -1);
  if (n == 0) return out;

  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  // 1-based potentials; p[j] is the row matched to column j, 0 = free.
  std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<std::int64_t> minv(n + 1, kInf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      std::int64_t delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const std::int64_t cur = m(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (int j = 1; j <= n; ++j) out.col_of_row[p[j] - 1] = j - 1;
  for (int i = 0; i < n; ++i) out.total += m(i, out.col_of_row[i]);
  return out;
}

Assignment solve_assignment_lexmin(const CostMatrix& m) {
  const Assignment best = solve_assignment(m);
  const int n = m.n;
  Assignment out;
  out.total = best.total;
  out.col_of_row.assign(n, -1);
  std::vector<char> col_taken(n, false);
  std::int64_t fixed_cost = 0;
  // Fix rows in order, each to the smallest column that still admits an
  // optimal completion.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (col_taken[j]) continue;
      std::vector<int> rows, cols;
      for (int r = i + 1; r < n; ++r) rows.push_back(r);
      for (int c = 0; c < n; ++c) {
        if (!col_taken[c] && c != j) cols.push_back(c);
      }
      CostMatrix sub{static_cast<int>(rows.size()), {}};
      sub.cost.reserve(rows.size() * rows.size());
      for (int r : rows)
        for (int c : cols) sub.cost.push_back(m(r, c));
      const std::int64_t rest = solve_assignment(sub).total;
      if (fixed_cost + m(i, j) + rest == best.total) {
        out.col_of_row[i] = j;
        col_taken[j] = true;
        fixed_cost += m(i, j);
        break;
      }
    }
  }
  return out;
}

}  // namespace tumorfa
