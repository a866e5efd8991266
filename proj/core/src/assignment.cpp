#include "radargap/assignment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace radargap {

namespace {

// Potentials-based Hungarian method for n <= m, 1-based internally.
Assignment solve_wide(const CostMatrix& a) {
  const std::size_t n = a.rows;
  const std::size_t m = a.cols;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0);  // p[j]: row matched to column j
  std::vector<std::size_t> way(m + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
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
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment out;
  out.row_to_col.assign(n, -1);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) out.row_to_col[p[j] - 1] = static_cast<int>(j - 1);
  }
  for (std::size_t i = 0; i < n; ++i) out.cost += a(i, static_cast<std::size_t>(out.row_to_col[i]));
  return out;
}

}  // namespace

Assignment solve_assignment(const CostMatrix& cost) {
  if (cost.values.size() != cost.rows * cost.cols) throw std::invalid_argument("solve_assignment: bad matrix shape");
  for (const double c : cost.values) {
    if (!std::isfinite(c)) throw std::invalid_argument("solve_assignment: costs must be finite");
  }
  if (cost.rows == 0 || cost.cols == 0) return {std::vector<int>(cost.rows, -1), 0.0};
  if (cost.rows <= cost.cols) return solve_wide(cost);

  CostMatrix t(cost.cols, cost.rows);
  for (std::size_t r = 0; r < cost.rows; ++r)
    for (std::size_t c = 0; c < cost.cols; ++c) t(c, r) = cost(r, c);
  const Assignment tr = solve_wide(t);
  Assignment out;
  out.row_to_col.assign(cost.rows, -1);
  for (std::size_t c = 0; c < tr.row_to_col.size(); ++c) out.row_to_col[static_cast<std::size_t>(tr.row_to_col[c])] = static_cast<int>(c);
  out.cost = tr.cost;
  return out;
}

}  // namespace radargap
