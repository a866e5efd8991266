#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace radargap {

/// Dense row-major cost matrix.
struct CostMatrix {
  std::size_t rows{0};
  std::size_t cols{0};
  std::vector<double> values;

  CostMatrix() = default;
  CostMatrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), values(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

struct Assignment {
  /// row_to_col[r] is the column assigned to row r, or -1 when the row is left out
  /// (only possible when rows > cols).
  std::vector<int> row_to_col;
  double cost{0.0};
};

/// Exact minimum-cost rectangular assignment (shortest augmenting path Hungarian method).
/// Every row is matched when rows <= cols, otherwise every column is.
Assignment solve_assignment(const CostMatrix& cost);

}  // namespace radargap
