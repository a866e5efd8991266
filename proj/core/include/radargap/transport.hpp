#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "radargap/assignment.hpp"

namespace radargap {

struct TransportPlan {
  std::size_t rows{0};
  std::size_t cols{0};
  std::vector<std::int64_t> flow;  ///< row-major, rows x cols
  double cost{0.0};                ///< sum of flow * ground cost

  [[nodiscard]] std::int64_t operator()(std::size_t r, std::size_t c) const { return flow[r * cols + c]; }
};

/// Exact balanced transportation problem with integer supplies and demands, solved by
/// successive shortest augmenting paths with Dijkstra on reduced costs. Costs must be
/// non-negative and finite; totals must match.
TransportPlan solve_transport(const CostMatrix& cost, std::span<const std::int64_t> supply,
                              std::span<const std::int64_t> demand);

/// Earth Mover's Distance between uniform distributions on the rows (mass 1/rows each)
/// and the columns (mass 1/cols each) of a ground-distance matrix.
double emd_uniform(const CostMatrix& ground);

}  // namespace radargap
