#include "radargap/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace radargap {

TransportPlan solve_transport(const CostMatrix& cost, std::span<const std::int64_t> supply,
                              std::span<const std::int64_t> demand) {
  const std::size_t m = cost.rows;
  const std::size_t n = cost.cols;
  if (supply.size() != m || demand.size() != n) throw std::invalid_argument("solve_transport: shape mismatch");
  for (const double c : cost.values) {
    if (!std::isfinite(c) || c < 0.0) throw std::invalid_argument("solve_transport: costs must be finite and >= 0");
  }
  if (std::any_of(supply.begin(), supply.end(), [](auto s) { return s < 0; }) ||
      std::any_of(demand.begin(), demand.end(), [](auto d) { return d < 0; })) {
    throw std::invalid_argument("solve_transport: negative supply or demand");
  }
  const std::int64_t total = std::accumulate(supply.begin(), supply.end(), std::int64_t{0});
  if (total != std::accumulate(demand.begin(), demand.end(), std::int64_t{0})) {
    throw std::invalid_argument("solve_transport: unbalanced problem");
  }

  TransportPlan plan;
  plan.rows = m;
  plan.cols = n;
  plan.flow.assign(m * n, 0);
  if (total == 0) return plan;

  // Nodes 0..m-1 are sources, m..m+n-1 are sinks.
  const std::size_t v = m + n;
  std::vector<std::int64_t> left(supply.begin(), supply.end());
  std::vector<std::int64_t> need(demand.begin(), demand.end());
  std::vector<double> potential(v, 0.0);
  std::vector<double> dist(v);
  std::vector<std::size_t> pred(v);
  std::vector<bool> done(v);
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

  std::int64_t remaining = total;
  while (remaining > 0) {
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(pred.begin(), pred.end(), none);
    std::fill(done.begin(), done.end(), false);
    for (std::size_t i = 0; i < m; ++i)
      if (left[i] > 0) dist[i] = 0.0;

    std::size_t target = none;
    while (true) {
      std::size_t u = none;
      double best = inf;
      for (std::size_t k = 0; k < v; ++k) {
        if (!done[k] && dist[k] < best) {
          best = dist[k];
          u = k;
        }
      }
      if (u == none) break;
      done[u] = true;
      if (u >= m && need[u - m] > 0) {
        target = u;
        break;
      }
      if (u < m) {
        for (std::size_t j = 0; j < n; ++j) {
          const std::size_t w = m + j;
          if (done[w]) continue;
          const double rc = std::max(0.0, cost(u, j) + potential[u] - potential[w]);
          if (dist[u] + rc < dist[w]) {
            dist[w] = dist[u] + rc;
            pred[w] = u;
          }
        }
      } else {
        const std::size_t j = u - m;
        for (std::size_t i = 0; i < m; ++i) {
          if (done[i] || plan.flow[i * n + j] == 0) continue;
          const double rc = std::max(0.0, -cost(i, j) + potential[u] - potential[i]);
          if (dist[u] + rc < dist[i]) {
            dist[i] = dist[u] + rc;
            pred[i] = u;
          }
        }
      }
    }
    if (target == none) throw std::logic_error("solve_transport: no augmenting path in a balanced problem");

    const double dt = dist[target];
    for (std::size_t k = 0; k < v; ++k) potential[k] += std::min(dist[k], dt);

    // Bottleneck along the path (backward arcs limited by their flow).
    std::int64_t amount = need[target - m];
    std::size_t node = target;
    while (pred[node] != none) {
      const std::size_t p = pred[node];
      if (p >= m) amount = std::min(amount, plan.flow[node * n + (p - m)]);  // sink p -> source node
      node = p;
    }
    amount = std::min(amount, left[node]);

    node = target;
    while (pred[node] != none) {
      const std::size_t p = pred[node];
      if (p < m) {
        plan.flow[p * n + (node - m)] += amount;
      } else {
        plan.flow[node * n + (p - m)] -= amount;
      }
      node = p;
    }
    left[node] -= amount;
    need[target - m] -= amount;
    remaining -= amount;
  }

  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) plan.cost += static_cast<double>(plan.flow[i * n + j]) * cost(i, j);
  return plan;
}

double emd_uniform(const CostMatrix& ground) {
  if (ground.rows == 0 || ground.cols == 0) throw std::invalid_argument("emd_uniform: empty distribution");
  const auto m = static_cast<std::int64_t>(ground.rows);
  const auto n = static_cast<std::int64_t>(ground.cols);
  // Row i carries n units and column j carries m units: both sides sum to m * n.
  const std::vector<std::int64_t> supply(ground.rows, n);
  const std::vector<std::int64_t> demand(ground.cols, m);
  const auto plan = solve_transport(ground, supply, demand);
  return plan.cost / static_cast<double>(m * n);
}

}  // namespace radargap
