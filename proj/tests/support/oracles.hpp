#pragma once

// Test-side reference implementations, independent of the library's
// production code paths. Everything here favors obviousness over speed.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "orderpick/net.hpp"
#include "orderpick/rng.hpp"
#include "orderpick/warehouse.hpp"

namespace oracle {

// breadth-first reachability from `start` over the graph adjacency
inline std::vector<uint8_t> bfs_reachable(const orderpick::WarehouseGraph& graph, int start) {
  std::vector<uint8_t> seen(graph.size(), 0);
  std::queue<int> q;
  q.push(start);
  seen[start] = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (const auto& [v, w] : graph.neighbors(u))
      if (!seen[v]) {
        seen[v] = 1;
        q.push(v);
      }
  }
  return seen;
}

// plain single-source Dijkstra, lazy-deletion heap
inline std::vector<double> dijkstra(const orderpick::WarehouseGraph& graph, int source) {
  std::vector<double> dist(graph.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const auto& [v, w] : graph.neighbors(u))
      if (d + w < dist[v]) {
        dist[v] = d + w;
        heap.emplace(dist[v], v);
      }
  }
  return dist;
}

// argmin Euclidean distance with the lowest-id tie rule
inline int nearest_linear_scan(const orderpick::WarehouseGraph& graph, double x, double y) {
  double best = std::numeric_limits<double>::infinity();
  int best_id = -1;
  for (const auto& loc : graph.locations()) {
    const double dx = x - loc.x, dy = y - loc.y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best) {
      best = d2;
      best_id = loc.id;
    }
  }
  return best_id;
}

// exact open-tour optimum by exhaustive permutation (n <= 8)
inline double brute_force_tsp(const std::vector<int>& required, int start,
                              const std::function<double(int, int)>& dist) {
  std::vector<int> nodes;
  for (int n : required)
    if (n != start) nodes.push_back(n);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  if (nodes.empty()) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  do {
    double len = dist(start, nodes[0]);
    for (size_t i = 1; i < nodes.size(); ++i) len += dist(nodes[i - 1], nodes[i]);
    best = std::min(best, len);
  } while (std::next_permutation(nodes.begin(), nodes.end()));
  return best;
}

// O(T^2) GAE double sum, truncated at done boundaries
inline std::vector<double> brute_force_gae(const std::vector<double>& rewards,
                                           const std::vector<double>& values,
                                           const std::vector<uint8_t>& dones, double gamma,
                                           double lambda) {
  const size_t t_max = rewards.size();
  std::vector<double> adv(t_max, 0.0);
  for (size_t t = 0; t < t_max; ++t) {
    double coef = 1.0;
    for (size_t k = t; k < t_max; ++k) {
      const double not_done = dones[k] ? 0.0 : 1.0;
      const double delta = rewards[k] + gamma * values[k + 1] * not_done - values[k];
      adv[t] += coef * delta;
      if (dones[k]) break;
      coef *= gamma * lambda;
    }
  }
  return adv;
}

// central finite differences of a scalar function of the net parameters
inline std::vector<double> finite_difference(orderpick::Mlp& net,
                                             const std::function<double()>& loss, double h = 1e-5) {
  std::vector<double> grad(net.num_params());
  for (int i = 0; i < net.num_params(); ++i) {
    const double orig = net.params()[i];
    net.params()[i] = orig + h;
    const double up = loss();
    net.params()[i] = orig - h;
    const double down = loss();
    net.params()[i] = orig;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

// random connected warehouse graph on a grid: node 0 is a delivery station,
// a prefix of nodes are item slots, the rest idle points
inline orderpick::WarehouseGraph random_graph(orderpick::Rng& rng, int n, double extra_edge_prob = 0.3) {
  using namespace orderpick;
  std::vector<std::pair<int, int>> cells;
  const int side = std::max(3, static_cast<int>(std::ceil(std::sqrt(n * 2.0))));
  for (int x = 0; x < side; ++x)
    for (int y = 0; y < side; ++y) cells.emplace_back(x, y);
  for (size_t i = cells.size(); i > 1; --i)
    std::swap(cells[i - 1], cells[rng.uniform_int(static_cast<int>(i))]);

  std::vector<Location> locs;
  const int items = std::max(1, n / 3);
  for (int i = 0; i < n; ++i) {
    Location loc;
    loc.id = i;
    loc.x = cells[i].first * 1.5;
    loc.y = cells[i].second * 1.5;
    if (i == 0) {
      loc.kind = LocationKind::DeliveryStation;
    } else if (i <= items) {
      loc.kind = LocationKind::ItemSlot;
      loc.item = i - 1;
    } else {
      loc.kind = LocationKind::IdlePoint;
    }
    locs.push_back(loc);
  }
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i < n; ++i) edges.emplace_back(i, rng.uniform_int(i));  // random tree
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (rng.uniform() < extra_edge_prob / n) edges.emplace_back(a, b);
  return WarehouseGraph(std::move(locs), edges, 1.0);
}

}  // namespace oracle
