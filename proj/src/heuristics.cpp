#include "orderpick/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace orderpick {

double Route::length(const PathCache& cache) const {
  double total = 0.0;
  for (size_t i = 1; i < stops.size(); ++i) total += cache.dist(stops[i - 1], stops[i]);
  return total;
}

Route tsp_route(const std::vector<int>& required, int start, const PathCache& cache) {
  if (required.empty()) throw std::invalid_argument("tsp_route: no required nodes");
  std::vector<int> todo;
  for (int node : required) {
    if (node < 0 || node >= cache.size()) throw std::invalid_argument("tsp_route: bad node id");
    if (!std::isfinite(cache.dist(start, node)))
      throw std::invalid_argument("tsp_route: node " + std::to_string(node) + " unreachable");
    if (node != start) todo.push_back(node);
  }
  std::sort(todo.begin(), todo.end());
  todo.erase(std::unique(todo.begin(), todo.end()), todo.end());

  Route route;
  route.stops.push_back(start);
  // nearest-neighbor seed
  int cur = start;
  std::vector<uint8_t> used(todo.size(), 0);
  for (size_t step = 0; step < todo.size(); ++step) {
    double best = std::numeric_limits<double>::infinity();
    int best_idx = -1;
    for (size_t i = 0; i < todo.size(); ++i) {
      if (used[i]) continue;
      const double d = cache.dist(cur, todo[i]);
      if (d < best) {
        best = d;
        best_idx = static_cast<int>(i);
      }
    }
    used[best_idx] = 1;
    cur = todo[best_idx];
    route.stops.push_back(cur);
  }

  // 2-opt on the open tour (start fixed) until no improving reversal
  auto& s = route.stops;
  const int m = static_cast<int>(s.size()) - 1;
  bool improved = true;
  while (improved) {
    improved = false;
    for (int i = 1; i <= m - 1; ++i) {
      for (int j = i + 1; j <= m; ++j) {
        const double before = cache.dist(s[i - 1], s[i]) + (j < m ? cache.dist(s[j], s[j + 1]) : 0.0);
        const double after = cache.dist(s[i - 1], s[j]) + (j < m ? cache.dist(s[i], s[j + 1]) : 0.0);
        if (after < before - 1e-12) {
          std::reverse(s.begin() + i, s.begin() + j + 1);
          improved = true;
        }
      }
    }
  }
  return route;
}

int nearest_station(const WarehouseGraph& graph, const PathCache& cache, int from) {
  if (graph.stations().empty()) throw std::logic_error("warehouse has no delivery stations");
  double best = std::numeric_limits<double>::infinity();
  int best_id = -1;
  for (int s : graph.stations()) {
    const double d = cache.dist(from, s);
    if (d < best) {
      best = d;
      best_id = s;
    }
  }
  return best_id;
}

void RandomPolicy::begin_episode(const Engine& engine, uint64_t episode_seed) {
  rng_ = Rng(fnv1a64_u64(episode_seed, 0x72616e646f6dull));
}

JointAction RandomPolicy::decide(const Engine& engine, const std::vector<int>& need_action) {
  JointAction actions(engine.num_agents());
  for (int agent : need_action) {
    const auto mask = engine.action_mask(agent);
    std::vector<int> legal;
    for (int node = 0; node < static_cast<int>(mask.size()); ++node)
      if (mask[node]) legal.push_back(node);
    actions[agent] = legal[rng_.uniform_int(static_cast<int>(legal.size()))];
  }
  return actions;
}

void FollowMePolicy::begin_episode(const Engine& engine, uint64_t) {
  const int num_pickers = engine.num_pickers();
  group_.assign(num_pickers, {});
  picker_of_agv_.assign(engine.num_agvs(), -1);
  for (int v = 0; v < engine.num_agvs(); ++v) {
    picker_of_agv_[v] = v % num_pickers;
    group_[v % num_pickers].push_back(v);
  }
  route_.assign(num_pickers, {});
  route_signature_.assign(num_pickers, "");
}

void FollowMePolicy::refresh_routes(const Engine& engine) {
  const auto& state = engine.state();
  for (size_t p = 0; p < group_.size(); ++p) {
    std::ostringstream sig;
    std::vector<int> required;
    for (int v : group_[p]) {
      const auto& w = state.workers[v];
      if (!w.order) continue;
      sig << 'o' << w.order->id << ':';
      for (size_t i = 0; i < w.order->lines.size(); ++i)
        if (!w.order->picked[i]) {
          sig << w.order->lines[i].item << ',';
          required.push_back(engine.graph().item_node(w.order->lines[i].item));
        }
    }
    if (sig.str() == route_signature_[p]) continue;
    route_signature_[p] = sig.str();
    const int picker_agent = engine.num_agvs() + static_cast<int>(p);
    if (required.empty()) {
      route_[p] = Route{{state.workers[picker_agent].current}, 0};
    } else {
      route_[p] = tsp_route(required, state.workers[picker_agent].current, engine.cache());
    }
  }
}

JointAction FollowMePolicy::decide(const Engine& engine, const std::vector<int>& need_action) {
  refresh_routes(engine);
  const auto& state = engine.state();
  const auto& graph = engine.graph();
  JointAction actions(engine.num_agents());

  // stop has an unpicked line for AGV v (or for anyone with v < 0)
  auto stop_pending = [&](int node, int only_agv, size_t p) {
    const Location& loc = graph.location(node);
    if (loc.kind != LocationKind::ItemSlot) return false;
    for (int v : group_[p]) {
      if (only_agv >= 0 && v != only_agv) continue;
      const auto& w = state.workers[v];
      if (w.order && w.order->remaining_contains(loc.item)) return true;
    }
    return false;
  };

  for (int agent : need_action) {
    const auto& w = state.workers[agent];
    if (w.role == Role::Picker) {
      const size_t p = agent - engine.num_agvs();
      int target = w.current;
      for (int stop : route_[p].stops)
        if (stop_pending(stop, -1, p)) {
          target = stop;
          break;
        }
      actions[agent] = target;
    } else {
      const size_t p = picker_of_agv_[agent];
      if (w.order && w.order->remaining_count() > 0) {
        int target = -1;
        for (int stop : route_[p].stops)
          if (stop_pending(stop, agent, p)) {
            target = stop;
            break;
          }
        if (target < 0) {
          // route momentarily stale; head for the first own remaining slot
          for (size_t i = 0; i < w.order->lines.size(); ++i)
            if (!w.order->picked[i]) {
              target = graph.item_node(w.order->lines[i].item);
              break;
            }
        }
        actions[agent] = target;
      } else {
        actions[agent] = nearest_station(graph, engine.cache(), w.current);
      }
    }
  }
  return actions;
}

void PdmPolicy::begin_episode(const Engine& engine, uint64_t) {
  const auto& graph = engine.graph();
  const int num_pickers = engine.num_pickers();
  if (num_pickers > graph.num_items())
    throw std::invalid_argument("pdm: more pickers than item slots");
  const SectorPartition part = partition_sectors(graph, num_pickers);
  zones_.zones.assign(num_pickers, {});
  zones_.zone_of_slot.assign(graph.size(), -1);
  for (int slot : graph.item_slots()) {
    const int z = part.assignment[slot];
    zones_.zones[z].push_back(slot);
    zones_.zone_of_slot[slot] = z;
  }

  centroid_node_.assign(num_pickers, -1);
  SpatialIndex index(graph);
  for (int p = 0; p < num_pickers; ++p) {
    double cx = 0, cy = 0;
    for (int slot : zones_.zones[p]) {
      cx += graph.location(slot).x;
      cy += graph.location(slot).y;
    }
    const double n = static_cast<double>(zones_.zones[p].size());
    centroid_node_[p] = index.nearest(cx / n, cy / n);
  }

  agv_route_.assign(engine.num_agvs(), {});
  agv_route_order_.assign(engine.num_agvs(), -1);
}

int PdmPolicy::agv_target(const Engine& engine, int v) {
  const auto& state = engine.state();
  const auto& graph = engine.graph();
  const auto& w = state.workers[v];
  if (!w.order || w.order->remaining_count() == 0)
    return nearest_station(graph, engine.cache(), w.current);
  if (agv_route_order_[v] != w.order->id) {
    std::vector<int> required;
    for (size_t i = 0; i < w.order->lines.size(); ++i)
      if (!w.order->picked[i]) required.push_back(graph.item_node(w.order->lines[i].item));
    agv_route_[v] = tsp_route(required, w.current, engine.cache());
    agv_route_order_[v] = w.order->id;
  }
  for (int stop : agv_route_[v].stops) {
    const Location& loc = graph.location(stop);
    if (loc.kind == LocationKind::ItemSlot && w.order->remaining_contains(loc.item)) return stop;
  }
  return nearest_station(graph, engine.cache(), w.current);
}

JointAction PdmPolicy::decide(const Engine& engine, const std::vector<int>& need_action) {
  const auto& state = engine.state();
  const auto& graph = engine.graph();
  const double speed = engine.config().speed;
  JointAction actions(engine.num_agents());

  for (int agent : need_action)
    if (state.workers[agent].role == Role::Agv) actions[agent] = agv_target(engine, agent);

  for (int agent : need_action) {
    const auto& w = state.workers[agent];
    if (w.role != Role::Picker) continue;
    const int p = agent - engine.num_agvs();
    double best = std::numeric_limits<double>::infinity();
    int best_target = -1;
    for (int v = 0; v < engine.num_agvs(); ++v) {
      const auto& agv = state.workers[v];
      if (!agv.order || agv.order->remaining_count() == 0) continue;
      // the AGV's committed target, or the one it is being given right now
      const int target = agv.committed ? agv.target
                                       : (actions[v].has_value() ? *actions[v] : agv.target);
      if (target < 0 || zones_.zone_of_slot[target] != p) continue;
      const Location& loc = graph.location(target);
      if (loc.kind != LocationKind::ItemSlot || !agv.order->remaining_contains(loc.item)) continue;
      const double agv_time =
          agv.committed ? agv.remaining_meters() / speed : engine.cache().dist(agv.current, target) / speed;
      const double picker_time = engine.cache().dist(w.current, target) / speed;
      const double bound = std::max(agv_time, picker_time);
      if (bound < best) {
        best = bound;
        best_target = target;
      }
    }
    actions[agent] = best_target >= 0 ? best_target : centroid_node_[p];
  }
  return actions;
}

}  // namespace orderpick
