#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "orderpick/engine.hpp"
#include "orderpick/spatial_index.hpp"

namespace orderpick {

// Open visiting tour over required nodes, first element is the start node.
struct Route {
  std::vector<int> stops;
  int cursor = 0;

  double length(const PathCache& cache) const;
};

// Nearest-neighbor construction improved by 2-opt until no swap helps, over
// cached shortest-path distances. Deterministic (ties toward lower ids).
Route tsp_route(const std::vector<int>& required, int start, const PathCache& cache);

// Decision maker for all uncommitted agents of one episode. Implementations
// keep per-episode memo state (routes, assignments) and are confined to the
// episode runner that owns them.
class Policy {
public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual void begin_episode(const Engine& engine, uint64_t episode_seed) {}
  virtual JointAction decide(const Engine& engine, const std::vector<int>& need_action) = 0;
};

// uniform draw over the engine-legal mask of each agent
class RandomPolicy final : public Policy {
public:
  std::string name() const override { return "random"; }
  void begin_episode(const Engine& engine, uint64_t episode_seed) override;
  JointAction decide(const Engine& engine, const std::vector<int>& need_action) override;

private:
  Rng rng_;
};

// Follow Me: AGVs are assigned round-robin to pickers; each picker walks a
// TSP route over the concatenated remaining order-lines of its AGVs, and the
// AGVs meet it at the stops that hold their items. Empty AGVs deliver to the
// nearest station and rejoin their picker with the next order.
class FollowMePolicy final : public Policy {
public:
  std::string name() const override { return "fm"; }
  void begin_episode(const Engine& engine, uint64_t episode_seed) override;
  JointAction decide(const Engine& engine, const std::vector<int>& need_action) override;

private:
  void refresh_routes(const Engine& engine);

  std::vector<std::vector<int>> group_;      // picker index -> AGV ids
  std::vector<int> picker_of_agv_;           // AGV id -> picker index
  std::vector<Route> route_;                 // per picker index
  std::vector<std::string> route_signature_; // concatenated order set memo
};

struct ZoneAssignment {
  std::vector<std::vector<int>> zones;  // picker index -> item slot ids
  std::vector<int> zone_of_slot;        // node id -> picker index (-1 off-grid)
};

// Pick Don't Move: pickers own disjoint zones; AGVs run their own TSP routes
// across the whole warehouse; a picker serves the candidate AGV minimizing
// the bottleneck of the two arrival times, and otherwise waits at its zone
// centroid.
class PdmPolicy final : public Policy {
public:
  std::string name() const override { return "pdm"; }
  void begin_episode(const Engine& engine, uint64_t episode_seed) override;
  JointAction decide(const Engine& engine, const std::vector<int>& need_action) override;

  const ZoneAssignment& zones() const { return zones_; }

private:
  int agv_target(const Engine& engine, int v);

  ZoneAssignment zones_;
  std::vector<int> centroid_node_;  // per picker index
  std::vector<Route> agv_route_;    // per AGV id
  std::vector<int> agv_route_order_;
};

// nearest delivery station by cached distance, ties toward the lower id
int nearest_station(const WarehouseGraph& graph, const PathCache& cache, int from);

}  // namespace orderpick
