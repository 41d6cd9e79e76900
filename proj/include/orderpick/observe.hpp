#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "orderpick/engine.hpp"

namespace orderpick::obs {

using Mask = std::vector<uint8_t>;

struct Segment {
  std::string name;
  int offset = 0;
  int length = 0;
};

// Fixed positional layout of a role's observation vector: a block of
// normalized (x, y) current/target coordinates for every agent, followed by
// multi-hot order encodings (1 = line still to pick).
struct ObservationLayout {
  int length = 0;
  std::vector<Segment> segments;
};

ObservationLayout picker_layout(const WarehouseGraph& graph, int num_agents, int num_agvs);
ObservationLayout agv_layout(const WarehouseGraph& graph, int num_agents);

// identical for every picker: all agents' positions plus every AGV's order
Eigen::VectorXd picker_observation(const SimState& state, const WarehouseGraph& graph,
                                   int num_agvs);
// all agents' positions plus only AGV v's own order
Eigen::VectorXd agv_observation(const SimState& state, const WarehouseGraph& graph, int num_agvs,
                                int v);

// Legal targets for AGV v: item slots of its remaining order, delivery
// stations once the order is empty; optionally intersected with a sector
// (membership flags over all locations). A scoped mask may come back empty —
// the caller must not offer such a sector.
Mask agv_mask(const SimState& state, const WarehouseGraph& graph, int v,
              const Mask* sector = nullptr);

// Legal targets for picker p: current and target locations of all AGVs,
// optionally intersected with a sector; falls back to the picker's own
// location when that set is empty.
Mask picker_mask(const SimState& state, const WarehouseGraph& graph, int num_agvs, int p,
                 const Mask* sector = nullptr);

bool mask_any(const Mask& mask);

// per-tick reward from the engine's event list: +0.1 for a pick (picker) or
// received item / completed order (AGV), else -0.05
double reward_from_events(const std::vector<Event>& events, Role role, int agent);

}  // namespace orderpick::obs
