#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "orderpick/rng.hpp"

namespace orderpick {

enum class LocationKind { ItemSlot, IdlePoint, DeliveryStation };

const char* to_string(LocationKind kind);

struct Location {
  int id = -1;
  LocationKind kind = LocationKind::IdlePoint;
  double x = 0.0;
  double y = 0.0;
  int item = -1;  // valid iff kind == ItemSlot
};

// Undirected location graph with Euclidean edge weights (scaled meters).
// Immutable after construction; shared read-only across simulator instances.
class WarehouseGraph {
public:
  // Edge weights are derived from endpoint positions, never supplied.
  WarehouseGraph(std::vector<Location> locations, const std::vector<std::pair<int, int>>& edges,
                 double scale = 1.0);

  int size() const { return static_cast<int>(locations_.size()); }
  const Location& location(int id) const { return locations_.at(id); }
  const std::vector<Location>& locations() const { return locations_; }
  const std::vector<std::pair<int, double>>& neighbors(int id) const { return adj_.at(id); }

  double scale() const { return scale_; }
  int num_items() const { return static_cast<int>(item_nodes_.size()); }
  int item_node(int item) const { return item_nodes_.at(item); }
  const std::vector<int>& item_slots() const { return item_slot_ids_; }
  const std::vector<int>& stations() const { return station_ids_; }
  const std::vector<int>& idle_points() const { return idle_ids_; }

  double min_x() const { return min_x_; }
  double min_y() const { return min_y_; }
  double max_x() const { return max_x_; }
  double max_y() const { return max_y_; }

  // fingerprint over geometry and topology, used to key path-cache dumps
  uint64_t layout_hash() const;

  // every location must be reachable from every delivery station
  bool fully_connected() const;

private:
  std::vector<Location> locations_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
  double scale_ = 1.0;
  std::vector<int> item_nodes_;    // item id -> node id
  std::vector<int> item_slot_ids_; // node ids of kind ItemSlot, ascending
  std::vector<int> station_ids_;
  std::vector<int> idle_ids_;
  double min_x_ = 0, min_y_ = 0, max_x_ = 0, max_y_ = 0;
};

// Parametric single-block parallel-aisle layout: one item slot column per
// aisle, cross-aisles of idle points at both ends, delivery stations hanging
// off the front cross-aisle. All coordinates are multiplied by `scale`.
WarehouseGraph generate_layout(int aisles, int slots_per_aisle, int stations, double scale);

// Plain-text node/edge listing for debugging.
std::string export_layout(const WarehouseGraph& graph);

struct OrderLine {
  int item = -1;
  int quantity = 1;
};

struct Order {
  int id = -1;
  std::vector<OrderLine> lines;
  std::vector<uint8_t> picked;  // per line

  int remaining_count() const;
  bool remaining_contains(int item) const;
  // indices of unpicked lines carrying `item`
  std::vector<int> remaining_lines_for(int item) const;
};

// Order length distribution: Poisson(mean) renormalised on [min, max],
// items drawn without replacement by weight. Quantities are fixed to 1.
class OrderProfile {
public:
  OrderProfile(double mean_length, int min_length, int max_length, std::vector<double> item_weights);

  static OrderProfile uniform(double mean_length, int min_length, int max_length, int num_items);

  double mean_length() const { return mean_length_; }
  int min_length() const { return min_length_; }
  int max_length() const { return max_length_; }
  int num_items() const { return static_cast<int>(weights_.size()); }
  const std::vector<double>& item_weights() const { return weights_; }

  // probability of each length in [min, max] (sums to 1)
  const std::vector<double>& length_pmf() const { return length_pmf_; }

private:
  double mean_length_;
  int min_length_;
  int max_length_;
  std::vector<double> weights_;     // normalised to sum 1
  std::vector<double> length_pmf_;  // index 0 -> min_length
};

Order sample_order(const OrderProfile& profile, Rng& rng, int order_id = -1);

struct SectorPartition {
  std::vector<std::vector<int>> sectors;  // sector -> ascending location ids
  std::vector<int> assignment;            // location id -> sector index

  int count() const { return static_cast<int>(sectors.size()); }
};

// Splits the warehouse into k spatially contiguous column bands. Item slots
// are balanced to within one per sector; other locations join the sector of
// their nearest item slot. With k above the item count the split runs over
// all locations instead, so k == |L| yields singleton sectors.
SectorPartition partition_sectors(const WarehouseGraph& graph, int k);

struct WorkerSpec {
  int num_agvs = 1;
  int num_pickers = 1;
  double speed = 1.66;               // meters/second, scaled space
  std::vector<int> start_locations;  // empty -> idle points, front row first

  void validate() const;
};

}  // namespace orderpick
