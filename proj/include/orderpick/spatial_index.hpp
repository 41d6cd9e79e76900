#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "orderpick/warehouse.hpp"

namespace orderpick {

// Coordinate-to-node resolver: a quantized hash map answers exact position
// queries in O(1), everything else goes through a static 2-D KD-tree.
// Ties are broken toward the lowest node id.
class SpatialIndex {
public:
  explicit SpatialIndex(const WarehouseGraph& graph);
  SpatialIndex(const std::vector<double>& xs, const std::vector<double>& ys);

  int nearest(double x, double y) const;
  int size() const { return static_cast<int>(xs_.size()); }

private:
  struct KdNode {
    int point;  // index into xs_/ys_ (== node id)
    int left = -1;
    int right = -1;
    uint8_t axis = 0;
  };

  void build(std::vector<double> xs, std::vector<double> ys);
  int build_rec(std::vector<int>& ids, int lo, int hi, int depth);
  void search(int node, double x, double y, double& best_d2, int& best_id) const;
  static uint64_t key(double x, double y);

  std::vector<double> xs_, ys_;
  std::vector<KdNode> nodes_;
  int root_ = -1;
  std::unordered_map<uint64_t, int> exact_;
};

}  // namespace orderpick
