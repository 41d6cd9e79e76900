#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orderpick/warehouse.hpp"

namespace orderpick {

// All-pairs shortest paths. Row s of the distance matrix comes from one
// Dijkstra run with source s; the same run fills next-hop column s, so a path
// toward b is reconstructed by following next_hop(.., b) one node at a time.
// Much smaller than caching full path lists at the same per-hop lookup cost.
// Immutable after construction.
class PathCache {
public:
  static PathCache precompute(const WarehouseGraph& graph);

  int size() const { return n_; }
  uint64_t layout_hash() const { return layout_hash_; }

  double dist(int a, int b) const {
    check(a), check(b);
    return dist_[static_cast<size_t>(a) * n_ + b];
  }

  int next_hop(int a, int b) const {
    check(a), check(b);
    return next_[static_cast<size_t>(a) * n_ + b];
  }

  // full node sequence a..b; length equals dist(a, b)
  std::vector<int> path(int a, int b) const;

  size_t memory_bytes() const { return dist_.size() * sizeof(double) + next_.size() * sizeof(int32_t); }

  // binary dump keyed by the layout hash; load refuses a mismatched graph
  void save(const std::string& path) const;
  static PathCache load(const std::string& path, const WarehouseGraph& graph);

private:
  PathCache() = default;
  void check(int id) const {
    if (id < 0 || id >= n_) throw std::invalid_argument("path cache: node id out of range");
  }

  int n_ = 0;
  uint64_t layout_hash_ = 0;
  std::vector<double> dist_;
  std::vector<int32_t> next_;
};

}  // namespace orderpick
