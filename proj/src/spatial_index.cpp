#include "orderpick/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace orderpick {

SpatialIndex::SpatialIndex(const WarehouseGraph& graph) {
  std::vector<double> xs, ys;
  xs.reserve(graph.size());
  ys.reserve(graph.size());
  for (const auto& loc : graph.locations()) {
    xs.push_back(loc.x);
    ys.push_back(loc.y);
  }
  build(std::move(xs), std::move(ys));
}

SpatialIndex::SpatialIndex(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("spatial index: size mismatch");
  build(xs, ys);
}

uint64_t SpatialIndex::key(double x, double y) {
  // 1e-6 m quantization keeps float keys stable
  const auto qx = static_cast<int64_t>(llround(x * 1e6));
  const auto qy = static_cast<int64_t>(llround(y * 1e6));
  return (static_cast<uint64_t>(static_cast<uint32_t>(qx)) << 32) |
         static_cast<uint64_t>(static_cast<uint32_t>(qy));
}

void SpatialIndex::build(std::vector<double> xs, std::vector<double> ys) {
  if (xs.empty()) throw std::invalid_argument("spatial index: no points");
  xs_ = std::move(xs);
  ys_ = std::move(ys);
  for (int i = 0; i < size(); ++i) {
    auto [it, inserted] = exact_.try_emplace(key(xs_[i], ys_[i]), i);
    if (!inserted) it->second = std::min(it->second, i);
  }
  std::vector<int> ids(size());
  for (int i = 0; i < size(); ++i) ids[i] = i;
  nodes_.reserve(size());
  root_ = build_rec(ids, 0, size(), 0);
}

int SpatialIndex::build_rec(std::vector<int>& ids, int lo, int hi, int depth) {
  if (lo >= hi) return -1;
  const uint8_t axis = static_cast<uint8_t>(depth % 2);
  const int mid = lo + (hi - lo) / 2;
  auto axis_less = [&](int a, int b) {
    const double va = axis == 0 ? xs_[a] : ys_[a];
    const double vb = axis == 0 ? xs_[b] : ys_[b];
    if (va != vb) return va < vb;
    return a < b;
  };
  std::nth_element(ids.begin() + lo, ids.begin() + mid, ids.begin() + hi, axis_less);
  const int self = static_cast<int>(nodes_.size());
  nodes_.push_back({ids[mid], -1, -1, axis});
  const int left = build_rec(ids, lo, mid, depth + 1);
  const int right = build_rec(ids, mid + 1, hi, depth + 1);
  nodes_[self].left = left;
  nodes_[self].right = right;
  return self;
}

void SpatialIndex::search(int node, double x, double y, double& best_d2, int& best_id) const {
  if (node < 0) return;
  const KdNode& kd = nodes_[node];
  const double px = xs_[kd.point], py = ys_[kd.point];
  const double dx = x - px, dy = y - py;
  const double d2 = dx * dx + dy * dy;
  if (d2 < best_d2 || (d2 == best_d2 && kd.point < best_id)) {
    best_d2 = d2;
    best_id = kd.point;
  }
  const double diff = kd.axis == 0 ? x - px : y - py;
  const int near = diff < 0 ? kd.left : kd.right;
  const int far = diff < 0 ? kd.right : kd.left;
  search(near, x, y, best_d2, best_id);
  // equal-distance subtrees must still be explored for the id tie rule
  if (diff * diff <= best_d2) search(far, x, y, best_d2, best_id);
}

int SpatialIndex::nearest(double x, double y) const {
  if (auto it = exact_.find(key(x, y)); it != exact_.end()) {
    const int id = it->second;
    if (xs_[id] == x && ys_[id] == y) return id;
  }
  double best_d2 = std::numeric_limits<double>::infinity();
  int best_id = std::numeric_limits<int>::max();
  search(root_, x, y, best_d2, best_id);
  return best_id;
}

}  // namespace orderpick
