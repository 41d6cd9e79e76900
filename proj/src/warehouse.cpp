#include "orderpick/warehouse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace orderpick {

namespace {

constexpr double kAislePitch = 3.0;  // meters between aisles, unscaled
constexpr double kSlotPitch = 1.5;   // meters between slots, unscaled

double euclid(const Location& a, const Location& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace

const char* to_string(LocationKind kind) {
  switch (kind) {
    case LocationKind::ItemSlot: return "item_slot";
    case LocationKind::IdlePoint: return "idle_point";
    case LocationKind::DeliveryStation: return "delivery_station";
  }
  return "?";
}

WarehouseGraph::WarehouseGraph(std::vector<Location> locations,
                               const std::vector<std::pair<int, int>>& edges, double scale)
    : locations_(std::move(locations)), scale_(scale) {
  if (locations_.empty()) throw std::invalid_argument("warehouse: no locations");
  if (!(scale_ > 0.0)) throw std::invalid_argument("warehouse: scale must be positive");
  const int n = static_cast<int>(locations_.size());
  for (int i = 0; i < n; ++i) {
    if (locations_[i].id != i)
      throw std::invalid_argument("warehouse: location ids must be dense 0..n-1");
    if ((locations_[i].kind == LocationKind::ItemSlot) != (locations_[i].item >= 0))
      throw std::invalid_argument("warehouse: item id present iff location is an item slot");
  }
  adj_.resize(n);
  for (auto [a, b] : edges) {
    if (a < 0 || a >= n || b < 0 || b >= n || a == b)
      throw std::invalid_argument("warehouse: bad edge endpoint");
    const double w = euclid(locations_[a], locations_[b]);
    if (!(w > 0.0)) throw std::invalid_argument("warehouse: zero-length edge (duplicate position?)");
    adj_[a].emplace_back(b, w);
    adj_[b].emplace_back(a, w);
  }
  for (auto& nbrs : adj_) std::sort(nbrs.begin(), nbrs.end());

  int max_item = -1;
  for (const auto& loc : locations_) {
    if (loc.kind == LocationKind::ItemSlot) {
      item_slot_ids_.push_back(loc.id);
      max_item = std::max(max_item, loc.item);
    } else if (loc.kind == LocationKind::DeliveryStation) {
      station_ids_.push_back(loc.id);
    } else {
      idle_ids_.push_back(loc.id);
    }
  }
  item_nodes_.assign(max_item + 1, -1);
  for (int id : item_slot_ids_) {
    const Location& loc = locations_[id];
    if (item_nodes_[loc.item] != -1)
      throw std::invalid_argument("warehouse: duplicate item id across slots");
    item_nodes_[loc.item] = id;
  }
  for (int node : item_nodes_)
    if (node == -1) throw std::invalid_argument("warehouse: item ids must be dense");

  min_x_ = min_y_ = std::numeric_limits<double>::infinity();
  max_x_ = max_y_ = -std::numeric_limits<double>::infinity();
  for (const auto& loc : locations_) {
    min_x_ = std::min(min_x_, loc.x);
    min_y_ = std::min(min_y_, loc.y);
    max_x_ = std::max(max_x_, loc.x);
    max_y_ = std::max(max_y_, loc.y);
  }
}

uint64_t WarehouseGraph::layout_hash() const {
  uint64_t h = 0xcbf29ce484222325ull;
  h = fnv1a64_u64(static_cast<uint64_t>(locations_.size()), h);
  for (const auto& loc : locations_) {
    h = fnv1a64_u64(static_cast<uint64_t>(loc.kind), h);
    h = fnv1a64_u64(static_cast<uint64_t>(loc.item + 1), h);
    h = fnv1a64_u64(static_cast<uint64_t>(llround(loc.x * 1e9)), h);
    h = fnv1a64_u64(static_cast<uint64_t>(llround(loc.y * 1e9)), h);
  }
  for (int a = 0; a < size(); ++a)
    for (const auto& [b, w] : adj_[a])
      if (a < b) {
        h = fnv1a64_u64(static_cast<uint64_t>(a), h);
        h = fnv1a64_u64(static_cast<uint64_t>(b), h);
      }
  return h;
}

bool WarehouseGraph::fully_connected() const {
  if (locations_.empty()) return false;
  std::vector<uint8_t> seen(locations_.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  size_t reached = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (const auto& [v, w] : adj_[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
  }
  return reached == locations_.size();
}

WarehouseGraph generate_layout(int aisles, int slots_per_aisle, int stations, double scale) {
  if (aisles < 1 || slots_per_aisle < 1 || stations < 1)
    throw std::invalid_argument("generate_layout: counts must be at least 1");
  if (!(scale > 0.0)) throw std::invalid_argument("generate_layout: scale must be positive");

  const double ax = kAislePitch * scale;
  const double sy = kSlotPitch * scale;
  std::vector<Location> locs;
  std::vector<std::pair<int, int>> edges;
  const int n_items = aisles * slots_per_aisle;

  // item slot columns, aisle-major
  for (int a = 0; a < aisles; ++a)
    for (int s = 0; s < slots_per_aisle; ++s) {
      const int id = a * slots_per_aisle + s;
      locs.push_back({id, LocationKind::ItemSlot, a * ax, (s + 1) * sy, id});
    }
  // front and back cross-aisles
  const int front0 = n_items;
  const int back0 = n_items + aisles;
  for (int a = 0; a < aisles; ++a)
    locs.push_back({front0 + a, LocationKind::IdlePoint, a * ax, 0.0, -1});
  for (int a = 0; a < aisles; ++a)
    locs.push_back({back0 + a, LocationKind::IdlePoint, a * ax, (slots_per_aisle + 1) * sy, -1});
  // delivery stations hang south of evenly spread front columns
  const int st0 = back0 + aisles;
  std::vector<int> per_column(aisles, 0);
  for (int d = 0; d < stations; ++d) {
    int col = static_cast<int>((2ll * d + 1) * aisles / (2ll * stations));
    col = std::min(col, aisles - 1);
    per_column[col] += 1;
    locs.push_back({st0 + d, LocationKind::DeliveryStation, col * ax, -sy * per_column[col], -1});
    edges.emplace_back(st0 + d, per_column[col] == 1 ? front0 + col : st0 + d - 1);
  }

  for (int a = 0; a < aisles; ++a) {
    const int slot0 = a * slots_per_aisle;
    edges.emplace_back(front0 + a, slot0);
    for (int s = 0; s + 1 < slots_per_aisle; ++s) edges.emplace_back(slot0 + s, slot0 + s + 1);
    edges.emplace_back(slot0 + slots_per_aisle - 1, back0 + a);
    if (a + 1 < aisles) {
      edges.emplace_back(front0 + a, front0 + a + 1);
      edges.emplace_back(back0 + a, back0 + a + 1);
    }
  }
  return WarehouseGraph(std::move(locs), edges, scale);
}

std::string export_layout(const WarehouseGraph& graph) {
  std::ostringstream os;
  os << "# nodes: id kind x y item\n";
  for (const auto& loc : graph.locations()) {
    os << loc.id << ' ' << to_string(loc.kind) << ' ' << loc.x << ' ' << loc.y;
    if (loc.item >= 0) os << ' ' << loc.item;
    os << '\n';
  }
  os << "# edges: a b weight\n";
  for (int a = 0; a < graph.size(); ++a)
    for (const auto& [b, w] : graph.neighbors(a))
      if (a < b) os << a << ' ' << b << ' ' << w << '\n';
  return os.str();
}

int Order::remaining_count() const {
  int n = 0;
  for (uint8_t p : picked) n += (p == 0);
  return n;
}

bool Order::remaining_contains(int item) const {
  for (size_t i = 0; i < lines.size(); ++i)
    if (!picked[i] && lines[i].item == item) return true;
  return false;
}

std::vector<int> Order::remaining_lines_for(int item) const {
  std::vector<int> out;
  for (size_t i = 0; i < lines.size(); ++i)
    if (!picked[i] && lines[i].item == item) out.push_back(static_cast<int>(i));
  return out;
}

OrderProfile::OrderProfile(double mean_length, int min_length, int max_length,
                           std::vector<double> item_weights)
    : mean_length_(mean_length), min_length_(min_length), max_length_(max_length),
      weights_(std::move(item_weights)) {
  if (min_length_ < 1 || max_length_ < min_length_)
    throw std::invalid_argument("order profile: need 1 <= min <= max");
  if (!(mean_length_ >= min_length_ && mean_length_ <= max_length_))
    throw std::invalid_argument("order profile: need min <= mean <= max");
  if (weights_.empty()) throw std::invalid_argument("order profile: no items");
  double total = 0.0;
  for (double w : weights_) {
    if (w < 0.0 || !std::isfinite(w)) throw std::invalid_argument("order profile: bad item weight");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("order profile: weights sum to zero");
  for (double& w : weights_) w /= total;

  // Poisson pmf renormalised on [min, max]; lengths are sampled by CDF walk
  length_pmf_.resize(max_length_ - min_length_ + 1);
  double mass = 0.0;
  for (int len = min_length_; len <= max_length_; ++len) {
    double logp = len * std::log(mean_length_) - mean_length_ - std::lgamma(len + 1.0);
    length_pmf_[len - min_length_] = std::exp(logp);
    mass += length_pmf_[len - min_length_];
  }
  for (double& p : length_pmf_) p /= mass;
}

OrderProfile OrderProfile::uniform(double mean_length, int min_length, int max_length,
                                   int num_items) {
  if (num_items < 1) throw std::invalid_argument("order profile: need at least one item");
  return OrderProfile(mean_length, min_length, max_length,
                      std::vector<double>(num_items, 1.0 / num_items));
}

Order sample_order(const OrderProfile& profile, Rng& rng, int order_id) {
  const auto& pmf = profile.length_pmf();
  double r = rng.uniform();
  int length = profile.max_length();
  for (size_t i = 0; i < pmf.size(); ++i) {
    r -= pmf[i];
    if (r < 0.0) {
      length = profile.min_length() + static_cast<int>(i);
      break;
    }
  }
  length = std::min(length, profile.num_items());  // without-replacement cap

  Order order;
  order.id = order_id;
  std::vector<double> weights = profile.item_weights();
  for (int k = 0; k < length; ++k) {
    const int item = rng.weighted(weights);
    weights[item] = 0.0;
    order.lines.push_back({item, 1});
  }
  order.picked.assign(order.lines.size(), 0);
  return order;
}

SectorPartition partition_sectors(const WarehouseGraph& graph, int k) {
  const int n = graph.size();
  if (k < 1 || k > n) throw std::invalid_argument("partition_sectors: need 1 <= k <= |L|");

  auto spatial_less = [&](int a, int b) {
    const Location& la = graph.location(a);
    const Location& lb = graph.location(b);
    if (la.x != lb.x) return la.x < lb.x;
    if (la.y != lb.y) return la.y < lb.y;
    return a < b;
  };

  SectorPartition part;
  part.sectors.resize(k);
  part.assignment.assign(n, -1);

  std::vector<int> items = graph.item_slots();
  std::sort(items.begin(), items.end(), spatial_less);
  const int n_items = static_cast<int>(items.size());

  if (k <= n_items) {
    // balanced contiguous bands over the item grid
    const int base = n_items / k;
    const int extra = n_items % k;
    int cursor = 0;
    for (int s = 0; s < k; ++s) {
      const int take = base + (s < extra ? 1 : 0);
      for (int i = 0; i < take; ++i) part.assignment[items[cursor++]] = s;
    }
    // non-item locations join the sector of their nearest item slot
    for (int id = 0; id < n; ++id) {
      if (part.assignment[id] != -1) continue;
      const Location& loc = graph.location(id);
      double best = std::numeric_limits<double>::infinity();
      int best_sector = 0;
      for (int slot : graph.item_slots()) {
        const Location& sl = graph.location(slot);
        const double dx = loc.x - sl.x, dy = loc.y - sl.y;
        const double d2 = dx * dx + dy * dy;
        const int sec = part.assignment[slot];
        if (d2 < best || (d2 == best && sec < best_sector)) {
          best = d2;
          best_sector = sec;
        }
      }
      part.assignment[id] = best_sector;
    }
  } else {
    // more sectors than item slots: balanced bands over all locations,
    // so k == |L| degenerates to singleton sectors
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    std::sort(all.begin(), all.end(), spatial_less);
    const int base = n / k;
    const int extra = n % k;
    int cursor = 0;
    for (int s = 0; s < k; ++s) {
      const int take = base + (s < extra ? 1 : 0);
      for (int i = 0; i < take; ++i) part.assignment[all[cursor++]] = s;
    }
  }

  for (int id = 0; id < n; ++id) part.sectors[part.assignment[id]].push_back(id);
  for (const auto& sector : part.sectors)
    if (sector.empty()) throw std::logic_error("partition_sectors: empty sector");
  return part;
}

void WorkerSpec::validate() const {
  if (num_agvs < 1 || num_pickers < 1)
    throw std::invalid_argument("worker spec: need at least one AGV and one picker");
  if (!(speed > 0.0)) throw std::invalid_argument("worker spec: speed must be positive");
}

}  // namespace orderpick
