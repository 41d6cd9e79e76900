#include "orderpick/path_cache.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <queue>
#include <stdexcept>

namespace orderpick {

PathCache PathCache::precompute(const WarehouseGraph& graph) {
  const int n = graph.size();
  PathCache cache;
  cache.n_ = n;
  cache.layout_hash_ = graph.layout_hash();
  cache.dist_.assign(static_cast<size_t>(n) * n, std::numeric_limits<double>::infinity());
  cache.next_.assign(static_cast<size_t>(n) * n, -1);

  std::vector<double> d(n);
  std::vector<int> parent(n);
  using Item = std::pair<double, int>;
  for (int s = 0; s < n; ++s) {
    std::fill(d.begin(), d.end(), std::numeric_limits<double>::infinity());
    std::fill(parent.begin(), parent.end(), -1);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    d[s] = 0.0;
    parent[s] = s;
    heap.emplace(0.0, s);
    while (!heap.empty()) {
      auto [du, u] = heap.top();
      heap.pop();
      if (du > d[u]) continue;
      for (const auto& [v, w] : graph.neighbors(u)) {
        const double nd = du + w;
        if (nd < d[v]) {
          d[v] = nd;
          parent[v] = u;
          heap.emplace(nd, v);
        } else if (nd == d[v] && u < parent[v]) {
          parent[v] = u;  // deterministic tie-break toward lower ids
        }
      }
    }
    if (s == 0) {
      for (int v = 0; v < n; ++v)
        if (!std::isfinite(d[v]))
          throw std::invalid_argument("path cache: graph disconnected, no path between nodes 0 and " +
                                      std::to_string(v));
    }
    // row s: distances from s; column s: next hop toward s (the Dijkstra
    // parent of a node points one step back along the path from s)
    for (int v = 0; v < n; ++v) {
      cache.dist_[static_cast<size_t>(s) * n + v] = d[v];
      cache.next_[static_cast<size_t>(v) * n + s] = parent[v];
    }
  }
  return cache;
}

std::vector<int> PathCache::path(int a, int b) const {
  check(a), check(b);
  std::vector<int> out{a};
  int cur = a;
  while (cur != b) {
    cur = next_hop(cur, b);
    out.push_back(cur);
    if (static_cast<int>(out.size()) > n_)
      throw std::logic_error("path cache: next-hop chain did not reach target");
  }
  return out;
}

namespace {
constexpr char kMagic[8] = {'O', 'P', 'C', 'A', 'C', 'H', 'E', '1'};
}

void PathCache::save(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("path cache: cannot open " + path + " for writing");
  bool ok = std::fwrite(kMagic, 1, 8, f) == 8;
  const uint64_t n64 = static_cast<uint64_t>(n_);
  ok = ok && std::fwrite(&layout_hash_, sizeof(layout_hash_), 1, f) == 1;
  ok = ok && std::fwrite(&n64, sizeof(n64), 1, f) == 1;
  ok = ok && std::fwrite(dist_.data(), sizeof(double), dist_.size(), f) == dist_.size();
  ok = ok && std::fwrite(next_.data(), sizeof(int32_t), next_.size(), f) == next_.size();
  ok = (std::fclose(f) == 0) && ok;
  if (!ok) throw std::runtime_error("path cache: failed writing " + path);
}

PathCache PathCache::load(const std::string& path, const WarehouseGraph& graph) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("path cache: cannot open " + path);
  char magic[8];
  uint64_t hash = 0, n64 = 0;
  bool ok = std::fread(magic, 1, 8, f) == 8 && std::memcmp(magic, kMagic, 8) == 0;
  ok = ok && std::fread(&hash, sizeof(hash), 1, f) == 1;
  ok = ok && std::fread(&n64, sizeof(n64), 1, f) == 1;
  if (!ok) {
    std::fclose(f);
    throw std::runtime_error("path cache: corrupt file " + path);
  }
  if (hash != graph.layout_hash() || static_cast<int>(n64) != graph.size()) {
    std::fclose(f);
    throw std::runtime_error("path cache: layout hash mismatch for " + path);
  }
  PathCache cache;
  cache.n_ = static_cast<int>(n64);
  cache.layout_hash_ = hash;
  cache.dist_.resize(n64 * n64);
  cache.next_.resize(n64 * n64);
  ok = std::fread(cache.dist_.data(), sizeof(double), cache.dist_.size(), f) == cache.dist_.size();
  ok = ok && std::fread(cache.next_.data(), sizeof(int32_t), cache.next_.size(), f) == cache.next_.size();
  std::fclose(f);
  if (!ok) throw std::runtime_error("path cache: truncated file " + path);
  return cache;
}

}  // namespace orderpick
