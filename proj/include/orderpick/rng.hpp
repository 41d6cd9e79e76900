#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace orderpick {

// Deterministic random source. All draws go through explicit helpers because
// mt19937_64 is fully specified by the standard while std::*_distribution is
// implementation-defined; this keeps seeded runs reproducible everywhere.
class Rng {
public:
  explicit Rng(uint64_t seed = 0) : eng_(seed) {}

  uint64_t raw() { return eng_(); }

  // uniform double in [0, 1)
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, n)
  int uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("Rng::uniform_int: n must be positive");
    const uint64_t un = static_cast<uint64_t>(n);
    const uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return static_cast<int>(x % un);
  }

  // standard normal via Box-Muller, two fresh draws per sample
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  // index draw proportional to non-negative weights (not necessarily normalised)
  int weighted(const std::vector<double>& w) {
    double total = 0.0;
    for (double x : w) total += x;
    if (!(total > 0.0)) throw std::invalid_argument("Rng::weighted: weights must have positive sum");
    double r = uniform() * total;
    for (size_t i = 0; i < w.size(); ++i) {
      r -= w[i];
      if (r < 0.0) return static_cast<int>(i);
    }
    // numerical tail: return the last index with positive weight
    for (size_t i = w.size(); i-- > 0;)
      if (w[i] > 0.0) return static_cast<int>(i);
    return static_cast<int>(w.size()) - 1;
  }

  std::string state() const {
    std::ostringstream os;
    os << eng_;
    return os.str();
  }

  bool operator==(const Rng& other) const { return eng_ == other.eng_; }

private:
  std::mt19937_64 eng_;
};

// 64-bit FNV-1a, used for layout and config fingerprints
inline uint64_t fnv1a64(const void* data, size_t len, uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t fnv1a64_u64(uint64_t v, uint64_t h) { return fnv1a64(&v, sizeof(v), h); }

inline uint64_t fnv1a64_double(double v, uint64_t h) {
  uint64_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, sizeof(bits));
  return fnv1a64_u64(bits, h);
}

inline std::string hash_hex(uint64_t h) {
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = "0123456789abcdef"[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace orderpick
