#pragma once

#include <cstdint>
#include <vector>

namespace orderpick {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantage + value
};

// Generalized advantage estimation over one stream of T transitions.
// `values` carries one extra trailing entry: the bootstrap value of the state
// after the last transition (ignored when the last transition is done).
//   delta_t = r_t + gamma * V_{t+1} * (1 - done_t) - V_t
//   A_t     = delta_t + gamma * lambda * (1 - done_t) * A_{t+1}
GaeResult gae(const std::vector<double>& rewards, const std::vector<double>& values,
              const std::vector<uint8_t>& dones, double gamma, double lambda);

// Zero mean, unit standard deviation over the batch. A constant batch maps to
// all zeros; a single element passes through unchanged.
std::vector<double> standardize(const std::vector<double>& values);

}  // namespace orderpick
