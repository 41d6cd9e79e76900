#include "orderpick/gae.hpp"

#include <cmath>
#include <stdexcept>

namespace orderpick {

GaeResult gae(const std::vector<double>& rewards, const std::vector<double>& values,
              const std::vector<uint8_t>& dones, double gamma, double lambda) {
  const size_t t_max = rewards.size();
  if (dones.size() != t_max || values.size() != t_max + 1)
    throw std::invalid_argument("gae: sequence lengths misaligned");
  if (gamma < 0.0 || gamma > 1.0 || lambda < 0.0 || lambda > 1.0)
    throw std::invalid_argument("gae: gamma and lambda must lie in [0, 1]");

  GaeResult out;
  out.advantages.resize(t_max);
  out.returns.resize(t_max);
  double acc = 0.0;
  for (size_t i = t_max; i-- > 0;) {
    const double not_done = dones[i] ? 0.0 : 1.0;
    const double delta = rewards[i] + gamma * values[i + 1] * not_done - values[i];
    acc = delta + gamma * lambda * not_done * acc;
    out.advantages[i] = acc;
    out.returns[i] = acc + values[i];
  }
  return out;
}

std::vector<double> standardize(const std::vector<double>& values) {
  if (values.size() < 2) return values;
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= n;
  if (var <= 0.0) return std::vector<double>(values.size(), 0.0);
  const double inv_std = 1.0 / std::sqrt(var);
  std::vector<double> out(values.size());
  for (size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mean) * inv_std;
  return out;
}

}  // namespace orderpick
