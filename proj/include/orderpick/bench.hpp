#pragma once

#include <cstdint>

#include "orderpick/engine.hpp"

namespace orderpick {

struct BenchConfig {
  int parallel_envs = 4;
  int samples = 300;  // measured rounds, warm-up excluded
  int warmup = 20;
  uint64_t seed = 1;
  bool build_observations = true;  // include observation construction, as a rollout would
};

struct BenchResult {
  double mean_steps_per_second = 0.0;  // aggregate across envs, per-round mean
  double std_steps_per_second = 0.0;
  int samples = 0;
  int envs = 0;
  long total_steps = 0;
  double elapsed_s = 0.0;
};

// Random-policy throughput: every round steps each environment once and one
// sample is the aggregate steps/second of that round. Episodes reset and
// continue automatically.
BenchResult run_bench(const WarehouseGraph& graph, const PathCache& cache, const WorkerSpec& spec,
                      const OrderProfile& profile, const EngineConfig& engine_config,
                      const BenchConfig& bench);

}  // namespace orderpick
