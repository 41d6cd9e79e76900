#include "orderpick/bench.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "orderpick/heuristics.hpp"
#include "orderpick/observe.hpp"

namespace orderpick {

BenchResult run_bench(const WarehouseGraph& graph, const PathCache& cache, const WorkerSpec& spec,
                      const OrderProfile& profile, const EngineConfig& engine_config,
                      const BenchConfig& bench) {
  if (bench.parallel_envs < 1 || bench.samples < 1)
    throw std::invalid_argument("bench: need at least one env and one sample");

  struct EnvSlot {
    std::unique_ptr<Engine> engine;
    RandomPolicy policy;
    StepResult last;
    uint64_t episode = 0;
  };
  std::vector<EnvSlot> envs(bench.parallel_envs);
  for (int e = 0; e < bench.parallel_envs; ++e) {
    envs[e].engine = std::make_unique<Engine>(graph, cache, spec, profile, engine_config);
    const uint64_t seed = fnv1a64_u64(bench.seed, fnv1a64_u64(static_cast<uint64_t>(e), 0xb0b0));
    envs[e].last = envs[e].engine->reset(seed);
    envs[e].policy.begin_episode(*envs[e].engine, seed);
  }

  auto step_env = [&](EnvSlot& slot) {
    if (slot.last.done) {
      slot.episode += 1;
      const uint64_t seed = fnv1a64_u64(slot.episode, bench.seed);
      slot.last = slot.engine->reset(seed);
      slot.policy.begin_episode(*slot.engine, seed);
    }
    if (bench.build_observations && !slot.last.need_action.empty()) {
      const auto& state = slot.engine->state();
      bool picker_done = false;
      for (int agent : slot.last.need_action) {
        if (slot.engine->role_of(agent) == Role::Agv) {
          volatile double sink =
              obs::agv_observation(state, graph, slot.engine->num_agvs(), agent).sum();
          (void)sink;
        } else if (!picker_done) {
          volatile double sink =
              obs::picker_observation(state, graph, slot.engine->num_agvs()).sum();
          (void)sink;
          picker_done = true;  // shared across pickers within a tick
        }
      }
    }
    slot.last = slot.engine->step(slot.policy.decide(*slot.engine, slot.last.need_action));
  };

  using Clock = std::chrono::steady_clock;
  BenchResult result;
  result.envs = bench.parallel_envs;

  for (int w = 0; w < bench.warmup; ++w)
    for (auto& slot : envs) step_env(slot);

  std::vector<double> rates;
  rates.reserve(bench.samples);
  const auto t0 = Clock::now();
  for (int s = 0; s < bench.samples; ++s) {
    const auto a = Clock::now();
    for (auto& slot : envs) step_env(slot);
    const auto b = Clock::now();
    const double dt = std::chrono::duration<double>(b - a).count();
    rates.push_back(dt > 0.0 ? bench.parallel_envs / dt : 0.0);
    result.total_steps += bench.parallel_envs;
  }
  result.elapsed_s = std::chrono::duration<double>(Clock::now() - t0).count();
  result.samples = bench.samples;

  double mean = 0.0;
  for (double r : rates) mean += r;
  mean /= rates.size();
  double var = 0.0;
  for (double r : rates) var += (r - mean) * (r - mean);
  result.mean_steps_per_second = mean;
  result.std_steps_per_second = rates.size() > 1 ? std::sqrt(var / (rates.size() - 1)) : 0.0;
  return result;
}

}  // namespace orderpick
