#pragma once

#include <functional>
#include <string>
#include <vector>

#include "orderpick/gae.hpp"
#include "orderpick/policy_set.hpp"

namespace orderpick {

struct TrainConfig {
  Algorithm algorithm = Algorithm::Hsnac;
  int episodes = 1000;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double lr = 3e-4;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double max_grad_norm = 0.5;
  int parallel_envs = 4;   // episodes collected per update round
  int eval_interval = 100; // episodes between greedy evaluations
  int eval_episodes = 4;
  uint64_t seed = 1;

  void validate() const;
};

struct CurvePoint {
  int episode = 0;
  double pick_rate = 0.0;
  double mean_reward = 0.0;  // per agent per tick, training episodes
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

struct TrainResult {
  Checkpoint final_checkpoint;
  std::vector<CurvePoint> curve;
};

struct Aggregate {
  double mean = 0.0;
  double ci95 = 0.0;  // half-width, Student t
  double stddev = 0.0;
  int n = 0;
};

Aggregate aggregate(const std::vector<double>& samples);

struct EvalReport {
  std::vector<MetricsReport> episodes;
  Aggregate pick_rate, agv_distance, picker_distance, agv_idle, picker_idle, lead_time;
};

// drives one full episode; returns its metrics
MetricsReport run_episode(Engine& engine, Policy& policy, uint64_t seed);

// aggregated greedy/heuristic evaluation over `episodes` seeded episodes
EvalReport evaluate(Engine& engine, Policy& policy, int episodes, uint64_t seed_base);

// Synchronous advantage actor-critic over parallel episode streams: collect
// per-decision tuples, GAE per agent stream at decision granularity with
// per-tick discounting inside each travel commitment, standardize per batch,
// one gradient step per update for the manager and each shared worker net.
class Trainer {
public:
  Trainer(const WarehouseGraph& graph, const PathCache& cache, const WorkerSpec& spec,
          const OrderProfile& profile, const EngineConfig& engine_config,
          const SectorPartition& sectors, TrainConfig config, uint64_t config_hash = 0);

  void restore(const Checkpoint& ckpt);

  // checkpoint_every == 0 disables intermediate checkpoints
  TrainResult run(int checkpoint_every = 0,
                  const std::function<void(int, const Checkpoint&)>& on_checkpoint = {});

private:
  struct Sample {
    std::shared_ptr<const Eigen::VectorXd> obs;
    std::shared_ptr<const obs::Mask> mask;
    int head = 0;  // manager head index; 0 for workers
    int action = -1;
    double value = 0.0;
    double reward = 0.0;
    uint8_t done = 0;
  };
  struct Stream {
    int agent = -1;
    std::vector<Sample> samples;
    double bootstrap = 0.0;
  };
  struct Batch {
    std::vector<Sample> samples;
    std::vector<double> advantages;
    std::vector<double> returns;
  };
  struct LossStats {
    double policy = 0.0, value = 0.0, entropy = 0.0;
    int n = 0;
  };

  void collect_episode(int env_index, int episode_index, std::vector<Stream>& worker_streams,
                       std::vector<Stream>& manager_streams, double& reward_sum, long& reward_n);
  LossStats update_net(Mlp& net, Adam& adam, Batch& batch, bool manager);
  double greedy_eval(int round);

  const WarehouseGraph& graph_;
  const PathCache& cache_;
  const WorkerSpec& spec_;
  const OrderProfile& profile_;
  EngineConfig engine_config_;
  SectorPartition sectors_;
  TrainConfig config_;
  uint64_t config_hash_;

  PolicySet nets_;
  Adam agv_adam_, picker_adam_;
  std::optional<Adam> manager_adam_;
  int episodes_done_ = 0;
};

}  // namespace orderpick
