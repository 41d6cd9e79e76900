#include "orderpick/trainer.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace orderpick {

void TrainConfig::validate() const {
  if (episodes < 1) throw std::invalid_argument("train config: episodes must be positive");
  if (gamma < 0.0 || gamma > 1.0 || gae_lambda < 0.0 || gae_lambda > 1.0)
    throw std::invalid_argument("train config: gamma and lambda must lie in [0, 1]");
  if (!(lr > 0.0)) throw std::invalid_argument("train config: lr must be positive");
  if (entropy_coef < 0.0 || value_coef < 0.0)
    throw std::invalid_argument("train config: coefficients must be non-negative");
  if (parallel_envs < 1) throw std::invalid_argument("train config: need at least one env");
  if (eval_episodes < 1) throw std::invalid_argument("train config: need eval episodes");
  if (eval_interval < 1 || eval_interval % parallel_envs != 0)
    throw std::invalid_argument("train config: eval_interval must be a multiple of parallel_envs");
  if (episodes % eval_interval != 0)
    throw std::invalid_argument("train config: episodes must be a multiple of eval_interval");
}

MetricsReport run_episode(Engine& engine, Policy& policy, uint64_t seed) {
  auto res = engine.reset(seed);
  policy.begin_episode(engine, seed);
  while (!res.done) res = engine.step(policy.decide(engine, res.need_action));
  return engine.episode_metrics();
}

EvalReport evaluate(Engine& engine, Policy& policy, int episodes, uint64_t seed_base) {
  if (episodes < 1) throw std::invalid_argument("evaluate: need at least one episode");
  EvalReport report;
  std::vector<double> pick, agv_d, picker_d, agv_i, picker_i, lead;
  for (int e = 0; e < episodes; ++e) {
    const MetricsReport m = run_episode(engine, policy, seed_base + static_cast<uint64_t>(e));
    report.episodes.push_back(m);
    pick.push_back(m.pick_rate_lines_per_hour);
    agv_d.push_back(m.agv_distance_m);
    picker_d.push_back(m.picker_distance_m);
    agv_i.push_back(m.agv_idle_s);
    picker_i.push_back(m.picker_idle_s);
    lead.push_back(m.mean_lead_time_s);
  }
  report.pick_rate = aggregate(pick);
  report.agv_distance = aggregate(agv_d);
  report.picker_distance = aggregate(picker_d);
  report.agv_idle = aggregate(agv_i);
  report.picker_idle = aggregate(picker_i);
  report.lead_time = aggregate(lead);
  return report;
}

Trainer::Trainer(const WarehouseGraph& graph, const PathCache& cache, const WorkerSpec& spec,
                 const OrderProfile& profile, const EngineConfig& engine_config,
                 const SectorPartition& sectors, TrainConfig config, uint64_t config_hash)
    : graph_(graph), cache_(cache), spec_(spec), profile_(profile),
      engine_config_(engine_config), sectors_(sectors), config_(config),
      config_hash_(config_hash),
      nets_(PolicySet::create(config.algorithm, graph, spec.num_agvs, spec.num_pickers,
                              sectors.count(), config.seed)),
      agv_adam_(nets_.agv_net.num_params(), config.lr),
      picker_adam_(nets_.picker_net.num_params(), config.lr) {
  config_.validate();
  if (nets_.manager) manager_adam_.emplace(nets_.manager->num_params(), config.lr);
}

void Trainer::restore(const Checkpoint& ckpt) {
  if (ckpt.policy.algorithm != config_.algorithm ||
      ckpt.policy.num_agvs != spec_.num_agvs || ckpt.policy.num_pickers != spec_.num_pickers ||
      ckpt.policy.num_sectors != sectors_.count())
    throw std::invalid_argument("trainer: checkpoint does not match this configuration");
  nets_ = ckpt.policy;
  if (ckpt.agv_adam) agv_adam_ = *ckpt.agv_adam;
  if (ckpt.picker_adam) picker_adam_ = *ckpt.picker_adam;
  if (ckpt.manager_adam) manager_adam_ = *ckpt.manager_adam;
  episodes_done_ = ckpt.episodes_trained;
}

void Trainer::collect_episode(int env_index, int episode_index,
                              std::vector<Stream>& worker_streams,
                              std::vector<Stream>& manager_streams, double& reward_sum,
                              long& reward_n) {
  Engine engine(graph_, cache_, spec_, profile_, engine_config_);
  ActionSelector selector(nets_, sectors_);
  uint64_t h = fnv1a64_u64(config_.seed, 0x657069736f6465ull);
  h = fnv1a64_u64(static_cast<uint64_t>(episode_index), h);
  const uint64_t env_seed = h;
  Rng act_rng(fnv1a64_u64(h, 0x616374696f6eull));

  const int n = engine.num_agents();
  struct OpenWindow {
    Decision decision;
    double reward = 0.0;
    int ticks = 0;
  };
  std::vector<std::optional<OpenWindow>> open(n);
  std::vector<Stream> workers(n), managers(nets_.manager ? n : 0);

  auto close_window = [&](OpenWindow& w, uint8_t done) {
    const Decision& d = w.decision;
    workers[d.agent].samples.push_back(
        {d.obs, d.mask, 0, d.action, d.value, w.reward, done});
    if (d.has_manager)
      managers[d.agent].samples.push_back(
          {d.manager_obs, d.sector_mask, d.agent, d.sector, d.manager_value, w.reward, done});
  };

  auto res = engine.reset(env_seed);
  std::vector<Decision> decisions;
  while (!res.done) {
    decisions.clear();
    const JointAction actions = selector.select(engine, res.need_action, &act_rng, &decisions);
    for (Decision& d : decisions) {
      const int agent = d.agent;
      if (open[agent]) close_window(*open[agent], 0);
      open[agent] = OpenWindow{std::move(d), 0.0, 0};
    }
    res = engine.step(actions);
    for (int a = 0; a < n; ++a) {
      if (!open[a]) continue;
      open[a]->reward += std::pow(config_.gamma, open[a]->ticks) * res.rewards[a];
      open[a]->ticks += 1;
      reward_sum += res.rewards[a];
    }
    reward_n += n;
  }

  const bool terminal = !res.truncated;
  for (int a = 0; a < n; ++a)
    if (open[a]) close_window(*open[a], terminal ? 1 : 0);
  if (!terminal) {
    for (int a = 0; a < n; ++a) {
      workers[a].bootstrap = selector.worker_value(engine, a);
      if (nets_.manager) managers[a].bootstrap = selector.manager_value(engine, a);
    }
  }
  for (int a = 0; a < n; ++a) {
    workers[a].agent = a;
    if (!workers[a].samples.empty()) worker_streams.push_back(std::move(workers[a]));
  }
  for (size_t a = 0; a < managers.size(); ++a) {
    managers[a].agent = static_cast<int>(a);
    if (!managers[a].samples.empty()) manager_streams.push_back(std::move(managers[a]));
  }
}

Trainer::LossStats Trainer::update_net(Mlp& net, Adam& adam, Batch& batch, bool manager) {
  LossStats stats;
  if (batch.samples.empty()) return stats;
  const auto adv = standardize(batch.advantages);
  const double inv = 1.0 / static_cast<double>(batch.samples.size());
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(net.num_params());
  const int num_heads = static_cast<int>(net.spec().heads.size());
  std::vector<Eigen::VectorXd> head_grads(num_heads);

  for (size_t i = 0; i < batch.samples.size(); ++i) {
    const Sample& s = batch.samples[i];
    const Mlp::Cache cache = net.forward(*s.obs);
    const int policy_head = manager ? s.head : 0;
    const int value_head = manager ? nets_.num_agents + s.head : 1;
    const auto dist = MaskedCategorical::from_logits(cache.head[policy_head], *s.mask);
    const double v = cache.head[value_head][0];

    for (auto& g : head_grads) g.resize(0);
    head_grads[policy_head] = dist.grad_logits(s.action, adv[i], config_.entropy_coef) * inv;
    Eigen::VectorXd gv(1);
    gv[0] = 2.0 * config_.value_coef * (v - batch.returns[i]) * inv;
    head_grads[value_head] = gv;
    net.backward(cache, head_grads, grad);

    stats.policy += -adv[i] * dist.logp[s.action];
    stats.value += (v - batch.returns[i]) * (v - batch.returns[i]);
    stats.entropy += dist.entropy;
  }
  stats.n = static_cast<int>(batch.samples.size());
  stats.policy /= stats.n;
  stats.value /= stats.n;
  stats.entropy /= stats.n;

  const double total =
      stats.policy + config_.value_coef * stats.value - config_.entropy_coef * stats.entropy;
  if (!std::isfinite(total)) {
    std::ostringstream os;
    os << "trainer: non-finite loss (policy=" << stats.policy << " value=" << stats.value
       << " entropy=" << stats.entropy << " batch=" << stats.n << ")";
    throw std::runtime_error(os.str());
  }
  clip_grad_norm(grad, config_.max_grad_norm);
  adam.step(net.params(), grad);
  return stats;
}

double Trainer::greedy_eval(int round) {
  Engine engine(graph_, cache_, spec_, profile_, engine_config_);
  ActionSelector selector(nets_, sectors_);
  double total = 0.0;
  for (int e = 0; e < config_.eval_episodes; ++e) {
    uint64_t h = fnv1a64_u64(config_.seed, 0x6576616cull);
    h = fnv1a64_u64(static_cast<uint64_t>(round), h);
    h = fnv1a64_u64(static_cast<uint64_t>(e), h);
    auto res = engine.reset(h);
    while (!res.done) res = engine.step(selector.select(engine, res.need_action, nullptr));
    total += engine.episode_metrics().pick_rate_lines_per_hour;
  }
  return total / config_.eval_episodes;
}

TrainResult Trainer::run(int checkpoint_every,
                         const std::function<void(int, const Checkpoint&)>& on_checkpoint) {
  config_.validate();
  TrainResult result;
  double reward_sum = 0.0;
  long reward_n = 0;
  LossStats accum;
  int updates = 0;

  auto flush_stream = [&](const Stream& stream, Batch& batch) {
    std::vector<double> rewards, values;
    std::vector<uint8_t> dones;
    for (const Sample& s : stream.samples) {
      rewards.push_back(s.reward);
      values.push_back(s.value);
      dones.push_back(s.done);
    }
    values.push_back(stream.bootstrap);
    const GaeResult g = gae(rewards, values, dones, config_.gamma, config_.gae_lambda);
    for (size_t i = 0; i < stream.samples.size(); ++i) {
      batch.samples.push_back(stream.samples[i]);
      batch.advantages.push_back(g.advantages[i]);
      batch.returns.push_back(g.returns[i]);
    }
  };

  while (episodes_done_ < config_.episodes) {
    std::vector<Stream> worker_streams, manager_streams;
    for (int env = 0; env < config_.parallel_envs; ++env) {
      collect_episode(env, episodes_done_, worker_streams, manager_streams, reward_sum, reward_n);
      episodes_done_ += 1;
    }

    Batch agv_batch, picker_batch, manager_batch;
    for (const Stream& stream : worker_streams)
      flush_stream(stream, stream.agent < nets_.num_agvs ? agv_batch : picker_batch);
    for (const Stream& stream : manager_streams) flush_stream(stream, manager_batch);

    const LossStats agv_stats = update_net(nets_.agv_net, agv_adam_, agv_batch, false);
    const LossStats picker_stats = update_net(nets_.picker_net, picker_adam_, picker_batch, false);
    LossStats manager_stats;
    if (nets_.manager)
      manager_stats = update_net(*nets_.manager, *manager_adam_, manager_batch, true);

    auto add = [&](const LossStats& s) {
      if (s.n == 0) return;
      accum.policy += s.policy;
      accum.value += s.value;
      accum.entropy += s.entropy;
      accum.n += 1;
    };
    add(agv_stats);
    add(picker_stats);
    add(manager_stats);
    updates += 1;

    if (episodes_done_ % config_.eval_interval == 0) {
      CurvePoint point;
      point.episode = episodes_done_;
      point.pick_rate = greedy_eval(episodes_done_ / config_.eval_interval);
      point.mean_reward = reward_n > 0 ? reward_sum / static_cast<double>(reward_n) : 0.0;
      if (accum.n > 0) {
        point.policy_loss = accum.policy / accum.n;
        point.value_loss = accum.value / accum.n;
        point.entropy = accum.entropy / accum.n;
      }
      result.curve.push_back(point);
      reward_sum = 0.0;
      reward_n = 0;
      accum = LossStats{};
    }
    if (checkpoint_every > 0 && on_checkpoint && episodes_done_ % checkpoint_every == 0) {
      on_checkpoint(episodes_done_,
                    Checkpoint{nets_, manager_adam_, agv_adam_, picker_adam_, config_hash_,
                               episodes_done_});
    }
  }
  (void)updates;
  result.final_checkpoint = Checkpoint{nets_, manager_adam_, agv_adam_, picker_adam_,
                                       config_hash_, episodes_done_};
  return result;
}

}  // namespace orderpick
