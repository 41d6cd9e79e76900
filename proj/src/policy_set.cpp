#include "orderpick/policy_set.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace orderpick {

using nlohmann::json;

namespace {
constexpr int kManagerWidth = 128;
constexpr int kManagerDepth = 3;
constexpr int kWorkerWidth = 64;
constexpr int kWorkerDepth = 2;
}  // namespace

const char* to_string(Algorithm algo) {
  return algo == Algorithm::Hsnac ? "hsnac" : "snac";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "hsnac") return Algorithm::Hsnac;
  if (name == "snac") return Algorithm::Snac;
  throw std::invalid_argument("unknown algorithm: " + name);
}

PolicySet PolicySet::create(Algorithm algo, const WarehouseGraph& graph, int num_agvs,
                            int num_pickers, int num_sectors, uint64_t seed) {
  const int num_agents = num_agvs + num_pickers;
  const int manager_in = obs::picker_layout(graph, num_agents, num_agvs).length;
  const int picker_in = manager_in;
  const int agv_in = obs::agv_layout(graph, num_agents).length;
  const int locations = graph.size();

  auto worker_spec = [&](int input) {
    Mlp::Spec spec;
    spec.input = input;
    spec.hidden.assign(kWorkerDepth, kWorkerWidth);
    spec.heads = {locations, 1};
    return spec;
  };

  Rng rng(fnv1a64_u64(seed, 0x6e657473ull));
  PolicySet set{algo, num_agents, num_agvs, num_pickers, num_sectors,
                std::nullopt, Mlp(worker_spec(agv_in)), Mlp(worker_spec(picker_in))};
  set.agv_net.init_orthogonal(rng, std::sqrt(2.0), {0.01, 1.0});
  set.picker_net.init_orthogonal(rng, std::sqrt(2.0), {0.01, 1.0});

  if (algo == Algorithm::Hsnac) {
    Mlp::Spec spec;
    spec.input = manager_in;
    spec.hidden.assign(kManagerDepth, kManagerWidth);
    spec.heads.reserve(2 * num_agents);
    for (int i = 0; i < num_agents; ++i) spec.heads.push_back(num_sectors);
    for (int i = 0; i < num_agents; ++i) spec.heads.push_back(1);
    set.manager.emplace(spec);
    std::vector<double> gains(2 * num_agents, 0.01);
    for (int i = 0; i < num_agents; ++i) gains[num_agents + i] = 1.0;
    set.manager->init_orthogonal(rng, std::sqrt(2.0), gains);
  }
  return set;
}

ActionSelector::ActionSelector(PolicySet& nets, const SectorPartition& sectors) : nets_(nets) {
  sector_of_ = sectors.assignment;
  sector_node_.assign(sectors.count(), obs::Mask(sectors.assignment.size(), 0));
  for (size_t node = 0; node < sectors.assignment.size(); ++node)
    sector_node_[sectors.assignment[node]][node] = 1;
  if (nets_.num_sectors != sectors.count())
    throw std::invalid_argument("action selector: sector count mismatch with policy set");
}

JointAction ActionSelector::select(const Engine& engine, const std::vector<int>& need_action,
                                   Rng* rng, std::vector<Decision>* records) {
  const auto& state = engine.state();
  const auto& graph = engine.graph();
  JointAction actions(engine.num_agents());
  if (need_action.empty()) return actions;

  auto shared_obs = std::make_shared<const Eigen::VectorXd>(
      obs::picker_observation(state, graph, engine.num_agvs()));

  std::optional<Mlp::Cache> manager_cache;
  if (nets_.algorithm == Algorithm::Hsnac) manager_cache = nets_.manager->forward(*shared_obs);

  // the shared picker net sees the same input for every picker this tick
  std::optional<Mlp::Cache> picker_cache;

  for (int agent : need_action) {
    const Role role = engine.role_of(agent);
    Decision d;
    d.agent = agent;
    d.role = role;

    auto base = std::make_shared<obs::Mask>(
        role == Role::Agv ? obs::agv_mask(state, graph, agent)
                          : obs::picker_mask(state, graph, engine.num_agvs(), agent));

    const Mlp::Cache* cache = nullptr;
    if (role == Role::Agv) {
      d.obs = std::make_shared<const Eigen::VectorXd>(
          obs::agv_observation(state, graph, engine.num_agvs(), agent));
    } else {
      d.obs = shared_obs;
      if (!picker_cache) picker_cache = nets_.picker_net.forward(*shared_obs);
      cache = &*picker_cache;
    }
    Mlp::Cache own_cache;
    if (!cache) {
      own_cache = nets_.agv_net.forward(*d.obs);
      cache = &own_cache;
    }

    std::shared_ptr<const obs::Mask> worker_mask = base;
    if (nets_.algorithm == Algorithm::Hsnac) {
      // sectors containing at least one legal location for this agent
      auto sector_mask = std::make_shared<obs::Mask>(nets_.num_sectors, uint8_t{0});
      for (size_t node = 0; node < base->size(); ++node)
        if ((*base)[node]) (*sector_mask)[sector_of_[node]] = 1;
      const auto sector_dist =
          MaskedCategorical::from_logits(manager_cache->head[agent], *sector_mask);
      const int sector = rng ? sector_dist.sample(*rng) : sector_dist.argmax();

      d.has_manager = true;
      d.manager_obs = shared_obs;
      d.sector_mask = sector_mask;
      d.sector = sector;
      d.manager_logp = sector_dist.logp[sector];
      d.manager_value = manager_cache->head[nets_.num_agents + agent][0];

      auto scoped = std::make_shared<obs::Mask>(*base);
      for (size_t node = 0; node < scoped->size(); ++node)
        if (!sector_node_[sector][node]) (*scoped)[node] = 0;
      worker_mask = scoped;
    }

    const auto dist = MaskedCategorical::from_logits(cache->head[0], *worker_mask);
    const int action = rng ? dist.sample(*rng) : dist.argmax();
    actions[agent] = action;

    d.mask = worker_mask;
    d.action = action;
    d.logp = dist.logp[action];
    d.value = cache->head[1][0];
    if (records) records->push_back(std::move(d));
  }
  return actions;
}

double ActionSelector::worker_value(const Engine& engine, int agent) const {
  const auto& state = engine.state();
  const auto& graph = engine.graph();
  if (engine.role_of(agent) == Role::Agv) {
    const auto cache =
        nets_.agv_net.forward(obs::agv_observation(state, graph, engine.num_agvs(), agent));
    return cache.head[1][0];
  }
  const auto cache =
      nets_.picker_net.forward(obs::picker_observation(state, graph, engine.num_agvs()));
  return cache.head[1][0];
}

double ActionSelector::manager_value(const Engine& engine, int agent) const {
  if (nets_.algorithm != Algorithm::Hsnac)
    throw std::logic_error("manager value requested without a manager");
  const auto cache = nets_.manager->forward(
      obs::picker_observation(engine.state(), engine.graph(), engine.num_agvs()));
  return cache.head[nets_.num_agents + agent][0];
}

NetPolicy::NetPolicy(PolicySet nets, SectorPartition sectors, bool greedy)
    : nets_(std::move(nets)), sectors_(std::move(sectors)), selector_(nets_, sectors_),
      greedy_(greedy) {}

void NetPolicy::begin_episode(const Engine& engine, uint64_t episode_seed) {
  rng_ = Rng(fnv1a64_u64(episode_seed, 0x616374ull));
}

JointAction NetPolicy::decide(const Engine& engine, const std::vector<int>& need_action) {
  return selector_.select(engine, need_action, greedy_ ? nullptr : &rng_, nullptr);
}

namespace {

json spec_to_json(const Mlp::Spec& spec) {
  return json{{"input", spec.input}, {"hidden", spec.hidden}, {"heads", spec.heads}};
}

Mlp::Spec spec_from_json(const json& j) {
  Mlp::Spec spec;
  spec.input = j.at("input").get<int>();
  spec.hidden = j.at("hidden").get<std::vector<int>>();
  spec.heads = j.at("heads").get<std::vector<int>>();
  return spec;
}

json net_to_json(const Mlp& net, const std::optional<Adam>& adam) {
  json j;
  j["spec"] = spec_to_json(net.spec());
  j["params"] = std::vector<double>(net.params().data(), net.params().data() + net.num_params());
  if (adam) {
    j["adam"] = {{"t", adam->t}, {"lr", adam->lr},
                 {"m", std::vector<double>(adam->m.data(), adam->m.data() + adam->m.size())},
                 {"v", std::vector<double>(adam->v.data(), adam->v.data() + adam->v.size())}};
  }
  return j;
}

Mlp net_from_json(const json& j, std::optional<Adam>& adam_out) {
  Mlp net(spec_from_json(j.at("spec")));
  const auto params = j.at("params").get<std::vector<double>>();
  if (static_cast<int>(params.size()) != net.num_params())
    throw std::runtime_error("checkpoint: parameter count mismatch");
  net.params() = Eigen::Map<const Eigen::VectorXd>(params.data(), params.size());
  if (j.contains("adam")) {
    const auto& a = j.at("adam");
    Adam adam(net.num_params(), a.at("lr").get<double>());
    adam.t = a.at("t").get<long>();
    const auto m = a.at("m").get<std::vector<double>>();
    const auto v = a.at("v").get<std::vector<double>>();
    if (static_cast<int>(m.size()) != net.num_params() ||
        static_cast<int>(v.size()) != net.num_params())
      throw std::runtime_error("checkpoint: optimizer state size mismatch");
    adam.m = Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
    adam.v = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
    adam_out = std::move(adam);
  }
  return net;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  json j;
  j["format"] = "orderpick-checkpoint-1";
  j["algorithm"] = to_string(ckpt.policy.algorithm);
  j["config_hash"] = hash_hex(ckpt.config_hash);
  j["episodes_trained"] = ckpt.episodes_trained;
  j["num_agents"] = ckpt.policy.num_agents;
  j["num_agvs"] = ckpt.policy.num_agvs;
  j["num_pickers"] = ckpt.policy.num_pickers;
  j["num_sectors"] = ckpt.policy.num_sectors;
  j["agv"] = net_to_json(ckpt.policy.agv_net, ckpt.agv_adam);
  j["picker"] = net_to_json(ckpt.policy.picker_net, ckpt.picker_adam);
  if (ckpt.policy.manager) j["manager"] = net_to_json(*ckpt.policy.manager, ckpt.manager_adam);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
  out << j.dump();
  if (!out) throw std::runtime_error("checkpoint: failed writing " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  json j;
  in >> j;
  if (j.value("format", "") != "orderpick-checkpoint-1")
    throw std::runtime_error("checkpoint: unrecognised format in " + path);

  std::optional<Adam> agv_adam, picker_adam, manager_adam;
  Mlp agv = net_from_json(j.at("agv"), agv_adam);
  Mlp picker = net_from_json(j.at("picker"), picker_adam);
  std::optional<Mlp> manager;
  if (j.contains("manager")) manager = net_from_json(j.at("manager"), manager_adam);

  PolicySet policy{algorithm_from_string(j.at("algorithm").get<std::string>()),
                   j.at("num_agents").get<int>(),
                   j.at("num_agvs").get<int>(),
                   j.at("num_pickers").get<int>(),
                   j.at("num_sectors").get<int>(),
                   std::move(manager),
                   std::move(agv),
                   std::move(picker)};
  Checkpoint ckpt{std::move(policy), std::move(manager_adam), std::move(agv_adam),
                  std::move(picker_adam),
                  std::stoull(j.at("config_hash").get<std::string>(), nullptr, 16),
                  j.at("episodes_trained").get<int>()};
  return ckpt;
}

}  // namespace orderpick
