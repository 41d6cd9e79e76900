#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "orderpick/heuristics.hpp"
#include "orderpick/net.hpp"
#include "orderpick/observe.hpp"

namespace orderpick {

enum class Algorithm { Hsnac, Snac };

const char* to_string(Algorithm algo);
Algorithm algorithm_from_string(const std::string& name);

// Manager network (one sector-policy and value head per agent) plus one
// shared location network per role. SNAC drops the manager and lets the
// shared nets act over the full masked location space.
struct PolicySet {
  Algorithm algorithm = Algorithm::Snac;
  int num_agents = 0;
  int num_agvs = 0;
  int num_pickers = 0;
  int num_sectors = 0;

  std::optional<Mlp> manager;  // trunk 3x128
  Mlp agv_net;                 // trunk 2x64, heads: location policy, value
  Mlp picker_net;

  static PolicySet create(Algorithm algo, const WarehouseGraph& graph, int num_agvs,
                          int num_pickers, int num_sectors, uint64_t seed);
};

// One agent decision at one tick, with everything needed to recompute the
// losses later (parameters are frozen while collecting).
struct Decision {
  int agent = -1;
  Role role = Role::Agv;
  std::shared_ptr<const Eigen::VectorXd> obs;
  std::shared_ptr<const obs::Mask> mask;  // mask used by the worker head
  int action = -1;
  double logp = 0.0;
  double value = 0.0;
  // manager layer (HSNAC only)
  bool has_manager = false;
  std::shared_ptr<const Eigen::VectorXd> manager_obs;
  std::shared_ptr<const obs::Mask> sector_mask;
  int sector = -1;
  double manager_logp = 0.0;
  double manager_value = 0.0;
};

// Chooses targets for the uncommitted agents. Under HSNAC the manager first
// samples a sector among those containing at least one legal location for the
// agent, then the shared worker net samples a location inside it; masking
// keeps every emitted action legal.
class ActionSelector {
public:
  ActionSelector(PolicySet& nets, const SectorPartition& sectors);

  // rng == nullptr selects greedily (argmax)
  JointAction select(const Engine& engine, const std::vector<int>& need_action, Rng* rng,
                     std::vector<Decision>* records = nullptr);

  // value estimates for bootstrap at truncation
  double worker_value(const Engine& engine, int agent) const;
  double manager_value(const Engine& engine, int agent) const;

private:
  PolicySet& nets_;
  std::vector<int> sector_of_;          // node id -> sector
  std::vector<obs::Mask> sector_node_;  // sector -> membership flags
};

// Policy adapter running a trained (or fresh) network set.
class NetPolicy final : public Policy {
public:
  NetPolicy(PolicySet nets, SectorPartition sectors, bool greedy);

  std::string name() const override { return to_string(nets_.algorithm); }
  void begin_episode(const Engine& engine, uint64_t episode_seed) override;
  JointAction decide(const Engine& engine, const std::vector<int>& need_action) override;

  const PolicySet& nets() const { return nets_; }

private:
  PolicySet nets_;
  SectorPartition sectors_;
  ActionSelector selector_;
  bool greedy_;
  Rng rng_;
};

struct Checkpoint {
  PolicySet policy;
  std::optional<Adam> manager_adam;
  std::optional<Adam> agv_adam;
  std::optional<Adam> picker_adam;
  uint64_t config_hash = 0;
  int episodes_trained = 0;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace orderpick
