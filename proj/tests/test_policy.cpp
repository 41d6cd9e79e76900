#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <set>

#include "orderpick/observe.hpp"
#include "orderpick/policy_set.hpp"
#include "support/oracles.hpp"

using namespace orderpick;

namespace {

struct Fixture {
  WarehouseGraph graph;
  PathCache cache;
  OrderProfile profile;
  SectorPartition sectors;
  WorkerSpec spec;
  Engine engine;

  explicit Fixture(int k, int agvs = 2, int pickers = 1)
      : graph(generate_layout(2, 5, 1, 1.0 / 3.0)),
        cache(PathCache::precompute(graph)),
        profile(OrderProfile::uniform(5.0, 1, 8, graph.num_items())),
        sectors(partition_sectors(graph, k)),
        spec{agvs, pickers, 1.66, {}},
        engine(graph, cache, spec, profile, config()) {}

  static EngineConfig config() {
    EngineConfig cfg;
    cfg.orders_per_episode = 10;
    cfg.max_ticks = 2000;
    return cfg;
  }
};

}  // namespace

TEST_CASE("policy set wiring matches the architecture") {
  Fixture f(2);
  PolicySet set = PolicySet::create(Algorithm::Hsnac, f.graph, 2, 1, 2, 1);
  REQUIRE(set.manager.has_value());
  CHECK(set.manager->spec().hidden == std::vector<int>{128, 128, 128});
  CHECK(set.agv_net.spec().hidden == std::vector<int>{64, 64});
  CHECK(set.picker_net.spec().hidden == std::vector<int>{64, 64});
  CHECK(set.manager->spec().heads.size() == 2u * 3);  // policy + value per agent
  for (int i = 0; i < 3; ++i) {
    CHECK(set.manager->spec().heads[i] == 2);      // sector policy head
    CHECK(set.manager->spec().heads[3 + i] == 1);  // value head
  }
  CHECK(set.agv_net.spec().heads[0] == f.graph.size());
  PolicySet snac = PolicySet::create(Algorithm::Snac, f.graph, 2, 1, 2, 1);
  CHECK(!snac.manager.has_value());
}

TEST_CASE("hsnac actions always satisfy the engine masks") {
  Fixture f(2);
  PolicySet set = PolicySet::create(Algorithm::Hsnac, f.graph, 2, 1, 2, 7);
  ActionSelector selector(set, f.sectors);
  Rng rng(5);
  StepResult r = f.engine.reset(5);
  while (!r.done) {
    std::vector<Decision> decisions;
    const JointAction acts = selector.select(f.engine, r.need_action, &rng, &decisions);
    for (const Decision& d : decisions) {
      // chosen location lies in the chosen sector and the role mask
      CHECK(f.sectors.assignment[d.action] == d.sector);
      const auto base = d.role == Role::Agv
                            ? obs::agv_mask(f.engine.state(), f.graph, d.agent)
                            : obs::picker_mask(f.engine.state(), f.graph, 2, d.agent);
      CHECK(base[d.action] == 1);
    }
    r = f.engine.step(acts);
  }
  CHECK(f.engine.state().completed == 10);  // masking keeps even random nets live
}

TEST_CASE("manager sector mask admits only sectors holding legal locations") {
  Fixture f(2);
  PolicySet set = PolicySet::create(Algorithm::Hsnac, f.graph, 2, 1, 2, 3);
  ActionSelector selector(set, f.sectors);
  StepResult r = f.engine.reset(8);

  // confine AGV 0's order to items of a single sector
  auto& worker = const_cast<WorkerState&>(f.engine.state().workers[0]);
  int sector4 = -1;
  worker.order->lines.clear();
  worker.order->picked.clear();
  for (int slot : f.sectors.sectors[1])
    if (f.graph.location(slot).kind == LocationKind::ItemSlot) {
      worker.order->lines.push_back({f.graph.location(slot).item, 1});
      worker.order->picked.push_back(0);
      sector4 = 1;
    }
  REQUIRE(sector4 == 1);

  std::vector<Decision> decisions;
  selector.select(f.engine, {0}, nullptr, &decisions);
  REQUIRE(decisions.size() == 1);
  CHECK(decisions[0].sector == 1);
  CHECK((*decisions[0].sector_mask)[0] == 0);
  CHECK((*decisions[0].sector_mask)[1] == 1);
}

TEST_CASE("committed agents receive no action from the selector") {
  Fixture f(2);
  PolicySet set = PolicySet::create(Algorithm::Hsnac, f.graph, 2, 1, 2, 9);
  ActionSelector selector(set, f.sectors);
  Rng rng(2);
  StepResult r = f.engine.reset(2);
  const JointAction acts = selector.select(f.engine, r.need_action, &rng);
  r = f.engine.step(acts);
  const JointAction next = selector.select(f.engine, r.need_action, &rng);
  for (int agent = 0; agent < f.engine.num_agents(); ++agent)
    if (f.engine.state().workers[agent].committed) CHECK(!next[agent].has_value());
}

TEST_CASE("with one sector hsnac explores exactly the snac legal set") {
  Fixture f(1);
  PolicySet hs = PolicySet::create(Algorithm::Hsnac, f.graph, 2, 1, 1, 11);
  PolicySet sn = PolicySet::create(Algorithm::Snac, f.graph, 2, 1, 1, 11);
  ActionSelector hsel(hs, f.sectors);
  ActionSelector ssel(sn, f.sectors);
  StepResult r = f.engine.reset(3);
  std::vector<Decision> hd, sd;
  hsel.select(f.engine, r.need_action, nullptr, &hd);
  ssel.select(f.engine, r.need_action, nullptr, &sd);
  REQUIRE(hd.size() == sd.size());
  for (size_t i = 0; i < hd.size(); ++i) {
    REQUIRE(hd[i].mask->size() == sd[i].mask->size());
    for (size_t n = 0; n < hd[i].mask->size(); ++n)
      CHECK((*hd[i].mask)[n] == (*sd[i].mask)[n]);  // same support
  }
}

TEST_CASE("shared networks: swapping picker observations swaps the distributions") {
  Fixture f(2, 2, 2);
  PolicySet set = PolicySet::create(Algorithm::Snac, f.graph, 2, 2, 2, 13);
  f.engine.reset(4);
  Rng rng(17);
  Eigen::VectorXd obs_a(set.picker_net.spec().input), obs_b(set.picker_net.spec().input);
  for (int i = 0; i < obs_a.size(); ++i) {
    obs_a[i] = rng.uniform();
    obs_b[i] = rng.uniform();
  }
  const auto ca1 = set.picker_net.forward(obs_a);
  const auto cb1 = set.picker_net.forward(obs_b);
  const auto cb2 = set.picker_net.forward(obs_b);
  const auto ca2 = set.picker_net.forward(obs_a);
  CHECK(ca1.head[0] == ca2.head[0]);  // same parameters, bit-equal outputs
  CHECK(cb1.head[0] == cb2.head[0]);
  CHECK(ca1.head[1][0] == ca2.head[1][0]);
}

TEST_CASE("checkpoints round-trip parameters, optimizer state and metadata") {
  Fixture f(2);
  PolicySet set = PolicySet::create(Algorithm::Hsnac, f.graph, 2, 1, 2, 21);
  Adam agv_adam(set.agv_net.num_params(), 3e-4);
  Adam picker_adam(set.picker_net.num_params(), 3e-4);
  Adam manager_adam(set.manager->num_params(), 3e-4);
  agv_adam.t = 7;
  agv_adam.m.setConstant(0.25);
  const Checkpoint ckpt{set, manager_adam, agv_adam, picker_adam, 0xDEADBEEFull, 123};

  const std::string file = "/tmp/orderpick_test_ckpt.json";
  save_checkpoint(file, ckpt);
  const Checkpoint loaded = load_checkpoint(file);
  CHECK(loaded.config_hash == 0xDEADBEEFull);
  CHECK(loaded.episodes_trained == 123);
  CHECK(loaded.policy.algorithm == Algorithm::Hsnac);
  CHECK(loaded.policy.num_sectors == 2);
  CHECK(loaded.policy.agv_net.params() == set.agv_net.params());
  CHECK(loaded.policy.picker_net.params() == set.picker_net.params());
  CHECK(loaded.policy.manager->params() == set.manager->params());
  REQUIRE(loaded.agv_adam.has_value());
  CHECK(loaded.agv_adam->t == 7);
  CHECK(loaded.agv_adam->m == agv_adam.m);
  std::remove(file.c_str());
}

TEST_CASE("corrupt checkpoints are rejected") {
  const std::string file = "/tmp/orderpick_test_bad_ckpt.json";
  {
    FILE* out = std::fopen(file.c_str(), "w");
    std::fputs("{\"format\": \"something-else\"}", out);
    std::fclose(out);
  }
  CHECK_THROWS_AS(load_checkpoint(file), std::runtime_error);
  CHECK_THROWS_AS(load_checkpoint("/tmp/definitely_missing_ckpt.json"), std::runtime_error);
  std::remove(file.c_str());
}

TEST_CASE("greedy selection is deterministic") {
  Fixture f(2);
  PolicySet set = PolicySet::create(Algorithm::Hsnac, f.graph, 2, 1, 2, 31);
  ActionSelector selector(set, f.sectors);
  StepResult r = f.engine.reset(6);
  const JointAction a = selector.select(f.engine, r.need_action, nullptr);
  const JointAction b = selector.select(f.engine, r.need_action, nullptr);
  for (int i = 0; i < f.engine.num_agents(); ++i) {
    CHECK(a[i].has_value() == b[i].has_value());
    if (a[i]) CHECK(*a[i] == *b[i]);
  }
}

TEST_CASE("net policy runs full greedy episodes") {
  Fixture f(2);
  PolicySet set = PolicySet::create(Algorithm::Hsnac, f.graph, 2, 1, 2, 41);
  NetPolicy policy(set, f.sectors, /*greedy=*/true);
  StepResult r = f.engine.reset(9);
  policy.begin_episode(f.engine, 9);
  int guard = 0;
  while (!r.done && ++guard < 3000) r = f.engine.step(policy.decide(f.engine, r.need_action));
  CHECK(r.done);
}
