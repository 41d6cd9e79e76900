#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "orderpick/heuristics.hpp"
#include "orderpick/net.hpp"
#include "orderpick/observe.hpp"
#include "support/oracles.hpp"

using namespace orderpick;

namespace {

// 10 item slots in a fixed two-aisle grid, 1 AGV + 1 picker
struct Fixture {
  WarehouseGraph graph;
  PathCache cache;
  OrderProfile profile;
  WorkerSpec spec;
  Engine engine;

  explicit Fixture(int agvs = 1, int pickers = 1, int orders = 3)
      : graph(generate_layout(2, 5, 1, 1.0)),
        cache(PathCache::precompute(graph)),
        profile(OrderProfile::uniform(4.0, 1, 6, graph.num_items())),
        spec{agvs, pickers, 1.66, {}},
        engine(graph, cache, spec, profile, make_config(orders)) {}

  static EngineConfig make_config(int orders) {
    EngineConfig cfg;
    cfg.orders_per_episode = orders;
    cfg.max_ticks = 500;
    return cfg;
  }
};

}  // namespace

TEST_CASE("observation lengths match the layout arithmetic") {
  Fixture f;  // 2 agents, 10 items, 1 AGV
  f.engine.reset(1);
  const auto po = obs::picker_observation(f.engine.state(), f.graph, 1);
  const auto ao = obs::agv_observation(f.engine.state(), f.graph, 1, 0);
  CHECK(po.size() == 2 * 2 * 2 + 1 * 10);  // = 18
  CHECK(ao.size() == 18);                  // same here since |V| = 1
  CHECK(obs::picker_layout(f.graph, 2, 1).length == 18);
  CHECK(obs::agv_layout(f.graph, 2).length == 18);
}

TEST_CASE("coordinates are normalized to the unit square") {
  Fixture f;
  f.engine.reset(2);
  const auto po = obs::picker_observation(f.engine.state(), f.graph, 1);
  for (int i = 0; i < 8; ++i) {
    CHECK(po[i] >= 0.0);
    CHECK(po[i] <= 1.0);
  }
}

TEST_CASE("an agent at the min corner reads as (0, 0)") {
  std::vector<Location> locs;
  locs.push_back({0, LocationKind::DeliveryStation, 0.0, 0.0, -1});
  locs.push_back({1, LocationKind::ItemSlot, 3.0, 4.0, 0});
  WarehouseGraph g(std::move(locs), {{0, 1}}, 1.0);
  PathCache cache = PathCache::precompute(g);
  OrderProfile profile = OrderProfile::uniform(1.0, 1, 1, 1);
  WorkerSpec spec;
  spec.start_locations = {0, 0};
  EngineConfig cfg;
  cfg.orders_per_episode = 1;
  Engine engine(g, cache, spec, profile, cfg);
  engine.reset(3);
  const auto po = obs::picker_observation(engine.state(), g, 1);
  CHECK(po[0] == 0.0);  // current x of the AGV at the corner
  CHECK(po[1] == 0.0);
  CHECK(po[2] == 0.0);  // uncommitted target == current
  CHECK(po[3] == 0.0);
}

TEST_CASE("order block carries exactly the remaining lines") {
  Fixture f;
  f.engine.reset(4);
  const auto& order = f.engine.state().workers[0].order;
  REQUIRE(order.has_value());
  const auto ao = obs::agv_observation(f.engine.state(), f.graph, 1, 0);
  int ones = 0;
  for (int i = 8; i < ao.size(); ++i) {
    CHECK((ao[i] == 0.0 || ao[i] == 1.0));
    ones += ao[i] == 1.0;
  }
  CHECK(ones == order->remaining_count());
  CHECK(ones == static_cast<int>(order->lines.size()));  // nothing picked yet
}

TEST_CASE("fully picked order reads as an all-zero block") {
  Fixture f;
  f.engine.reset(5);
  auto& worker = const_cast<WorkerState&>(f.engine.state().workers[0]);
  for (auto& flag : worker.order->picked) flag = 1;
  const auto ao = obs::agv_observation(f.engine.state(), f.graph, 1, 0);
  for (int i = 8; i < ao.size(); ++i) CHECK(ao[i] == 0.0);
}

TEST_CASE("observations are deterministic functions of the state") {
  Fixture f;
  f.engine.reset(6);
  const auto a = obs::picker_observation(f.engine.state(), f.graph, 1);
  const auto b = obs::picker_observation(f.engine.state(), f.graph, 1);
  CHECK(a == b);
}

TEST_CASE("agv mask admits exactly the remaining order slots") {
  Fixture f;
  f.engine.reset(7);
  const auto& order = f.engine.state().workers[0].order;
  REQUIRE(order.has_value());
  const auto mask = obs::agv_mask(f.engine.state(), f.graph, 0);
  for (int node = 0; node < f.graph.size(); ++node) {
    const Location& loc = f.graph.location(node);
    const bool expected =
        loc.kind == LocationKind::ItemSlot && order->remaining_contains(loc.item);
    CHECK(static_cast<bool>(mask[node]) == expected);
  }
}

TEST_CASE("agv mask falls back to delivery stations when the order is done") {
  Fixture f;
  f.engine.reset(8);
  auto& worker = const_cast<WorkerState&>(f.engine.state().workers[0]);
  for (auto& flag : worker.order->picked) flag = 1;
  const auto mask = obs::agv_mask(f.engine.state(), f.graph, 0);
  for (int node = 0; node < f.graph.size(); ++node)
    CHECK(static_cast<bool>(mask[node]) ==
          (f.graph.location(node).kind == LocationKind::DeliveryStation));
}

TEST_CASE("picker mask is the union of AGV current and target locations") {
  Fixture f(2, 1, 4);
  f.engine.reset(9);
  const auto mask = obs::picker_mask(f.engine.state(), f.graph, 2, 2);
  int count = 0;
  for (int node = 0; node < f.graph.size(); ++node) count += mask[node];
  CHECK(count <= 2 * 2);  // <= 2 entries per AGV
  for (int v = 0; v < 2; ++v) {
    CHECK(mask[f.engine.state().workers[v].current]);
    CHECK(mask[f.engine.state().workers[v].target]);
  }
}

TEST_CASE("scoped picker mask falls back to stay-put when the sector is empty") {
  Fixture f;
  f.engine.reset(10);
  // sector membership that excludes every AGV location
  obs::Mask sector(f.graph.size(), 0);
  const int agv_cur = f.engine.state().workers[0].current;
  for (int node = 0; node < f.graph.size(); ++node) sector[node] = node != agv_cur;
  sector[f.engine.state().workers[0].target] = 0;
  const auto mask = obs::picker_mask(f.engine.state(), f.graph, 1, 1, &sector);
  int count = 0;
  for (int node = 0; node < f.graph.size(); ++node) count += mask[node];
  CHECK(count == 1);
  CHECK(mask[f.engine.state().workers[1].current] == 1);
}

TEST_CASE("scoped agv mask may be empty and the caller can detect it") {
  Fixture f;
  f.engine.reset(11);
  obs::Mask sector(f.graph.size(), 0);  // empty sector
  const auto mask = obs::agv_mask(f.engine.state(), f.graph, 0, &sector);
  CHECK(!obs::mask_any(mask));
}

TEST_CASE("unscoped masks of uncommitted agents are never empty") {
  Fixture f(2, 2, 6);
  StepResult r = f.engine.reset(12);
  RandomPolicy policy;
  policy.begin_episode(f.engine, 12);
  for (int step = 0; step < 60 && !r.done; ++step) {
    for (int agent : r.need_action) {
      const auto mask = f.engine.role_of(agent) == Role::Agv
                            ? obs::agv_mask(f.engine.state(), f.graph, agent)
                            : obs::picker_mask(f.engine.state(), f.graph, 2, agent);
      CHECK(obs::mask_any(mask));
    }
    r = f.engine.step(policy.decide(f.engine, r.need_action));
  }
}

TEST_CASE("masked sampling never draws an illegal action over 1e5 draws") {
  Fixture f;
  f.engine.reset(13);
  const auto mask = obs::agv_mask(f.engine.state(), f.graph, 0);
  Rng rng(99);
  Eigen::VectorXd logits(f.graph.size());
  for (int i = 0; i < logits.size(); ++i) logits[i] = rng.normal();
  const auto dist = MaskedCategorical::from_logits(logits, mask);
  for (int draw = 0; draw < 100000; ++draw) {
    const int a = dist.sample(rng);
    CHECK(mask[a] == 1);
  }
}

TEST_CASE("reward function covers every branch of the per-tick rules") {
  std::vector<Event> events;
  // otherwise: -0.05 for both roles
  CHECK(obs::reward_from_events(events, Role::Picker, 1) == doctest::Approx(-0.05));
  CHECK(obs::reward_from_events(events, Role::Agv, 0) == doctest::Approx(-0.05));
  // completed pick: picker +0.1; received item: AGV +0.1
  events.push_back({EventType::Pick, 3, 1, 4, 2, 0, 5});
  CHECK(obs::reward_from_events(events, Role::Picker, 1) == doctest::Approx(0.1));
  CHECK(obs::reward_from_events(events, Role::Agv, 0) == doctest::Approx(0.1));
  // uninvolved agents still pay the step penalty
  CHECK(obs::reward_from_events(events, Role::Picker, 9) == doctest::Approx(-0.05));
  CHECK(obs::reward_from_events(events, Role::Agv, 7) == doctest::Approx(-0.05));
  // completed order: AGV +0.1
  events.clear();
  events.push_back({EventType::Complete, 8, 0, 2, -1, -1, 5});
  CHECK(obs::reward_from_events(events, Role::Agv, 0) == doctest::Approx(0.1));
  CHECK(obs::reward_from_events(events, Role::Picker, 1) == doctest::Approx(-0.05));
}

TEST_CASE("observation lengths stay constant across an episode") {
  Fixture f(2, 1, 4);
  StepResult r = f.engine.reset(14);
  RandomPolicy policy;
  policy.begin_episode(f.engine, 14);
  const int expected = obs::picker_layout(f.graph, 3, 2).length;
  for (int step = 0; step < 40 && !r.done; ++step) {
    CHECK(obs::picker_observation(f.engine.state(), f.graph, 2).size() == expected);
    r = f.engine.step(policy.decide(f.engine, r.need_action));
  }
}
