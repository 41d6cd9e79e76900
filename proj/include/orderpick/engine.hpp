#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "orderpick/path_cache.hpp"
#include "orderpick/rng.hpp"
#include "orderpick/warehouse.hpp"

namespace orderpick {

enum class Role { Agv, Picker };

struct EngineConfig {
  double dt = 5.0;             // seconds per decision tick
  double speed = 1.66;         // meters/second in scaled space
  int orders_per_episode = 80;
  int max_ticks = 20000;       // safety cap
  uint64_t seed = 0;

  void validate() const;
};

enum class EventType { Commit, Arrive, Pick, Complete, Assign };

const char* to_string(EventType type);

struct Event {
  EventType type;
  int tick = 0;
  int agent = -1;    // primary actor (picker for Pick, AGV otherwise)
  int node = -1;
  int item = -1;     // Pick only
  int partner = -1;  // Pick: the receiving AGV
  int order = -1;    // Pick/Complete/Assign
};

// Travel commitment plus held order. `current` is the last node reached on
// the committed path; a worker is uncommitted exactly when it sits on a node.
struct WorkerState {
  int id = -1;
  Role role = Role::Agv;
  int current = -1;
  int target = -1;
  bool committed = false;
  std::vector<int> path;
  std::vector<double> path_cum;  // cumulative meters per path node
  double progress = 0.0;         // meters along path
  int path_cursor = 0;
  std::optional<Order> order;    // AGVs only
  double assign_clock = 0.0;     // clock when the held order was assigned

  double path_length() const { return path_cum.empty() ? 0.0 : path_cum.back(); }
  double remaining_meters() const { return committed ? path_length() - progress : 0.0; }
};

struct MetricsAccumulator {
  std::vector<double> distance_m;  // per worker, scaled meters
  std::vector<double> idle_s;      // per worker
  long lines_picked = 0;
  std::vector<double> lead_times_s;  // per completed order
};

// Per-episode summary. Distances are reported in real meters (scaled values
// divided by the layout scale); idle and distance figures are means over the
// workers of the role.
struct MetricsReport {
  double pick_rate_lines_per_hour = 0.0;
  double agv_distance_m = 0.0;
  double picker_distance_m = 0.0;
  double agv_idle_s = 0.0;
  double picker_idle_s = 0.0;
  double mean_lead_time_s = 0.0;
  long lines_picked = 0;
  int completed_orders = 0;
  double clock_s = 0.0;
  int ticks = 0;
};

struct SimState {
  int tick = 0;
  double clock = 0.0;  // == tick * dt
  std::vector<WorkerState> workers;
  std::deque<Order> queue;  // FIFO pending orders
  int completed = 0;
  int total_orders = 0;
  MetricsAccumulator metrics;
  Rng rng;

  int orders_in_flight() const;
  // serialises everything that defines the trajectory, for determinism checks
  std::string fingerprint() const;
};

struct StepResult {
  std::vector<double> rewards;  // per agent
  bool done = false;
  bool truncated = false;        // done via the tick cap
  std::vector<int> need_action;  // agents that must act next step
};

// per-agent chosen target node; nullopt is the no-op for committed agents
using JointAction = std::vector<std::optional<int>>;

// The world: advances in fixed ticks, executes travel commitments, resolves
// picks and order completions, manages the FIFO queue and metrics. One engine
// instance per execution context; the graph and path cache are shared
// read-only between instances.
class Engine {
public:
  Engine(const WarehouseGraph& graph, const PathCache& cache, WorkerSpec workers,
         OrderProfile profile, EngineConfig config);

  // workers to start locations, fresh orders, first |V| assigned FIFO
  StepResult reset(uint64_t seed);
  StepResult reset() { return reset(config_.seed); }

  StepResult step(const JointAction& actions);

  const SimState& state() const { return state_; }
  const WarehouseGraph& graph() const { return graph_; }
  const PathCache& cache() const { return cache_; }
  const EngineConfig& config() const { return config_; }
  const WorkerSpec& worker_spec() const { return spec_; }

  int num_agents() const { return spec_.num_agvs + spec_.num_pickers; }
  int num_agvs() const { return spec_.num_agvs; }
  int num_pickers() const { return spec_.num_pickers; }
  Role role_of(int agent) const { return agent < spec_.num_agvs ? Role::Agv : Role::Picker; }

  bool done() const { return done_; }
  const std::vector<Event>& last_events() const { return last_events_; }

  // legal targets for an uncommitted agent; never empty without a sector scope
  std::vector<uint8_t> action_mask(int agent) const;

  MetricsReport episode_metrics() const;

  // optional JSON-lines event sink (tick, agent, event, node, ...)
  void set_event_sink(std::function<void(const Event&)> sink) { event_sink_ = std::move(sink); }

private:
  void emit(const Event& e);
  std::vector<int> compute_need_action() const;
  void commit_to(WorkerState& w, int target_node);

  const WarehouseGraph& graph_;
  const PathCache& cache_;
  WorkerSpec spec_;
  OrderProfile profile_;
  EngineConfig config_;

  SimState state_;
  bool done_ = false;
  bool truncated_ = false;
  std::vector<Event> last_events_;
  std::function<void(const Event&)> event_sink_;
  std::vector<int> resolved_starts_;
};

// renders an event as one JSON line (no trailing newline)
std::string event_to_json(const Event& event);

}  // namespace orderpick
