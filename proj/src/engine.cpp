#include "orderpick/engine.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace orderpick {

namespace {
constexpr double kArrivalTolerance = 1e-9;  // meters

void hex_double(std::ostringstream& os, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  os << std::hex << bits << std::dec << ',';
}
}  // namespace

void EngineConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("engine config: dt must be positive");
  if (!(speed > 0.0)) throw std::invalid_argument("engine config: speed must be positive");
  if (orders_per_episode < 1) throw std::invalid_argument("engine config: need at least one order");
  if (max_ticks < 1) throw std::invalid_argument("engine config: max_ticks must be positive");
}

const char* to_string(EventType type) {
  switch (type) {
    case EventType::Commit: return "commit";
    case EventType::Arrive: return "arrive";
    case EventType::Pick: return "pick";
    case EventType::Complete: return "complete";
    case EventType::Assign: return "assign";
  }
  return "?";
}

std::string event_to_json(const Event& e) {
  std::ostringstream os;
  os << "{\"tick\":" << e.tick << ",\"agent\":" << e.agent << ",\"event\":\"" << to_string(e.type)
     << "\",\"node\":" << e.node;
  if (e.item >= 0) os << ",\"item\":" << e.item;
  if (e.partner >= 0) os << ",\"agv\":" << e.partner;
  if (e.order >= 0) os << ",\"order\":" << e.order;
  os << '}';
  return os.str();
}

int SimState::orders_in_flight() const {
  int n = 0;
  for (const auto& w : workers) n += w.order.has_value();
  return n;
}

std::string SimState::fingerprint() const {
  std::ostringstream os;
  os << tick << ',';
  hex_double(os, clock);
  for (const auto& w : workers) {
    os << w.id << ',' << static_cast<int>(w.role) << ',' << w.current << ',' << w.target << ','
       << w.committed << ',' << w.path_cursor << ',';
    hex_double(os, w.progress);
    os << w.path.size() << ',';
    if (w.order) {
      os << 'o' << w.order->id << ':';
      for (size_t i = 0; i < w.order->lines.size(); ++i)
        os << w.order->lines[i].item << (w.order->picked[i] ? '*' : '.');
      hex_double(os, w.assign_clock);
    } else {
      os << "none,";
    }
  }
  os << "q:";
  for (const auto& o : queue) {
    os << o.id << '[';
    for (const auto& line : o.lines) os << line.item << ' ';
    os << ']';
  }
  os << "c:" << completed << ",m:";
  for (double d : metrics.distance_m) hex_double(os, d);
  for (double d : metrics.idle_s) hex_double(os, d);
  os << metrics.lines_picked << ',';
  for (double d : metrics.lead_times_s) hex_double(os, d);
  os << "rng:" << rng.state();
  return os.str();
}

Engine::Engine(const WarehouseGraph& graph, const PathCache& cache, WorkerSpec workers,
               OrderProfile profile, EngineConfig config)
    : graph_(graph), cache_(cache), spec_(std::move(workers)), profile_(std::move(profile)),
      config_(config) {
  config_.validate();
  spec_.validate();
  if (cache_.size() != graph_.size())
    throw std::invalid_argument("engine: path cache does not match warehouse");
  if (profile_.num_items() != graph_.num_items())
    throw std::invalid_argument("engine: order profile item count does not match warehouse");

  resolved_starts_ = spec_.start_locations;
  for (int id : resolved_starts_)
    if (id < 0 || id >= graph_.size())
      throw std::invalid_argument("engine: start location out of range");
  if (resolved_starts_.empty()) {
    // default: idle points, front row (lowest y) first
    resolved_starts_ = graph_.idle_points();
    if (resolved_starts_.empty()) resolved_starts_ = graph_.stations();
    std::sort(resolved_starts_.begin(), resolved_starts_.end(), [&](int a, int b) {
      const Location& la = graph_.location(a);
      const Location& lb = graph_.location(b);
      if (la.y != lb.y) return la.y < lb.y;
      if (la.x != lb.x) return la.x < lb.x;
      return a < b;
    });
  }
  if (spec_.num_agvs > static_cast<int>(resolved_starts_.size()))
    throw std::invalid_argument("engine: more AGVs than start locations");
}

StepResult Engine::reset(uint64_t seed) {
  state_ = SimState{};
  state_.rng = Rng(seed);
  state_.total_orders = config_.orders_per_episode;
  done_ = false;
  truncated_ = false;
  last_events_.clear();

  const int n = num_agents();
  state_.workers.resize(n);
  for (int i = 0; i < n; ++i) {
    WorkerState& w = state_.workers[i];
    w = WorkerState{};
    w.id = i;
    w.role = role_of(i);
    w.current = resolved_starts_[i % resolved_starts_.size()];
    w.target = w.current;
  }
  state_.metrics.distance_m.assign(n, 0.0);
  state_.metrics.idle_s.assign(n, 0.0);

  for (int k = 0; k < config_.orders_per_episode; ++k)
    state_.queue.push_back(sample_order(profile_, state_.rng, k));
  for (int v = 0; v < spec_.num_agvs; ++v) {
    WorkerState& w = state_.workers[v];
    w.order = std::move(state_.queue.front());
    state_.queue.pop_front();
    w.assign_clock = 0.0;
    emit({EventType::Assign, 0, v, w.current, -1, -1, w.order->id});
  }

  StepResult result;
  result.rewards.assign(n, 0.0);
  result.need_action = compute_need_action();
  return result;
}

void Engine::emit(const Event& e) {
  last_events_.push_back(e);
  if (event_sink_) event_sink_(e);
}

std::vector<int> Engine::compute_need_action() const {
  std::vector<int> out;
  if (done_) return out;
  for (const auto& w : state_.workers)
    if (!w.committed) out.push_back(w.id);
  return out;
}

std::vector<uint8_t> Engine::action_mask(int agent) const {
  if (agent < 0 || agent >= num_agents()) throw std::invalid_argument("engine: bad agent id");
  const WorkerState& w = state_.workers[agent];
  if (w.committed) throw std::logic_error("engine: mask requested for a committed agent");
  std::vector<uint8_t> mask(graph_.size(), 0);
  if (w.role == Role::Agv) {
    bool any = false;
    if (w.order)
      for (size_t i = 0; i < w.order->lines.size(); ++i)
        if (!w.order->picked[i]) {
          mask[graph_.item_node(w.order->lines[i].item)] = 1;
          any = true;
        }
    if (!any)
      for (int s : graph_.stations()) mask[s] = 1;
  } else {
    for (int v = 0; v < spec_.num_agvs; ++v) {
      mask[state_.workers[v].current] = 1;
      mask[state_.workers[v].target] = 1;
    }
  }
  return mask;
}

void Engine::commit_to(WorkerState& w, int target) {
  w.target = target;
  w.path = cache_.path(w.current, target);
  w.path_cum.resize(w.path.size());
  w.path_cum[0] = 0.0;
  for (size_t i = 1; i < w.path.size(); ++i) {
    const Location& a = graph_.location(w.path[i - 1]);
    const Location& b = graph_.location(w.path[i]);
    w.path_cum[i] = w.path_cum[i - 1] + std::hypot(a.x - b.x, a.y - b.y);
  }
  w.progress = 0.0;
  w.path_cursor = 0;
  w.committed = true;
  emit({EventType::Commit, state_.tick, w.id, target});
}

StepResult Engine::step(const JointAction& actions) {
  if (done_) throw std::logic_error("engine: step after episode end");
  if (static_cast<int>(actions.size()) != num_agents())
    throw std::invalid_argument("engine: joint action size mismatch");
  last_events_.clear();
  const int n = num_agents();
  const double clock_after = (state_.tick + 1) * config_.dt;

  // 1. validate and adopt new commitments
  for (int i = 0; i < n; ++i) {
    WorkerState& w = state_.workers[i];
    if (w.committed) {
      if (actions[i].has_value())
        throw std::logic_error("engine: action supplied for committed agent " + std::to_string(i));
      continue;
    }
    if (!actions[i].has_value())
      throw std::logic_error("engine: missing action for uncommitted agent " + std::to_string(i));
    const int target = *actions[i];
    if (target < 0 || target >= graph_.size())
      throw std::invalid_argument("engine: target node out of range for agent " + std::to_string(i));
    if (w.role == Role::Agv) {
      // AGVs may only move to slots of their remaining order, else stations
      bool legal;
      if (w.order && w.order->remaining_count() > 0) {
        const Location& loc = graph_.location(target);
        legal = loc.kind == LocationKind::ItemSlot && w.order->remaining_contains(loc.item);
      } else {
        legal = graph_.location(target).kind == LocationKind::DeliveryStation;
      }
      if (!legal)
        throw std::logic_error("engine: out-of-mask target for AGV " + std::to_string(i));
    }
    commit_to(w, target);
  }

  // 2. advance travel, detect arrivals
  std::vector<double> moved(n, 0.0);
  for (int i = 0; i < n; ++i) {
    WorkerState& w = state_.workers[i];
    const double total = w.path_length();
    double next_progress = w.progress + config_.speed * config_.dt;
    if (total - next_progress < kArrivalTolerance) next_progress = total;
    moved[i] = next_progress - w.progress;
    state_.metrics.distance_m[i] += moved[i];
    w.progress = next_progress;
    while (w.path_cursor + 1 < static_cast<int>(w.path.size()) &&
           w.path_cum[w.path_cursor + 1] <= w.progress + 1e-12)
      ++w.path_cursor;
    w.current = w.path[w.path_cursor];
    if (w.progress == total) {
      w.current = w.target;
      w.committed = false;
      emit({EventType::Arrive, state_.tick, w.id, w.current});
    }
  }

  // 3. pick resolution: co-present picker + AGV needing the slot's item.
  // The lowest-id arrived picker at a slot is credited with every pick there.
  std::vector<std::pair<int, int>> pickers_at;  // (node, picker id), sorted
  for (int p = spec_.num_agvs; p < n; ++p)
    if (!state_.workers[p].committed) pickers_at.emplace_back(state_.workers[p].current, p);
  std::sort(pickers_at.begin(), pickers_at.end());

  std::vector<uint8_t> picked_flag(n, 0), received_flag(n, 0), completed_flag(n, 0);
  for (int v = 0; v < spec_.num_agvs; ++v) {
    WorkerState& w = state_.workers[v];
    if (w.committed || !w.order) continue;
    const Location& loc = graph_.location(w.current);
    if (loc.kind != LocationKind::ItemSlot || !w.order->remaining_contains(loc.item)) continue;
    auto it = std::lower_bound(pickers_at.begin(), pickers_at.end(), std::make_pair(w.current, -1));
    if (it == pickers_at.end() || it->first != w.current) continue;
    const int picker = it->second;
    for (int line : w.order->remaining_lines_for(loc.item)) {
      w.order->picked[line] = 1;
      state_.metrics.lines_picked += 1;
      emit({EventType::Pick, state_.tick, picker, w.current, loc.item, v, w.order->id});
    }
    picked_flag[picker] = 1;
    received_flag[v] = 1;
  }

  // 4. completions at delivery stations, FIFO reassignment
  for (int v = 0; v < spec_.num_agvs; ++v) {
    WorkerState& w = state_.workers[v];
    if (w.committed || !w.order || w.order->remaining_count() != 0) continue;
    if (graph_.location(w.current).kind != LocationKind::DeliveryStation) continue;
    state_.metrics.lead_times_s.push_back(clock_after - w.assign_clock);
    emit({EventType::Complete, state_.tick, v, w.current, -1, -1, w.order->id});
    state_.completed += 1;
    completed_flag[v] = 1;
    w.order.reset();
    if (!state_.queue.empty()) {
      w.order = std::move(state_.queue.front());
      state_.queue.pop_front();
      w.assign_clock = clock_after;
      emit({EventType::Assign, state_.tick, v, w.current, -1, -1, w.order->id});
    }
  }

  // 5. rewards and idle accounting
  StepResult result;
  result.rewards.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (received_flag[i] && completed_flag[i])
      throw std::logic_error("engine: pick and completion rewards may not stack in one tick");
    const bool productive = picked_flag[i] || received_flag[i] || completed_flag[i];
    result.rewards[i] = productive ? 0.1 : -0.05;
    if (moved[i] == 0.0 && !productive) state_.metrics.idle_s[i] += config_.dt;
  }

  // 6. advance the clock, close out the episode
  state_.tick += 1;
  state_.clock = state_.tick * config_.dt;
  if (state_.completed == config_.orders_per_episode) {
    done_ = true;
  } else if (state_.tick >= config_.max_ticks) {
    done_ = true;
    truncated_ = true;
  }
  result.done = done_;
  result.truncated = truncated_;
  result.need_action = compute_need_action();
  return result;
}

MetricsReport Engine::episode_metrics() const {
  if (!done_) throw std::logic_error("engine: episode metrics requested mid-episode");
  MetricsReport r;
  r.lines_picked = state_.metrics.lines_picked;
  r.completed_orders = state_.completed;
  r.clock_s = state_.clock;
  r.ticks = state_.tick;
  r.pick_rate_lines_per_hour =
      state_.clock > 0.0 ? state_.metrics.lines_picked / (state_.clock / 3600.0) : 0.0;
  const double unscale = 1.0 / graph_.scale();
  double agv_d = 0, picker_d = 0, agv_i = 0, picker_i = 0;
  for (int i = 0; i < num_agents(); ++i) {
    if (role_of(i) == Role::Agv) {
      agv_d += state_.metrics.distance_m[i];
      agv_i += state_.metrics.idle_s[i];
    } else {
      picker_d += state_.metrics.distance_m[i];
      picker_i += state_.metrics.idle_s[i];
    }
  }
  r.agv_distance_m = unscale * agv_d / spec_.num_agvs;
  r.picker_distance_m = unscale * picker_d / spec_.num_pickers;
  r.agv_idle_s = agv_i / spec_.num_agvs;
  r.picker_idle_s = picker_i / spec_.num_pickers;
  double lead = 0;
  for (double t : state_.metrics.lead_times_s) lead += t;
  r.mean_lead_time_s =
      state_.metrics.lead_times_s.empty() ? 0.0 : lead / state_.metrics.lead_times_s.size();
  return r;
}

}  // namespace orderpick
