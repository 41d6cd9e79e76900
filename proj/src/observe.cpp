#include "orderpick/observe.hpp"

#include <stdexcept>

namespace orderpick::obs {

namespace {

void write_positions(const SimState& state, const WarehouseGraph& graph, Eigen::VectorXd& out) {
  const double span_x = graph.max_x() - graph.min_x();
  const double span_y = graph.max_y() - graph.min_y();
  const double inv_x = span_x > 0.0 ? 1.0 / span_x : 0.0;
  const double inv_y = span_y > 0.0 ? 1.0 / span_y : 0.0;
  int k = 0;
  for (const auto& w : state.workers) {
    const Location& cur = graph.location(w.current);
    const Location& tgt = graph.location(w.target);
    out[k++] = (cur.x - graph.min_x()) * inv_x;
    out[k++] = (cur.y - graph.min_y()) * inv_y;
    out[k++] = (tgt.x - graph.min_x()) * inv_x;
    out[k++] = (tgt.y - graph.min_y()) * inv_y;
  }
}

void write_order(const WorkerState& agv, int num_items, Eigen::VectorXd& out, int offset) {
  if (!agv.order) return;
  const Order& order = *agv.order;
  for (size_t i = 0; i < order.lines.size(); ++i)
    if (!order.picked[i]) out[offset + order.lines[i].item] = 1.0;
}

}  // namespace

ObservationLayout picker_layout(const WarehouseGraph& graph, int num_agents, int num_agvs) {
  ObservationLayout layout;
  layout.segments.push_back({"agent_positions", 0, 4 * num_agents});
  layout.segments.push_back({"agv_orders", 4 * num_agents, num_agvs * graph.num_items()});
  layout.length = 4 * num_agents + num_agvs * graph.num_items();
  return layout;
}

ObservationLayout agv_layout(const WarehouseGraph& graph, int num_agents) {
  ObservationLayout layout;
  layout.segments.push_back({"agent_positions", 0, 4 * num_agents});
  layout.segments.push_back({"own_order", 4 * num_agents, graph.num_items()});
  layout.length = 4 * num_agents + graph.num_items();
  return layout;
}

Eigen::VectorXd picker_observation(const SimState& state, const WarehouseGraph& graph,
                                   int num_agvs) {
  const int n = static_cast<int>(state.workers.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(4 * n + num_agvs * graph.num_items());
  write_positions(state, graph, out);
  for (int v = 0; v < num_agvs; ++v)
    write_order(state.workers[v], graph.num_items(), out, 4 * n + v * graph.num_items());
  return out;
}

Eigen::VectorXd agv_observation(const SimState& state, const WarehouseGraph& graph, int num_agvs,
                                int v) {
  if (v < 0 || v >= num_agvs) throw std::invalid_argument("agv_observation: not an AGV");
  const int n = static_cast<int>(state.workers.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(4 * n + graph.num_items());
  write_positions(state, graph, out);
  write_order(state.workers[v], graph.num_items(), out, 4 * n);
  return out;
}

Mask agv_mask(const SimState& state, const WarehouseGraph& graph, int v, const Mask* sector) {
  const WorkerState& w = state.workers.at(v);
  if (w.role != Role::Agv) throw std::invalid_argument("agv_mask: not an AGV");
  Mask mask(graph.size(), 0);
  auto admit = [&](int node) {
    if (!sector || (*sector)[node]) mask[node] = 1;
  };
  if (w.order && w.order->remaining_count() > 0) {
    for (size_t i = 0; i < w.order->lines.size(); ++i)
      if (!w.order->picked[i]) admit(graph.item_node(w.order->lines[i].item));
  } else {
    for (int s : graph.stations()) admit(s);
  }
  return mask;
}

Mask picker_mask(const SimState& state, const WarehouseGraph& graph, int num_agvs, int p,
                 const Mask* sector) {
  const WorkerState& w = state.workers.at(p);
  if (w.role != Role::Picker) throw std::invalid_argument("picker_mask: not a picker");
  Mask mask(graph.size(), 0);
  bool any = false;
  auto admit = [&](int node) {
    if (!sector || (*sector)[node]) {
      mask[node] = 1;
      any = true;
    }
  };
  for (int v = 0; v < num_agvs; ++v) {
    admit(state.workers[v].current);
    admit(state.workers[v].target);
  }
  if (!any) mask[w.current] = 1;  // stay put
  return mask;
}

bool mask_any(const Mask& mask) {
  for (uint8_t m : mask)
    if (m) return true;
  return false;
}

double reward_from_events(const std::vector<Event>& events, Role role, int agent) {
  bool productive = false;
  for (const Event& e : events) {
    if (role == Role::Picker && e.type == EventType::Pick && e.agent == agent) productive = true;
    if (role == Role::Agv && e.type == EventType::Pick && e.partner == agent) productive = true;
    if (role == Role::Agv && e.type == EventType::Complete && e.agent == agent) productive = true;
  }
  return productive ? 0.1 : -0.05;
}

}  // namespace orderpick::obs
