#include "tvflow/scenario_path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_set>

#include "tvflow/error.hpp"

namespace tvflow {

std::vector<std::string> ResolvedPath::node_sequence() const {
  std::vector<std::string> out{start_node};
  for (const auto& e : edges) out.push_back(e.target);
  return out;
}

PathMetrics path_metrics(const std::string& start_node, const std::vector<Edge>& edges,
                         const Context& ctx) {
  PathMetrics m;
  m.length = edges.size();
  std::unordered_set<std::string> seen{start_node};
  std::string_view at = start_node;
  for (const auto& e : edges) {
    if (e.source != at) {
      throw Error("edge '" + e.id + "' does not start at '" + std::string(at) + "'");
    }
    seen.insert(e.target);
    at = e.target;
  }
  m.unique_nodes = seen.size();
  m.node_repetition =
      edges.empty() ? 1.0 : static_cast<double>(m.length + 1) / static_cast<double>(m.unique_nodes);
  m.effort = path_effort(edges, ctx);
  return m;
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_cost(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

struct Label {
  double cost = kInf;
  std::size_t hops = kNone;
  std::size_t pred = kNone;  // edge index
  bool settled = false;
};

std::vector<std::size_t> trace(const InteractionModel& model, const std::vector<Label>& labels,
                               std::size_t node) {
  std::vector<std::size_t> seq;
  while (labels[node].pred != kNone) {
    seq.push_back(labels[node].pred);
    node = model.source_index(labels[node].pred);
  }
  std::reverse(seq.begin(), seq.end());
  return seq;
}

/// true when path(u) ++ [e] sorts before path(v) by edge id.
bool lex_less(const InteractionModel& model, const std::vector<Label>& labels, std::size_t u,
              std::size_t e, std::size_t v) {
  auto a = trace(model, labels, u);
  a.push_back(e);
  auto b = trace(model, labels, v);
  return std::lexicographical_compare(
      a.begin(), a.end(), b.begin(), b.end(),
      [&](std::size_t x, std::size_t y) { return model.edges()[x].id < model.edges()[y].id; });
}

}  // namespace

std::optional<std::vector<std::size_t>> shortest_segment(const InteractionModel& model,
                                                         std::size_t from, std::size_t to,
                                                         const std::vector<double>& weights) {
  if (from == to) return std::vector<std::size_t>{};

  std::vector<Label> labels(model.node_count());
  using Entry = std::tuple<double, std::size_t, std::size_t>;  // cost, hops, node
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  labels[from].cost = 0.0;
  labels[from].hops = 0;
  queue.emplace(0.0, 0, from);

  while (!queue.empty()) {
    auto [cost, hops, u] = queue.top();
    queue.pop();
    if (labels[u].settled || cost != labels[u].cost || hops != labels[u].hops) continue;
    labels[u].settled = true;
    if (u == to) return trace(model, labels, to);

    for (std::size_t e : model.outgoing(u)) {
      const double w = weights[e];
      if (!std::isfinite(w)) continue;
      const std::size_t v = model.target_index(e);
      if (labels[v].settled) continue;
      const double c = cost + w;
      const std::size_t h = hops + 1;
      Label& lv = labels[v];
      bool better;
      if (!std::isfinite(lv.cost)) {
        better = true;
      } else if (!same_cost(c, lv.cost)) {
        better = c < lv.cost;
      } else if (h != lv.hops) {
        better = h < lv.hops;
      } else {
        better = lex_less(model, labels, u, e, v);
      }
      if (!better) continue;
      const bool key_changed = c != lv.cost || h != lv.hops;
      lv.cost = c;
      lv.hops = h;
      lv.pred = e;
      if (key_changed) queue.emplace(c, h, v);
    }
  }
  return std::nullopt;
}

namespace {

struct CheckedScenario {
  std::vector<std::size_t> index;  // node or edge index per waypoint
};

CheckedScenario check_scenario(const InteractionModel& model, const Scenario& s) {
  if (s.waypoints.empty()) throw Error("scenario '" + s.id + "' has no waypoints");
  if (s.waypoints.front().kind != Waypoint::Kind::Node ||
      s.waypoints.back().kind != Waypoint::Kind::Node) {
    throw Error("scenario '" + s.id + "' must begin and end with a node waypoint");
  }
  CheckedScenario out;
  for (std::size_t i = 0; i < s.waypoints.size(); ++i) {
    const auto& w = s.waypoints[i];
    auto idx = w.kind == Waypoint::Kind::Node ? model.node_index(w.id) : model.edge_index(w.id);
    if (!idx) {
      throw UnknownIdError("scenario '" + s.id + "' waypoint " + std::to_string(i) +
                           " references unknown " +
                           (w.kind == Waypoint::Kind::Node ? "node" : "edge") + " '" + w.id +
                           "'");
    }
    out.index.push_back(*idx);
  }
  return out;
}

Resolution resolve_with(const InteractionModel& model, const Scenario& s,
                        const CheckedScenario& checked, const std::vector<double>& weights,
                        const Context& ctx) {
  std::size_t at = checked.index.front();
  std::vector<std::size_t> walk;
  for (std::size_t i = 1; i < s.waypoints.size(); ++i) {
    const auto& w = s.waypoints[i];
    const std::size_t idx = checked.index[i];
    const std::size_t goal = w.kind == Waypoint::Kind::Node ? idx : model.source_index(idx);
    if (w.kind == Waypoint::Kind::Edge && !std::isfinite(weights[idx])) {
      return NotFound{NotFound::Reason::Unreachable, i, w.id};
    }
    auto seg = shortest_segment(model, at, goal, weights);
    if (!seg) return NotFound{NotFound::Reason::Unreachable, i, w.id};
    walk.insert(walk.end(), seg->begin(), seg->end());
    if (w.kind == Waypoint::Kind::Edge) {
      walk.push_back(idx);
      at = model.target_index(idx);
    } else {
      at = goal;
    }
  }
  ResolvedPath path;
  path.start_node = model.nodes()[checked.index.front()].id;
  path.edges.reserve(walk.size());
  for (std::size_t e : walk) path.edges.push_back(model.edges()[e]);
  path.metrics = path_metrics(path.start_node, path.edges, ctx);
  return path;
}

std::vector<double> unit_weights(const InteractionModel& model) {
  return std::vector<double>(model.edge_count(), 1.0);
}

}  // namespace

Resolution resolve_path(const InteractionModel& model, const Scenario& scenario,
                        const Context& ctx) {
  const auto checked = check_scenario(model, scenario);
  std::vector<double> weights(model.edge_count());
  for (std::size_t e = 0; e < model.edge_count(); ++e) {
    weights[e] = edge_effort(model.edges()[e], ctx).ms();
  }
  auto result = resolve_with(model, scenario, checked, weights, ctx);
  if (auto* nf = std::get_if<NotFound>(&result)) {
    auto structural = resolve_with(model, scenario, checked, unit_weights(model), ctx);
    if (std::holds_alternative<ResolvedPath>(structural)) {
      nf->reason = NotFound::Reason::InfeasibleForContext;
    } else {
      *nf = std::get<NotFound>(structural);
    }
  }
  return result;
}

Resolution resolve_structural(const InteractionModel& model, const Scenario& scenario) {
  const auto checked = check_scenario(model, scenario);
  Context unit;
  unit.name = "unit";
  unit.delta_ms.fill(1.0);
  unit.uc.fill(1.0);
  return resolve_with(model, scenario, checked, unit_weights(model), unit);
}

}  // namespace tvflow
