#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tvflow/effort.hpp"
#include "tvflow/interaction_model.hpp"
#include "tvflow/scenario.hpp"

namespace tvflow {

struct PathMetrics {
  std::size_t length = 0;        // |p(t)|, number of edges
  std::size_t unique_nodes = 0;  // nodes(p(t))
  double node_repetition = 1.0;  // (length + 1) / unique_nodes
  Effort effort;
};

/// A concrete walk realizing a scenario.
struct ResolvedPath {
  std::string start_node;
  std::vector<Edge> edges;
  PathMetrics metrics;

  /// True when every visited node is distinct (length + 1 == unique_nodes).
  bool is_simple() const noexcept { return metrics.length + 1 == metrics.unique_nodes; }
  /// Zero-edge path; node repetition is reported as 1.0 by convention.
  bool is_degenerate() const noexcept { return edges.empty(); }
  /// start_node followed by the target of each edge.
  std::vector<std::string> node_sequence() const;
};

struct NotFound {
  enum class Reason {
    Unreachable,           // no walk exists in the graph at all
    InfeasibleForContext,  // walks exist, but each needs an INFEASIBLE edge
  };
  Reason reason = Reason::Unreachable;
  std::size_t waypoint_index = 0;  // first waypoint that could not be reached
  std::string waypoint_id;
};

using Resolution = std::variant<ResolvedPath, NotFound>;

/// Computes length, distinct nodes, node repetition and effort of a walk.
/// Throws Error if consecutive edges are not incident.
PathMetrics path_metrics(const std::string& start_node, const std::vector<Edge>& edges,
                         const Context& ctx);

/// Minimal-effort walk from the first to the last waypoint that visits every
/// waypoint in order. Ties break on fewer edges, then lexicographically smaller
/// edge-id sequence. INFEASIBLE edges are never used.
///
/// Throws UnknownIdError for ids missing from the model, and Error when the
/// scenario is empty or does not begin and end on a node.
Resolution resolve_path(const InteractionModel& model, const Scenario& scenario,
                        const Context& ctx);

/// Fewest-edge walk ignoring the context (every edge weighs 1). Used to report
/// the structural path of a scenario that is infeasible for a context.
Resolution resolve_structural(const InteractionModel& model, const Scenario& scenario);

/// Cheapest walk between two nodes over edges with finite weight. Weights are
/// indexed by edge; pass +inf to exclude an edge. Returns edge indices, or
/// nullopt when `to` is unreachable.
std::optional<std::vector<std::size_t>> shortest_segment(const InteractionModel& model,
                                                         std::size_t from, std::size_t to,
                                                         const std::vector<double>& weights);

}  // namespace tvflow
