#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include <json.hpp>

#include "tvflow/interaction_model.hpp"
#include "tvflow/simulator.hpp"

namespace tvflow {

struct CrawlConfig {
  std::optional<std::size_t> node_budget;  // nullopt: unlimited
  std::array<Action, kActionCount> action_order = kAllActions;
};

/// Throws ValidationError for a zero budget or an action order that is not a
/// permutation of the six actions.
void validate_crawl_config(const CrawlConfig& config);

struct CrawlStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t end_nodes = 0;
  std::size_t actions_simulated = 0;
  bool truncated = false;  // some reachable state was not admitted
  double duration_ms = 0;
};

struct CrawlResult {
  InteractionModel model;
  /// Simulator state at which each node (same index as model.nodes()) was
  /// first reached; the crawl explored every action from exactly this state.
  std::vector<sim::SimState> node_states;
  CrawlStats stats;
};

/// Breadth-first exploration from the app's initial state. A node is a
/// (screen, focused element) pair, named "screen/element"; internal flags are
/// not part of node identity. Each node is probed with every action in
/// `action_order`: moves, opens and backs add an edge, an internal toggle adds
/// a self-loop, a no-op adds nothing. Once the budget is full, transitions to
/// states that were never admitted are dropped.
CrawlResult crawl(const sim::AppSpec& spec, const CrawlConfig& config = {});

/// Counts recomputed from the emitted model plus the run's bookkeeping.
CrawlStats crawl_stats(const CrawlResult& run);

nlohmann::json to_json(const CrawlStats& stats);

}  // namespace tvflow
