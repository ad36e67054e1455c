#include "tvflow/crawler.hpp"

#include <chrono>
#include <deque>
#include <unordered_map>

#include "tvflow/error.hpp"

namespace tvflow {

void validate_crawl_config(const CrawlConfig& config) {
  std::vector<std::string> problems;
  if (config.node_budget && *config.node_budget < 1) problems.push_back("node budget must be >= 1");
  std::array<int, kActionCount> seen{};
  for (Action a : config.action_order) ++seen[index_of(a)];
  for (int n : seen) {
    if (n != 1) {
      problems.push_back("action order must list each of the six actions exactly once");
      break;
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

namespace {

std::uint64_t key_of(sim::AppSpec::Location l) {
  return (static_cast<std::uint64_t>(l.screen) << 32) | l.element;
}

Node make_node(const sim::AppSpec& spec, sim::AppSpec::Location l) {
  const auto& screen = spec.screen(l.screen);
  const auto& el = spec.element(l);
  Node n;
  n.id = screen.id + "/" + el.id;
  n.kind = el.container ? NodeKind::NestedContainer : NodeKind::Screen;
  n.label = el.label.empty() ? n.id : el.label;
  return n;
}

}  // namespace

CrawlResult crawl(const sim::AppSpec& spec, const CrawlConfig& config) {
  validate_crawl_config(config);
  const auto started = std::chrono::steady_clock::now();
  const std::size_t budget = config.node_budget.value_or(static_cast<std::size_t>(-1));

  ModelDocument doc;
  std::vector<sim::SimState> states;
  std::unordered_map<std::uint64_t, std::size_t> index;
  std::deque<std::size_t> frontier;
  CrawlStats stats;

  auto admit = [&](const sim::SimState& s) {
    const std::size_t i = doc.nodes.size();
    doc.nodes.push_back(make_node(spec, s.at));
    states.push_back(s);
    index.emplace(key_of(s.at), i);
    frontier.push_back(i);
    return i;
  };

  admit(sim::initial_state(spec));
  doc.start = doc.nodes.front().id;

  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop_front();
    for (Action a : config.action_order) {
      // `states` may grow during admit(); copy what we need first.
      const sim::StepResult r = sim::step(spec, states[u], a);
      ++stats.actions_simulated;
      if (r.effect == sim::Effect::Noop) continue;

      std::size_t v;
      if (r.effect == sim::Effect::Internal) {
        v = u;
      } else if (auto it = index.find(key_of(r.state.at)); it != index.end()) {
        v = it->second;
      } else if (doc.nodes.size() < budget) {
        v = admit(r.state);
      } else {
        stats.truncated = true;
        continue;
      }
      const std::string& source = doc.nodes[u].id;
      doc.edges.push_back(
          Edge{source + ":" + std::string(to_string(a)), source, doc.nodes[v].id, a});
    }
  }

  CrawlResult result{InteractionModel::from_document(std::move(doc)), std::move(states), stats};
  result.stats.duration_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
          .count();
  result.stats = crawl_stats(result);
  return result;
}

CrawlStats crawl_stats(const CrawlResult& run) {
  CrawlStats s = run.stats;
  s.nodes = run.model.node_count();
  s.edges = run.model.edge_count();
  s.end_nodes = run.model.end_nodes().size();
  return s;
}

nlohmann::json to_json(const CrawlStats& s) {
  return {{"nodes", s.nodes},
          {"edges", s.edges},
          {"end_nodes", s.end_nodes},
          {"actions_simulated", s.actions_simulated},
          {"truncated", s.truncated},
          {"duration_ms", s.duration_ms}};
}

}  // namespace tvflow
