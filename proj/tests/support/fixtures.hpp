#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "tvflow/crawler.hpp"
#include "tvflow/interaction_model.hpp"
#include "tvflow/scenario.hpp"
#include "tvflow/simulator.hpp"

namespace fixture {

inline std::string path(const std::string& name) { return std::string(TVFLOW_DATA_DIR) + "/" + name; }

/// Three-screen abstract app and its hand-transcribed model.
inline tvflow::sim::AppSpec abstract_app() { return tvflow::sim::load_app_file(path("abstract_app.json")); }
inline tvflow::InteractionModel abstract_model() {
  return tvflow::load_model_file(path("abstract_model.json"));
}

/// Movie-browsing app with three tester scenarios.
inline tvflow::sim::AppSpec movies_app() {
  return tvflow::sim::load_app_file(path("movies_app.json"));
}
inline tvflow::InteractionModel movies_model() { return tvflow::crawl(movies_app()).model; }
inline std::vector<tvflow::Scenario> movies_scenarios() {
  return tvflow::load_scenarios_file(path("movies_scenarios.json"));
}

/// Reference per-scenario user aggregates of both groups plus the expected
/// difference percentages.
inline nlohmann::json experiment_aggregates() {
  std::ifstream in(path("experiment_aggregates.json"));
  return nlohmann::json::parse(in);
}

}  // namespace fixture
