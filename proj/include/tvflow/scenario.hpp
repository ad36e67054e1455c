#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tvflow {

struct Waypoint {
  enum class Kind { Node, Edge };
  Kind kind = Kind::Node;
  std::string id;

  static Waypoint node(std::string id) { return {Kind::Node, std::move(id)}; }
  static Waypoint edge(std::string id) { return {Kind::Edge, std::move(id)}; }

  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

/// Tested user scenario: ordered node/edge references the user must visit.
/// Waypoints may repeat; the first and last must name nodes.
struct Scenario {
  std::string id;
  std::vector<Waypoint> waypoints;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Accepts one scenario object, an array of them, or {"scenarios": [...]}.
std::vector<Scenario> load_scenarios(std::istream& in);
std::vector<Scenario> load_scenarios_file(const std::string& path);
void save_scenarios(const std::vector<Scenario>& scenarios, std::ostream& out);

}  // namespace tvflow
