#include "tvflow/scenario.hpp"

#include <fstream>
#include <ostream>

#include "tvflow/error.hpp"
#include "tvflow/json_io.hpp"

namespace tvflow {

namespace {

using json_io::json;

Scenario scenario_from_json(const json& j, const std::string& path) {
  Scenario s;
  s.id = j.contains("id") && j.at("id").is_number_integer()
             ? std::to_string(j.at("id").get<long long>())
             : json_io::require_string(j, "id", path);
  const json& wps = json_io::require(j, "waypoints", path);
  if (!wps.is_array()) throw ParseError(path + "/waypoints", "expected an array");
  for (std::size_t i = 0; i < wps.size(); ++i) {
    const std::string wpath = path + "/waypoints/" + std::to_string(i);
    const json& w = wps[i];
    const bool has_node = w.is_object() && w.contains("node");
    const bool has_edge = w.is_object() && w.contains("edge");
    if (has_node == has_edge) {
      throw ParseError(wpath, "waypoint needs exactly one of 'node' or 'edge'");
    }
    s.waypoints.push_back(has_node ? Waypoint::node(json_io::require_string(w, "node", wpath))
                                   : Waypoint::edge(json_io::require_string(w, "edge", wpath)));
  }
  return s;
}

}  // namespace

std::vector<Scenario> json_io::scenarios_from_json(const json& j) {
  std::vector<Scenario> out;
  const json* list = &j;
  std::string base;
  if (j.is_object() && j.contains("scenarios")) {
    list = &j.at("scenarios");
    base = "/scenarios";
  }
  if (list->is_array()) {
    for (std::size_t i = 0; i < list->size(); ++i) {
      out.push_back(scenario_from_json((*list)[i], base + "/" + std::to_string(i)));
    }
  } else if (list->is_object()) {
    out.push_back(scenario_from_json(*list, ""));
  } else {
    throw ParseError("/", "expected a scenario object or array");
  }
  return out;
}

std::vector<Scenario> load_scenarios(std::istream& in) {
  return json_io::scenarios_from_json(json_io::parse_text(in, "scenario document"));
}

std::vector<Scenario> load_scenarios_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file '" + path + "'");
  return load_scenarios(in);
}

json json_io::to_json(const std::vector<Scenario>& scenarios) {
  json arr = json::array();
  for (const auto& s : scenarios) {
    json wps = json::array();
    for (const auto& w : s.waypoints) {
      wps.push_back({{w.kind == Waypoint::Kind::Node ? "node" : "edge", w.id}});
    }
    arr.push_back({{"id", s.id}, {"waypoints", std::move(wps)}});
  }
  return json{{"scenarios", std::move(arr)}};
}

void save_scenarios(const std::vector<Scenario>& scenarios, std::ostream& out) {
  out << json_io::to_json(scenarios).dump(2) << '\n';
}

}  // namespace tvflow
