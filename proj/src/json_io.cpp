#include "tvflow/json_io.hpp"

#include <array>
#include <istream>
#include <optional>
#include <sstream>

#include "tvflow/error.hpp"

namespace tvflow::json_io {

json parse_text(std::istream& in, std::string_view what) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports a byte offset; translate to line:column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(std::string(what) + " line " + std::to_string(line) + " column " +
                         std::to_string(col),
                     "malformed JSON");
  }
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path, std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) throw ParseError(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

double require_number(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number()) throw ParseError(path + "/" + key, "expected a number");
  return v.get<double>();
}

json to_json(const InteractionModel& model) {
  json nodes = json::array();
  for (const auto& n : model.nodes()) {
    nodes.push_back({{"id", n.id}, {"kind", to_string(n.kind)}, {"label", n.label}});
  }
  json edges = json::array();
  for (const auto& e : model.edges()) {
    edges.push_back({{"id", e.id},
                     {"source", e.source},
                     {"target", e.target},
                     {"action", to_string(e.action)}});
  }
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}, {"start", model.start()}};
}

ModelDocument model_document_from_json(const json& j) {
  ModelDocument doc;
  if (!j.is_object()) throw ParseError("/", "model document must be an object");
  const json& nodes = require(j, "nodes", "");
  if (!nodes.is_array()) throw ParseError("/nodes", "expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = "/nodes/" + std::to_string(i);
    Node n;
    n.id = require_string(nodes[i], "id", path);
    const std::string kind = require_string(nodes[i], "kind", path);
    auto k = parse_node_kind(kind);
    if (!k) throw ParseError(path + "/kind", "unknown node kind '" + kind + "'");
    n.kind = *k;
    n.label = nodes[i].contains("label") ? require_string(nodes[i], "label", path) : n.id;
    doc.nodes.push_back(std::move(n));
  }
  const json& edges = require(j, "edges", "");
  if (!edges.is_array()) throw ParseError("/edges", "expected an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string path = "/edges/" + std::to_string(i);
    Edge e;
    e.id = require_string(edges[i], "id", path);
    e.source = require_string(edges[i], "source", path);
    e.target = require_string(edges[i], "target", path);
    const std::string action = require_string(edges[i], "action", path);
    auto a = parse_action(action);
    if (!a) throw ParseError(path + "/action", "unknown action '" + action + "'");
    e.action = *a;
    doc.edges.push_back(std::move(e));
  }
  doc.start = require_string(j, "start", "");
  return doc;
}

namespace {

std::array<double, kActionCount> per_action(const json& obj, const std::string& path,
                                            std::optional<double> fallback) {
  if (!obj.is_object()) throw ParseError(path, "expected an object keyed by action");
  for (const auto& [key, value] : obj.items()) {
    if (!parse_action(key)) throw ParseError(path + "/" + key, "unknown action");
    if (!value.is_number()) throw ParseError(path + "/" + key, "expected a number");
  }
  std::array<double, kActionCount> out{};
  for (Action a : kAllActions) {
    const std::string key(to_string(a));
    if (obj.contains(key)) {
      out[index_of(a)] = obj.at(key).get<double>();
    } else if (fallback) {
      out[index_of(a)] = *fallback;
    } else {
      throw ParseError(path, "missing action " + key);
    }
  }
  return out;
}

}  // namespace

json to_json(const Context& ctx) {
  json delta = json::object(), uc = json::object();
  for (Action a : kAllActions) {
    delta[std::string(to_string(a))] = ctx.delta(a);
    uc[std::string(to_string(a))] = ctx.capability(a);
  }
  return {{"name", ctx.name},
          {"delta_ms", std::move(delta)},
          {"uc", std::move(uc)},
          {"device_factor", ctx.device_factor},
          {"env_factor", ctx.env_factor}};
}

Context context_from_json(const json& j) {
  if (j.is_string()) return builtin_context(j.get<std::string>());
  if (!j.is_object()) throw ParseError("/", "context must be a name or an object");
  if (j.contains("delta_csv") || j.contains("factors_csv")) {
    std::istringstream delta(require_string(j, "delta_csv", ""));
    std::istringstream factors(require_string(j, "factors_csv", ""));
    return load_context(delta, factors, j.contains("name") ? require_string(j, "name", "") : "custom");
  }
  if (!j.contains("delta_ms")) return builtin_context(require_string(j, "name", ""));
  Context c;
  c.name = j.contains("name") ? require_string(j, "name", "") : "custom";
  c.delta_ms = per_action(j.at("delta_ms"), "/delta_ms", std::nullopt);
  c.uc = j.contains("uc") ? per_action(j.at("uc"), "/uc", 1.0)
                          : std::array<double, kActionCount>{1, 1, 1, 1, 1, 1};
  c.device_factor = j.contains("device_factor") ? require_number(j, "device_factor", "") : 1.0;
  c.env_factor = j.contains("env_factor") ? require_number(j, "env_factor", "") : 1.0;
  validate_context(c);
  return c;
}

}  // namespace tvflow::json_io
