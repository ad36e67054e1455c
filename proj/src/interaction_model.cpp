#include "tvflow/interaction_model.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "tvflow/error.hpp"
#include "tvflow/json_io.hpp"

namespace tvflow {

std::string_view to_string(NodeKind k) noexcept {
  return k == NodeKind::Screen ? "screen" : "nested-container";
}

std::optional<NodeKind> parse_node_kind(std::string_view s) noexcept {
  if (s == "screen") return NodeKind::Screen;
  if (s == "nested-container") return NodeKind::NestedContainer;
  return std::nullopt;
}

namespace {

Violation error(std::string code, std::string message, std::vector<std::string> ids) {
  return {Violation::Severity::Error, std::move(code), std::move(message), std::move(ids)};
}

std::vector<Violation> unreachable_from(const std::vector<std::string>& node_ids,
                                        const std::map<std::string, std::vector<std::string>>& adj,
                                        const std::string& start) {
  std::set<std::string> seen{start};
  std::vector<std::string> stack{start};
  while (!stack.empty()) {
    std::string n = std::move(stack.back());
    stack.pop_back();
    auto it = adj.find(n);
    if (it == adj.end()) continue;
    for (const auto& t : it->second) {
      if (seen.insert(t).second) stack.push_back(t);
    }
  }
  std::vector<Violation> out;
  for (const auto& id : node_ids) {
    if (!seen.count(id)) {
      out.push_back({Violation::Severity::Warning, "unreachable",
                     "node '" + id + "' is unreachable from start", {id}});
    }
  }
  return out;
}

}  // namespace

std::vector<Violation> validate(const ModelDocument& doc) {
  std::vector<Violation> out;
  if (doc.nodes.empty()) out.push_back(error("empty-model", "model has no nodes", {}));

  std::set<std::string> node_ids;
  std::vector<std::string> ordered_ids;
  for (const auto& n : doc.nodes) {
    if (!node_ids.insert(n.id).second) {
      out.push_back(error("duplicate-node", "duplicate node id '" + n.id + "'", {n.id}));
    } else {
      ordered_ids.push_back(n.id);
    }
  }

  std::set<std::string> edge_ids;
  std::map<std::pair<std::string, Action>, std::string> by_source_action;
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& e : doc.edges) {
    if (!edge_ids.insert(e.id).second) {
      out.push_back(error("duplicate-edge", "duplicate edge id '" + e.id + "'", {e.id}));
    }
    bool dangling = false;
    if (!node_ids.count(e.source)) {
      out.push_back(error("dangling-source",
                          "edge '" + e.id + "' has dangling source '" + e.source + "'",
                          {e.id, e.source}));
      dangling = true;
    }
    if (!node_ids.count(e.target)) {
      out.push_back(error("dangling-target",
                          "edge '" + e.id + "' has dangling target '" + e.target + "'",
                          {e.id, e.target}));
      dangling = true;
    }
    auto [it, fresh] = by_source_action.emplace(std::pair{e.source, e.action}, e.id);
    if (!fresh) {
      out.push_back(error("nondeterministic-action",
                          "node '" + e.source + "' has more than one " +
                              std::string(to_string(e.action)) + " edge ('" + it->second +
                              "', '" + e.id + "')",
                          {e.source, it->second, e.id}));
    }
    if (!dangling) adj[e.source].push_back(e.target);
  }

  if (doc.start.empty() || !node_ids.count(doc.start)) {
    out.push_back(error("missing-start", "start node '" + doc.start + "' is not a model node",
                        {doc.start}));
  } else {
    auto warn = unreachable_from(ordered_ids, adj, doc.start);
    out.insert(out.end(), warn.begin(), warn.end());
  }
  return out;
}

InteractionModel InteractionModel::from_document(ModelDocument doc) {
  std::vector<std::string> problems;
  for (const auto& v : validate(doc)) {
    if (v.severity == Violation::Severity::Error) problems.push_back(v.code + ": " + v.message);
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));

  InteractionModel m;
  m.nodes_ = std::move(doc.nodes);
  m.edges_ = std::move(doc.edges);
  m.start_ = std::move(doc.start);
  m.node_idx_.reserve(m.nodes_.size());
  for (std::size_t i = 0; i < m.nodes_.size(); ++i) m.node_idx_.emplace(m.nodes_[i].id, i);
  m.edge_idx_.reserve(m.edges_.size());
  m.out_.resize(m.nodes_.size());
  m.edge_src_.resize(m.edges_.size());
  m.edge_dst_.resize(m.edges_.size());
  for (std::size_t i = 0; i < m.edges_.size(); ++i) {
    m.edge_idx_.emplace(m.edges_[i].id, i);
    m.edge_src_[i] = m.node_idx_.at(m.edges_[i].source);
    m.edge_dst_[i] = m.node_idx_.at(m.edges_[i].target);
    m.out_[m.edge_src_[i]].push_back(i);
  }
  for (std::size_t i = 0; i < m.nodes_.size(); ++i) {
    if (m.out_[i].empty()) m.end_nodes_.push_back(m.nodes_[i].id);
  }
  return m;
}

std::optional<std::size_t> InteractionModel::node_index(std::string_view id) const {
  auto it = node_idx_.find(std::string(id));
  if (it == node_idx_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> InteractionModel::edge_index(std::string_view id) const {
  auto it = edge_idx_.find(std::string(id));
  if (it == edge_idx_.end()) return std::nullopt;
  return it->second;
}

const Node* InteractionModel::find_node(std::string_view id) const {
  auto i = node_index(id);
  return i ? &nodes_[*i] : nullptr;
}

const Edge* InteractionModel::find_edge(std::string_view id) const {
  auto i = edge_index(id);
  return i ? &edges_[*i] : nullptr;
}

const Edge* InteractionModel::transition(std::string_view node_id, Action action) const {
  auto n = node_index(node_id);
  if (!n) return nullptr;
  for (std::size_t e : out_[*n]) {
    if (edges_[e].action == action) return &edges_[e];
  }
  return nullptr;
}

bool InteractionModel::is_end_node(std::string_view id) const {
  auto n = node_index(id);
  return n && out_[*n].empty();
}

std::vector<Violation> InteractionModel::warnings() const {
  std::vector<Violation> out;
  for (auto& v : validate(to_document())) {
    if (v.severity == Violation::Severity::Warning) out.push_back(std::move(v));
  }
  return out;
}

namespace {

using EdgeKey = std::tuple<std::string, Action, std::string>;

std::set<EdgeKey> edge_keys(const InteractionModel& m) {
  std::set<EdgeKey> out;
  for (const auto& e : m.edges()) out.emplace(e.source, e.action, e.target);
  return out;
}

std::map<std::string, Node> node_map(const InteractionModel& m) {
  std::map<std::string, Node> out;
  for (const auto& n : m.nodes()) out.emplace(n.id, n);
  return out;
}

}  // namespace

std::string structural_diff(const InteractionModel& a, const InteractionModel& b) {
  if (a.start() != b.start()) return "start differs: '" + a.start() + "' vs '" + b.start() + "'";
  auto na = node_map(a);
  auto nb = node_map(b);
  for (const auto& [id, n] : na) {
    auto it = nb.find(id);
    if (it == nb.end()) return "node '" + id + "' only in first model";
    if (!(it->second == n)) return "node '" + id + "' differs in kind or label";
  }
  for (const auto& [id, n] : nb) {
    if (!na.count(id)) return "node '" + id + "' only in second model";
  }
  auto ea = edge_keys(a);
  auto eb = edge_keys(b);
  auto describe = [](const EdgeKey& k) {
    return std::get<0>(k) + " -" + std::string(to_string(std::get<1>(k))) + "-> " +
           std::get<2>(k);
  };
  for (const auto& k : ea) {
    if (!eb.count(k)) return "edge " + describe(k) + " only in first model";
  }
  for (const auto& k : eb) {
    if (!ea.count(k)) return "edge " + describe(k) + " only in second model";
  }
  return {};
}

bool structurally_equal(const InteractionModel& a, const InteractionModel& b) {
  return structural_diff(a, b).empty();
}

InteractionModel load_model(std::istream& in) {
  auto j = json_io::parse_text(in, "model document");
  return InteractionModel::from_document(json_io::model_document_from_json(j));
}

InteractionModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file '" + path + "'");
  return load_model(in);
}

void save_model(const InteractionModel& model, std::ostream& out) {
  out << json_io::to_json(model).dump(2) << '\n';
}

std::string save_model(const InteractionModel& model) {
  std::ostringstream os;
  save_model(model, os);
  return os.str();
}

}  // namespace tvflow
