#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tvflow/action.hpp"

namespace tvflow {

enum class NodeKind { Screen, NestedContainer };

std::string_view to_string(NodeKind k) noexcept;
std::optional<NodeKind> parse_node_kind(std::string_view s) noexcept;

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Screen;
  std::string label;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
  std::string id;
  std::string source;
  std::string target;
  Action action = Action::Ok;

  bool is_loop() const noexcept { return source == target; }
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Raw, unvalidated content of a model document.
struct ModelDocument {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::string start;
};

struct Violation {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string code;  // e.g. "dangling-source", "nondeterministic-action", "unreachable"
  std::string message;
  std::vector<std::string> ids;
};

/// All invariant violations of a document. Errors make the document unloadable;
/// warnings (unreachable nodes) do not.
std::vector<Violation> validate(const ModelDocument& doc);

/// Directed multigraph of UI nodes and action-labelled transitions.
///
/// Immutable once built. End nodes (no outgoing edge) are derived at
/// construction and cannot drift from the edge set.
class InteractionModel {
 public:
  /// Throws ValidationError listing every error-severity violation.
  static InteractionModel from_document(ModelDocument doc);

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::string& start() const noexcept { return start_; }
  const std::vector<std::string>& end_nodes() const noexcept { return end_nodes_; }

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  std::optional<std::size_t> node_index(std::string_view id) const;
  std::optional<std::size_t> edge_index(std::string_view id) const;
  const Node* find_node(std::string_view id) const;
  const Edge* find_edge(std::string_view id) const;

  /// Indices into edges() of the edges leaving node `node_idx`, in document order.
  std::span<const std::size_t> outgoing(std::size_t node_idx) const { return out_[node_idx]; }
  std::size_t source_index(std::size_t edge_idx) const { return edge_src_[edge_idx]; }
  std::size_t target_index(std::size_t edge_idx) const { return edge_dst_[edge_idx]; }

  /// Edge leaving `node_id` on `action`, if any.
  const Edge* transition(std::string_view node_id, Action action) const;

  bool is_end_node(std::string_view id) const;

  ModelDocument to_document() const { return {nodes_, edges_, start_}; }

  /// Non-fatal findings (currently: nodes unreachable from start).
  std::vector<Violation> warnings() const;

  /// Exact equality, element order included.
  friend bool operator==(const InteractionModel& a, const InteractionModel& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_ && a.start_ == b.start_;
  }

 private:
  InteractionModel() = default;

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::string start_;
  std::vector<std::string> end_nodes_;
  std::unordered_map<std::string, std::size_t> node_idx_;
  std::unordered_map<std::string, std::size_t> edge_idx_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::size_t> edge_src_;
  std::vector<std::size_t> edge_dst_;
};

/// Same node set (id, kind, label), same edge set compared as
/// (source, action, target) triples, same start. Order and edge ids ignored.
bool structurally_equal(const InteractionModel& a, const InteractionModel& b);

/// Human-readable first difference, empty when structurally equal.
std::string structural_diff(const InteractionModel& a, const InteractionModel& b);

InteractionModel load_model(std::istream& in);
InteractionModel load_model_file(const std::string& path);
void save_model(const InteractionModel& model, std::ostream& out);
std::string save_model(const InteractionModel& model);

}  // namespace tvflow
