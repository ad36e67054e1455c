#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tvflow/effort.hpp"
#include "tvflow/interaction_model.hpp"
#include "tvflow/scenario.hpp"
#include "tvflow/scenario_path.hpp"

namespace tvflow {

struct Thresholds {
  std::string name = "adjusted";
  double node_repetition = 1.5;
  std::size_t path_length = 100;
  double effort_ms = 100000;

  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

/// "adjusted" (1.5 / 100 / 100000, the default) or "initial" (1.5 / 20 / 25000).
Thresholds builtin_thresholds(std::string_view name);
/// All three thresholds must be strictly positive; throws ValidationError.
void validate_thresholds(const Thresholds& t);

enum class Rule {
  DesignFlawNoPath,
  NodeRepetitionExceeded,
  PathLengthExceeded,
  EffortExceeded,
  InfeasibleForContext,
};

std::string_view to_string(Rule r) noexcept;
std::optional<Rule> parse_rule(std::string_view s) noexcept;

struct Finding {
  Rule rule = Rule::DesignFlawNoPath;
  std::optional<double> measured;   // absent for no-path / infeasible
  std::optional<double> threshold;  // absent for no-path / infeasible
  std::string detail;
};

struct VerificationReport {
  std::string scenario_id;
  std::string context_name;
  bool path_exists = false;
  std::optional<ResolvedPath> path;
  std::optional<NotFound> failure;
  std::vector<Finding> findings;

  bool has_finding(Rule r) const;
};

/// Rule set applied to one scenario:
///  - no path at all: DESIGN_FLAW_NO_PATH, nothing else;
///  - path only through INFEASIBLE edges: INFEASIBLE_FOR_CONTEXT alone;
///  - otherwise node repetition (non-simple paths only), length and effort,
///    each a strict `>` against its threshold.
VerificationReport verify(const InteractionModel& model, const Scenario& scenario,
                          const Context& ctx, const Thresholds& thresholds);

struct SuiteEntry {
  std::string scenario_id;
  std::optional<VerificationReport> report;
  std::string error;  // data error for this scenario; report is empty then
};

struct SuiteResult {
  std::vector<SuiteEntry> entries;
  std::map<Rule, std::size_t> finding_counts;
  std::size_t error_count = 0;

  std::size_t total_findings() const;
};

/// One entry per scenario, in input order. A bad scenario becomes an error
/// entry and does not stop the rest.
SuiteResult verify_suite(const InteractionModel& model, const std::vector<Scenario>& scenarios,
                         const Context& ctx, const Thresholds& thresholds);

namespace edit {
struct AddNode { Node node; };
struct RemoveNode { std::string id; };  // also drops incident edges
struct AddEdge { Edge edge; };
struct RemoveEdge { std::string id; };
struct SetStart { std::string id; };
}  // namespace edit

using ModelEdit =
    std::variant<edit::AddNode, edit::RemoveNode, edit::AddEdge, edit::RemoveEdge, edit::SetStart>;

/// Returns a new model with the edit applied; the input is untouched. Throws
/// UnknownIdError for a missing target and ValidationError when the result
/// would break an invariant (the edit is rejected as a whole).
InteractionModel apply_edit(const InteractionModel& model, const ModelEdit& e);

/// {"op": "add_edge", "edge": {...}} and friends.
ModelEdit edit_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ModelEdit& e);

nlohmann::json to_json(const Thresholds& t);
Thresholds thresholds_from_json(const nlohmann::json& j);
Thresholds load_thresholds_file(const std::string& path);

nlohmann::json to_json(const ResolvedPath& p);
nlohmann::json to_json(const VerificationReport& r);
nlohmann::json to_json(const SuiteResult& s);

/// Plain-text table: scenario id, E(p(t),C), |p(t)|, nr, findings.
void write_report_table(const SuiteResult& suite, std::ostream& out);

std::string format_ms(double v);

}  // namespace tvflow
