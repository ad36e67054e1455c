#include "tvflow/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "csv.hpp"
#include "tvflow/error.hpp"
#include "tvflow/json_io.hpp"

namespace tvflow {

using nlohmann::json;

Thresholds builtin_thresholds(std::string_view name) {
  if (name == "adjusted") return Thresholds{"adjusted", 1.5, 100, 100000};
  if (name == "initial") return Thresholds{"initial", 1.5, 20, 25000};
  throw UnknownIdError("unknown thresholds '" + std::string(name) +
                       "' (expected initial or adjusted)");
}

void validate_thresholds(const Thresholds& t) {
  std::vector<std::string> problems;
  if (!(t.node_repetition > 0)) problems.push_back("node repetition threshold must be > 0");
  if (t.path_length == 0) problems.push_back("path length threshold must be > 0");
  if (!(t.effort_ms > 0)) problems.push_back("effort threshold must be > 0");
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

std::string_view to_string(Rule r) noexcept {
  switch (r) {
    case Rule::DesignFlawNoPath: return "DESIGN_FLAW_NO_PATH";
    case Rule::NodeRepetitionExceeded: return "NODE_REPETITION_EXCEEDED";
    case Rule::PathLengthExceeded: return "PATH_LENGTH_EXCEEDED";
    case Rule::EffortExceeded: return "EFFORT_EXCEEDED";
    case Rule::InfeasibleForContext: return "INFEASIBLE_FOR_CONTEXT";
  }
  return "?";
}

std::optional<Rule> parse_rule(std::string_view s) noexcept {
  for (Rule r : {Rule::DesignFlawNoPath, Rule::NodeRepetitionExceeded, Rule::PathLengthExceeded,
                 Rule::EffortExceeded, Rule::InfeasibleForContext}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

bool VerificationReport::has_finding(Rule r) const {
  return std::any_of(findings.begin(), findings.end(),
                     [r](const Finding& f) { return f.rule == r; });
}

VerificationReport verify(const InteractionModel& model, const Scenario& scenario,
                          const Context& ctx, const Thresholds& thresholds) {
  VerificationReport report;
  report.scenario_id = scenario.id;
  report.context_name = ctx.name;

  auto resolution = resolve_path(model, scenario, ctx);
  if (auto* nf = std::get_if<NotFound>(&resolution)) {
    report.failure = *nf;
    if (nf->reason == NotFound::Reason::Unreachable) {
      report.path_exists = false;
      report.findings.push_back({Rule::DesignFlawNoPath, std::nullopt, std::nullopt,
                                 "waypoint " + std::to_string(nf->waypoint_index) + " ('" +
                                     nf->waypoint_id + "') cannot be reached"});
      return report;
    }
    // The walk exists structurally; its effort is infinite for this user.
    auto structural = resolve_structural(model, scenario);
    auto& path = std::get<ResolvedPath>(structural);
    path.metrics = path_metrics(path.start_node, path.edges, ctx);
    report.path_exists = true;
    report.path = std::move(path);
    report.findings.push_back({Rule::InfeasibleForContext, std::nullopt, std::nullopt,
                               "waypoint " + std::to_string(nf->waypoint_index) + " ('" +
                                   nf->waypoint_id + "') needs an action the user cannot perform"});
    return report;
  }

  report.path_exists = true;
  report.path = std::move(std::get<ResolvedPath>(resolution));
  const PathMetrics& m = report.path->metrics;

  if (!report.path->is_simple() && m.node_repetition > thresholds.node_repetition) {
    report.findings.push_back(
        {Rule::NodeRepetitionExceeded, m.node_repetition, thresholds.node_repetition, {}});
  }
  if (m.length > thresholds.path_length) {
    report.findings.push_back({Rule::PathLengthExceeded, static_cast<double>(m.length),
                               static_cast<double>(thresholds.path_length), {}});
  }
  if (!m.effort.feasible()) {
    report.findings.push_back({Rule::InfeasibleForContext, std::nullopt, std::nullopt, {}});
  } else if (m.effort.ms() > thresholds.effort_ms) {
    report.findings.push_back({Rule::EffortExceeded, m.effort.ms(), thresholds.effort_ms, {}});
  }
  return report;
}

std::size_t SuiteResult::total_findings() const {
  std::size_t n = 0;
  for (const auto& [rule, count] : finding_counts) n += count;
  return n;
}

SuiteResult verify_suite(const InteractionModel& model, const std::vector<Scenario>& scenarios,
                         const Context& ctx, const Thresholds& thresholds) {
  std::vector<std::future<SuiteEntry>> pending;
  pending.reserve(scenarios.size());
  for (const auto& s : scenarios) {
    pending.push_back(std::async(std::launch::async, [&model, &s, &ctx, &thresholds] {
      SuiteEntry entry;
      entry.scenario_id = s.id;
      try {
        entry.report = verify(model, s, ctx, thresholds);
      } catch (const Error& e) {
        entry.error = e.what();
      }
      return entry;
    }));
  }
  SuiteResult result;
  for (auto& f : pending) {
    result.entries.push_back(f.get());
    const auto& entry = result.entries.back();
    if (!entry.report) {
      ++result.error_count;
      continue;
    }
    for (const auto& finding : entry.report->findings) ++result.finding_counts[finding.rule];
  }
  return result;
}

// ---------------------------------------------------------------------------
// Edits

namespace {

struct EditApplier {
  ModelDocument& doc;

  void operator()(const edit::AddNode& e) { doc.nodes.push_back(e.node); }

  void operator()(const edit::RemoveNode& e) {
    auto it = std::find_if(doc.nodes.begin(), doc.nodes.end(),
                           [&](const Node& n) { return n.id == e.id; });
    if (it == doc.nodes.end()) throw UnknownIdError("no node '" + e.id + "'");
    doc.nodes.erase(it);
    std::erase_if(doc.edges,
                  [&](const Edge& x) { return x.source == e.id || x.target == e.id; });
  }

  void operator()(const edit::AddEdge& e) { doc.edges.push_back(e.edge); }

  void operator()(const edit::RemoveEdge& e) {
    auto n = std::erase_if(doc.edges, [&](const Edge& x) { return x.id == e.id; });
    if (n == 0) throw UnknownIdError("no edge '" + e.id + "'");
  }

  void operator()(const edit::SetStart& e) {
    if (std::none_of(doc.nodes.begin(), doc.nodes.end(),
                     [&](const Node& n) { return n.id == e.id; })) {
      throw UnknownIdError("no node '" + e.id + "'");
    }
    doc.start = e.id;
  }
};

}  // namespace

InteractionModel apply_edit(const InteractionModel& model, const ModelEdit& e) {
  ModelDocument doc = model.to_document();
  std::visit(EditApplier{doc}, e);
  return InteractionModel::from_document(std::move(doc));
}

ModelEdit edit_from_json(const json& j) {
  const std::string op = json_io::require_string(j, "op", "");
  if (op == "add_node") {
    const json& n = json_io::require(j, "node", "");
    Node node;
    node.id = json_io::require_string(n, "id", "/node");
    auto kind = parse_node_kind(n.value("kind", std::string("screen")));
    if (!kind) throw ParseError("/node/kind", "unknown node kind");
    node.kind = *kind;
    node.label = n.value("label", node.id);
    return edit::AddNode{std::move(node)};
  }
  if (op == "remove_node") return edit::RemoveNode{json_io::require_string(j, "id", "")};
  if (op == "add_edge") {
    const json& x = json_io::require(j, "edge", "");
    Edge edge;
    edge.source = json_io::require_string(x, "source", "/edge");
    edge.target = json_io::require_string(x, "target", "/edge");
    const std::string action = json_io::require_string(x, "action", "/edge");
    auto a = parse_action(action);
    if (!a) throw ParseError("/edge/action", "unknown action '" + action + "'");
    edge.action = *a;
    edge.id = x.contains("id") ? json_io::require_string(x, "id", "/edge")
                               : edge.source + ":" + std::string(to_string(*a));
    return edit::AddEdge{std::move(edge)};
  }
  if (op == "remove_edge") return edit::RemoveEdge{json_io::require_string(j, "id", "")};
  if (op == "set_start") return edit::SetStart{json_io::require_string(j, "id", "")};
  throw ParseError("/op", "unknown edit op '" + op + "'");
}

json to_json(const ModelEdit& e) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, edit::AddNode>) {
          return {{"op", "add_node"},
                  {"node",
                   {{"id", x.node.id}, {"kind", to_string(x.node.kind)}, {"label", x.node.label}}}};
        } else if constexpr (std::is_same_v<T, edit::RemoveNode>) {
          return {{"op", "remove_node"}, {"id", x.id}};
        } else if constexpr (std::is_same_v<T, edit::AddEdge>) {
          return {{"op", "add_edge"},
                  {"edge",
                   {{"id", x.edge.id},
                    {"source", x.edge.source},
                    {"target", x.edge.target},
                    {"action", to_string(x.edge.action)}}}};
        } else if constexpr (std::is_same_v<T, edit::RemoveEdge>) {
          return {{"op", "remove_edge"}, {"id", x.id}};
        } else {
          return {{"op", "set_start"}, {"id", x.id}};
        }
      },
      e);
}

// ---------------------------------------------------------------------------
// Serialization

json to_json(const Thresholds& t) {
  return {{"name", t.name},
          {"nr", t.node_repetition},
          {"path_length", t.path_length},
          {"effort_ms", t.effort_ms}};
}

Thresholds thresholds_from_json(const json& j) {
  if (j.is_string()) return builtin_thresholds(j.get<std::string>());
  if (j.is_object() && j.size() == 1 && j.contains("name")) {
    return builtin_thresholds(json_io::require_string(j, "name", ""));
  }
  Thresholds t;
  t.name = j.value("name", std::string("custom"));
  t.node_repetition = json_io::require_number(j, "nr", "");
  const double len = json_io::require_number(j, "path_length", "");
  if (len < 0 || std::floor(len) != len) throw ParseError("/path_length", "expected a count");
  t.path_length = static_cast<std::size_t>(len);
  t.effort_ms = json_io::require_number(j, "effort_ms", "");
  validate_thresholds(t);
  return t;
}

Thresholds load_thresholds_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open thresholds file '" + path + "'");
  return thresholds_from_json(json_io::parse_text(in, "thresholds document"));
}

namespace {

json effort_json(Effort e) { return e.feasible() ? json(e.ms()) : json("INFEASIBLE"); }

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json to_json(const ResolvedPath& p) {
  json edges = json::array();
  for (const auto& e : p.edges) edges.push_back(e.id);
  json actions = json::array();
  for (const auto& e : p.edges) actions.push_back(to_string(e.action));
  return {{"start", p.start_node},
          {"edges", std::move(edges)},
          {"actions", std::move(actions)},
          {"nodes", p.node_sequence()},
          {"length", p.metrics.length},
          {"unique_nodes", p.metrics.unique_nodes},
          {"node_repetition", p.metrics.node_repetition},
          {"simple", p.is_simple()},
          {"degenerate", p.is_degenerate()},
          {"effort_ms", effort_json(p.metrics.effort)}};
}

json to_json(const VerificationReport& r) {
  json findings = json::array();
  for (const auto& f : r.findings) {
    json jf = {{"rule", to_string(f.rule)},
               {"measured", optional_number(f.measured)},
               {"threshold", optional_number(f.threshold)}};
    if (!f.detail.empty()) jf["detail"] = f.detail;
    findings.push_back(std::move(jf));
  }
  json out = {{"scenario", r.scenario_id},
              {"context", r.context_name},
              {"path_exists", r.path_exists},
              {"path", r.path ? to_json(*r.path) : json(nullptr)},
              {"findings", std::move(findings)}};
  if (r.failure) {
    out["failure"] = {{"reason", r.failure->reason == NotFound::Reason::Unreachable
                                     ? "unreachable"
                                     : "infeasible-for-context"},
                      {"waypoint_index", r.failure->waypoint_index},
                      {"waypoint_id", r.failure->waypoint_id}};
  }
  return out;
}

json to_json(const SuiteResult& s) {
  json reports = json::array();
  json errors = json::array();
  for (const auto& e : s.entries) {
    if (e.report) {
      reports.push_back(to_json(*e.report));
    } else {
      errors.push_back({{"scenario", e.scenario_id}, {"error", e.error}});
    }
  }
  json counts = json::object();
  for (const auto& [rule, n] : s.finding_counts) counts[std::string(to_string(rule))] = n;
  return {{"reports", std::move(reports)},
          {"errors", std::move(errors)},
          {"summary", {{"findings", std::move(counts)}, {"total_findings", s.total_findings()}}}};
}

std::string format_ms(double v) {
  if (!std::isfinite(v)) return "INFEASIBLE";
  if (std::floor(v) == v && std::abs(v) < 1e15) return std::to_string(static_cast<long long>(v));
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

void write_report_table(const SuiteResult& suite, std::ostream& out) {
  out << std::left << std::setw(12) << "scenario" << std::right << std::setw(14) << "E(p(t),C)"
      << std::setw(9) << "|p(t)|" << std::setw(8) << "nr" << "  findings\n";
  for (const auto& entry : suite.entries) {
    out << std::left << std::setw(12) << entry.scenario_id << std::right;
    if (!entry.report) {
      out << std::setw(14) << "-" << std::setw(9) << "-" << std::setw(8) << "-"
          << "  ERROR: " << entry.error << '\n';
      continue;
    }
    const auto& r = *entry.report;
    if (r.path) {
      std::ostringstream nr;
      nr << std::fixed << std::setprecision(3) << r.path->metrics.node_repetition;
      out << std::setw(14) << format_ms(r.path->metrics.effort.ms()) << std::setw(9)
          << r.path->metrics.length << std::setw(8) << nr.str();
    } else {
      out << std::setw(14) << "-" << std::setw(9) << "-" << std::setw(8) << "-";
    }
    out << "  ";
    if (r.findings.empty()) out << "none";
    for (std::size_t i = 0; i < r.findings.size(); ++i) {
      const auto& f = r.findings[i];
      if (i) out << ", ";
      out << to_string(f.rule);
      if (f.measured && f.threshold) {
        out << " (" << csv::format_double(*f.measured) << " > " << csv::format_double(*f.threshold)
            << ")";
      }
    }
    out << '\n';
  }
}

}  // namespace tvflow
