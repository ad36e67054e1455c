#include "tvflow/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tvflow/crawler.hpp"
#include "tvflow/effort.hpp"
#include "tvflow/error.hpp"
#include "tvflow/interaction_model.hpp"
#include "tvflow/json_io.hpp"
#include "tvflow/log_analytics.hpp"
#include "tvflow/scenario.hpp"
#include "tvflow/service.hpp"
#include "tvflow/simulator.hpp"
#include "tvflow/verifier.hpp"

namespace tvflow {

namespace {

using nlohmann::json;

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << doc.dump(2) << '\n';
}

bool is_builtin_thresholds(const std::string& s) { return s == "initial" || s == "adjusted"; }

struct CrawlArgs {
  std::string app;
  std::optional<long long> budget;
  std::string out;
  std::string stats;
};

struct VerifyArgs {
  std::string model;
  std::string scenarios;
  std::string context;
  std::string delta_csv;
  std::string factors_csv;
  std::string thresholds = "adjusted";
  std::string out;
  bool json_stdout = false;
  bool no_timestamp = false;
};

struct LogArgs {
  std::string logs;
  double exclude_ms = logs::kDefaultExclusionMs;
  std::string reports;
  std::string aggregates;
  std::string group;
  std::size_t min_samples = logs::kDefaultMinSamples;
  std::string out;
  bool json_stdout = false;
};

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
  std::string snapshot;
};

int do_crawl(const CrawlArgs& a, std::ostream& out) {
  CrawlConfig config;
  if (a.budget) {
    if (*a.budget < 1) throw ValidationError({"node budget must be >= 1"});
    config.node_budget = static_cast<std::size_t>(*a.budget);
  }
  const CrawlResult run = crawl(sim::load_app_file(a.app), config);
  std::ofstream model(a.out);
  if (!model) throw Error("cannot write '" + a.out + "'");
  save_model(run.model, model);
  const json stats = to_json(run.stats);
  if (!a.stats.empty()) write_json_file(a.stats, stats);
  out << "nodes " << run.stats.nodes << ", edges " << run.stats.edges << ", end nodes "
      << run.stats.end_nodes << (run.stats.truncated ? ", truncated by budget" : "") << '\n';
  return kExitClean;
}

int do_verify(const VerifyArgs& a, std::ostream& out) {
  const InteractionModel model = load_model_file(a.model);
  const std::vector<Scenario> scenarios = load_scenarios_file(a.scenarios);

  Context ctx;
  if (!a.delta_csv.empty() || !a.factors_csv.empty()) {
    if (a.delta_csv.empty() || a.factors_csv.empty() || !a.context.empty()) {
      throw Error("use either --context or both --delta-csv and --factors-csv");
    }
    ctx = load_context_files(a.delta_csv, a.factors_csv);
  } else {
    ctx = builtin_context(a.context.empty() ? "adjusted" : a.context);
  }
  const Thresholds th = is_builtin_thresholds(a.thresholds) ? builtin_thresholds(a.thresholds)
                                                            : load_thresholds_file(a.thresholds);

  const SuiteResult suite = verify_suite(model, scenarios, ctx, th);
  json doc = {{"generated_at", a.no_timestamp ? json(nullptr) : json(utc_timestamp())},
              {"context", json_io::to_json(ctx)},
              {"thresholds", to_json(th)}};
  doc.update(to_json(suite));
  if (!a.out.empty()) write_json_file(a.out, doc);
  if (a.json_stdout) {
    out << doc.dump(2) << '\n';
  } else {
    out << "context " << ctx.name << ", thresholds " << th.name << '\n';
    write_report_table(suite, out);
  }
  if (suite.error_count > 0) return kExitError;
  return suite.total_findings() > 0 ? kExitFindings : kExitClean;
}

logs::Exclusion load_and_exclude(const LogArgs& a, std::ostream& out) {
  const auto steps = logs::load_logs_file(a.logs);
  auto ex = logs::exclude_outliers(steps, a.exclude_ms);
  out << "steps " << steps.size() << ", excluded " << ex.excluded.size() << " (> "
      << a.exclude_ms << " ms), kept " << ex.kept.size() << '\n';
  return ex;
}

void emit(const LogArgs& a, const json& doc, std::ostream& out) {
  if (!a.out.empty()) write_json_file(a.out, doc);
  if (a.json_stdout) out << doc.dump(2) << '\n';
}

int do_analyze(const LogArgs& a, std::ostream& out) {
  std::ostringstream tables;
  const auto ex = load_and_exclude(a, tables);
  const auto stats = logs::action_stats(ex.kept);
  const auto aggregates = logs::scenario_aggregates(ex.kept);
  if (!a.json_stdout) {
    out << tables.str() << '\n';
    logs::write_action_table(stats, out);
    out << '\n';
    logs::write_aggregate_table(aggregates, out);
  }
  emit(a,
       {{"steps", ex.kept.size() + ex.excluded.size()},
        {"excluded", ex.excluded.size()},
        {"kept", ex.kept.size()},
        {"exclude_ms", a.exclude_ms},
        {"actions", logs::to_json(stats)},
        {"scenarios", logs::to_json(aggregates)}},
       out);
  return kExitClean;
}

json read_json_file(const std::string& path, std::string_view what) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + std::string(what) + " '" + path + "'");
  return json_io::parse_text(in, what);
}

int do_compare(const LogArgs& a, std::ostream& out) {
  if (a.logs.empty() == a.aggregates.empty()) {
    throw Error("compare needs exactly one of --logs and --aggregates");
  }
  std::ostringstream header;
  std::vector<logs::ScenarioAggregate> users;
  if (!a.logs.empty()) {
    users = logs::scenario_aggregates(load_and_exclude(a, header).kept);
  } else {
    json doc = read_json_file(a.aggregates, "aggregates document");
    // bundle of named groups: pick one
    if (doc.is_object() && doc.contains("groups")) {
      if (a.group.empty()) throw Error("aggregates document has groups; pass --group");
      if (!doc["groups"].contains(a.group)) throw Error("no aggregate group '" + a.group + "'");
      doc = doc["groups"][a.group];
    } else if (!a.group.empty()) {
      throw Error("--group given but the aggregates document has no groups");
    }
    users = logs::aggregates_from_json(doc);
  }
  const auto method =
      logs::method_results_from_json(read_json_file(a.reports, "report document"));
  const auto rows = logs::compare(users, method);
  if (!a.json_stdout) {
    if (!a.logs.empty()) out << header.str() << '\n';
    logs::write_comparison_table(rows, out);
  }
  emit(a, {{"comparison", logs::to_json(rows)}}, out);
  return kExitClean;
}

int do_calibrate(const LogArgs& a, std::ostream& out) {
  std::ostringstream header;
  const auto ex = load_and_exclude(a, header);
  const auto suggestions = logs::calibrate(ex.kept, a.min_samples);
  if (!a.json_stdout) {
    out << header.str() << '\n';
    logs::write_calibration_table(suggestions, out);
    out << "\nSuggestions are advisory; review before updating a context.\n";
  }
  emit(a, {{"min_samples", a.min_samples}, {"suggestions", logs::to_json(suggestions)}}, out);
  return kExitClean;
}

int do_serve(const ServeArgs& a, std::ostream& out) {
  service::Service svc(a.snapshot.empty() ? std::nullopt : std::optional(a.snapshot));
  service::ServeOptions opts{a.host, a.port,
                             a.static_dir.empty() ? std::nullopt : std::optional(a.static_dir)};
  service::HttpServer server(svc, opts);
  const int port = server.bind();
  if (port < 0) throw Error("cannot bind " + a.host + ":" + std::to_string(a.port));
  out << "listening on http://" << a.host << ':' << port << "/api/v1/" << std::endl;
  return server.listen() ? kExitClean : kExitError;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Build and verify UI interaction models of simulated Smart TV apps"};
  app.name("tvflow");
  app.require_subcommand(1);

  CrawlArgs crawl_args;
  auto* crawl_cmd = app.add_subcommand("crawl", "Crawl a simulated app into a model document");
  crawl_cmd->add_option("--app", crawl_args.app, "App spec (JSON)")->required();
  crawl_cmd->add_option("--budget", crawl_args.budget, "Maximum number of nodes");
  crawl_cmd->add_option("--out", crawl_args.out, "Model document to write")->required();
  crawl_cmd->add_option("--stats", crawl_args.stats, "Write crawl statistics (JSON)");

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "Verify scenarios against a model");
  verify_cmd->add_option("--model", verify_args.model, "Model document")->required();
  verify_cmd->add_option("--scenarios", verify_args.scenarios, "Scenario document")->required();
  verify_cmd->add_option("--context", verify_args.context, "Builtin context: initial, adjusted");
  verify_cmd->add_option("--delta-csv", verify_args.delta_csv, "Per-action delta/UC CSV");
  verify_cmd->add_option("--factors-csv", verify_args.factors_csv, "Device/environment CSV");
  verify_cmd->add_option("--thresholds", verify_args.thresholds,
                         "Builtin name (initial, adjusted) or JSON file");
  verify_cmd->add_option("--out", verify_args.out, "Write the report document (JSON)");
  verify_cmd->add_flag("--json", verify_args.json_stdout, "Print the report document");
  verify_cmd->add_flag("--no-timestamp", verify_args.no_timestamp,
                       "Leave generated_at empty for reproducible output");

  LogArgs log_args;
  auto add_log_options = [&](CLI::App* cmd, bool logs_required = true) {
    auto* logs_opt = cmd->add_option("--logs", log_args.logs, "Session log CSV");
    if (logs_required) logs_opt->required();
    cmd->add_option("--exclude-ms", log_args.exclude_ms, "Drop steps longer than this")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", log_args.out, "Write the result document (JSON)");
    cmd->add_flag("--json", log_args.json_stdout, "Print the result document");
  };
  auto* analyze_cmd = app.add_subcommand("analyze-logs", "Per-action and per-scenario statistics");
  add_log_options(analyze_cmd);
  auto* compare_cmd = app.add_subcommand("compare", "Compare user logs with verification reports");
  add_log_options(compare_cmd, false);
  compare_cmd->add_option("--aggregates", log_args.aggregates,
                          "Per-scenario user aggregates (JSON) instead of --logs");
  compare_cmd->add_option("--group", log_args.group, "Group to read from a grouped aggregates file");
  compare_cmd->add_option("--reports", log_args.reports, "Report document from verify")
      ->required();
  auto* calibrate_cmd = app.add_subcommand("calibrate", "Suggest per-action default efforts");
  add_log_options(calibrate_cmd);
  calibrate_cmd->add_option("--min-samples", log_args.min_samples,
                            "Valid steps needed for a suggestion");

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--host", serve_args.host, "Bind address");
  serve_cmd->add_option("--port", serve_args.port, "Port (0 picks a free one)")
      ->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--static", serve_args.static_dir, "Directory served at /");
  serve_cmd->add_option("--snapshot", serve_args.snapshot, "Snapshot file (loaded if present)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitClean : kExitError;
  }

  try {
    if (*crawl_cmd) return do_crawl(crawl_args, out);
    if (*verify_cmd) return do_verify(verify_args, out);
    if (*analyze_cmd) return do_analyze(log_args, out);
    if (*compare_cmd) return do_compare(log_args, out);
    if (*calibrate_cmd) return do_calibrate(log_args, out);
    if (*serve_cmd) return do_serve(serve_args, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace tvflow
