#include "tvflow/log_analytics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "csv.hpp"
#include "tvflow/error.hpp"
#include "tvflow/json_io.hpp"

namespace tvflow::logs {

using nlohmann::json;

std::vector<LogStep> load_logs(std::istream& in) {
  auto rows = csv::read(in);
  if (rows.empty()) throw ParseError("log CSV", "missing header");
  const std::vector<std::string> header = {"participant", "scenario", "action", "duration_ms",
                                           "valid"};
  if (rows.front().fields != header) {
    throw ParseError("log CSV line " + std::to_string(rows.front().line),
                     "expected header 'participant,scenario,action,duration_ms,valid'");
  }
  std::vector<LogStep> out;
  out.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const std::string where = "log CSV line " + std::to_string(r.line);
    if (r.fields.size() != 5) throw ParseError(where, "expected 5 fields");
    LogStep s;
    s.participant = r.fields[0];
    s.scenario = r.fields[1];
    if (s.participant.empty()) throw ParseError(where, "empty participant");
    if (s.scenario.empty()) throw ParseError(where, "empty scenario");
    auto a = parse_action(r.fields[2]);
    if (!a) throw ParseError(where, "unknown action '" + r.fields[2] + "'");
    s.action = *a;
    auto d = csv::to_double(r.fields[3]);
    if (!d || !std::isfinite(*d)) throw ParseError(where, "duration_ms is not a number");
    if (!(*d > 0)) throw ParseError(where, "duration_ms must be positive");
    s.duration_ms = *d;
    if (r.fields[4] == "true") {
      s.valid = true;
    } else if (r.fields[4] == "false") {
      s.valid = false;
    } else {
      throw ParseError(where, "valid must be 'true' or 'false'");
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<LogStep> load_logs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open log file '" + path + "'");
  return load_logs(in);
}

void write_logs(std::span<const LogStep> steps, std::ostream& out) {
  out << "participant,scenario,action,duration_ms,valid\n";
  for (const auto& s : steps) {
    out << s.participant << ',' << s.scenario << ',' << to_string(s.action) << ','
        << csv::format_double(s.duration_ms) << ',' << (s.valid ? "true" : "false") << '\n';
  }
}

Exclusion exclude_outliers(std::span<const LogStep> steps, double threshold_ms) {
  Exclusion out;
  for (const auto& s : steps) {
    (s.duration_ms > threshold_ms ? out.excluded : out.kept).push_back(s);
  }
  return out;
}

namespace {

struct Moments {
  std::size_t n = 0;
  double mean = 0;
  double sd = 0;  // sample
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  m.n = xs.size();
  if (m.n == 0) return m;
  // Sorting makes the sum independent of input order.
  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  m.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(m.n);
  if (m.n > 1) {
    double ss = 0;
    for (double x : sorted) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(m.n - 1));
  }
  return m;
}

bool scenario_less(const std::string& a, const std::string& b) {
  long long x = 0, y = 0;
  auto [pa, ea] = std::from_chars(a.data(), a.data() + a.size(), x);
  auto [pb, eb] = std::from_chars(b.data(), b.data() + b.size(), y);
  const bool na = ea == std::errc{} && pa == a.data() + a.size();
  const bool nb = eb == std::errc{} && pb == b.data() + b.size();
  if (na && nb) return x < y;
  if (na != nb) return na;
  return a < b;
}

}  // namespace

std::array<ActionStats, kActionCount> action_stats(std::span<const LogStep> steps) {
  std::array<std::vector<double>, kActionCount> durations;
  std::array<ActionStats, kActionCount> out;
  for (Action a : kAllActions) out[index_of(a)].action = a;
  for (const auto& s : steps) {
    auto& row = out[index_of(s.action)];
    (s.valid ? row.valid : row.invalid) += 1;
    durations[index_of(s.action)].push_back(s.duration_ms);
  }
  for (auto& row : out) {
    const Moments m = moments(durations[index_of(row.action)]);
    if (m.n == 0) {
      row.note = "insufficient data";
      continue;
    }
    row.mean_ms = m.mean;
    row.sd_ms = m.sd;
    if (m.n == 1) row.note = "single sample";
  }
  return out;
}

std::vector<ScenarioAggregate> scenario_aggregates(std::span<const LogStep> steps) {
  // scenario -> participant -> (time, steps)
  std::map<std::string, std::map<std::string, std::pair<double, std::size_t>>> runs;
  for (const auto& s : steps) {
    auto& run = runs[s.scenario][s.participant];
    run.first += s.duration_ms;
    run.second += 1;
  }
  std::vector<ScenarioAggregate> out;
  for (const auto& [scenario, participants] : runs) {
    std::vector<double> times, counts;
    for (const auto& [p, run] : participants) {
      times.push_back(run.first);
      counts.push_back(static_cast<double>(run.second));
    }
    const Moments t = moments(times);
    const Moments c = moments(counts);
    out.push_back({scenario, participants.size(), t.mean, t.sd, c.mean, c.sd});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return scenario_less(a.scenario, b.scenario);
  });
  return out;
}

std::vector<MethodResult> method_results(const SuiteResult& suite) {
  std::vector<MethodResult> out;
  for (const auto& entry : suite.entries) {
    MethodResult m{entry.scenario_id, std::nullopt, std::nullopt};
    if (entry.report && entry.report->path) {
      const auto& metrics = entry.report->path->metrics;
      m.length = metrics.length;
      if (metrics.effort.feasible()) m.effort_ms = metrics.effort.ms();
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<MethodResult> method_results_from_json(const json& doc) {
  const json* reports = &doc;
  if (doc.is_object() && doc.contains("reports")) reports = &doc.at("reports");
  if (!reports->is_array()) throw ParseError("/reports", "expected an array of reports");
  std::vector<MethodResult> out;
  for (std::size_t i = 0; i < reports->size(); ++i) {
    const json& r = (*reports)[i];
    const std::string path = "/reports/" + std::to_string(i);
    if (!r.is_object() || !r.contains("scenario") || !r.at("scenario").is_string()) {
      throw ParseError(path, "report needs a string 'scenario'");
    }
    MethodResult m{r.at("scenario").get<std::string>(), std::nullopt, std::nullopt};
    if (r.contains("path") && r.at("path").is_object()) {
      const json& p = r.at("path");
      if (p.contains("length") && p.at("length").is_number_unsigned()) {
        m.length = p.at("length").get<std::size_t>();
      }
      if (p.contains("effort_ms") && p.at("effort_ms").is_number()) {
        m.effort_ms = p.at("effort_ms").get<double>();
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<ScenarioAggregate> aggregates_from_json(const json& doc) {
  const json* rows = &doc;
  if (doc.is_object() && doc.contains("scenarios")) rows = &doc.at("scenarios");
  if (!rows->is_array()) throw ParseError("/scenarios", "expected an array of aggregates");
  std::vector<ScenarioAggregate> out;
  for (std::size_t i = 0; i < rows->size(); ++i) {
    const json& r = (*rows)[i];
    const std::string path = "/scenarios/" + std::to_string(i);
    ScenarioAggregate a;
    a.scenario = json_io::require_string(r, "scenario", path);
    const double participants = r.contains("participants")
                                    ? json_io::require_number(r, "participants", path)
                                    : 0.0;
    if (participants < 0 || std::floor(participants) != participants) {
      throw ParseError(path + "/participants", "expected a count");
    }
    a.participants = static_cast<std::size_t>(participants);
    a.avg_time_ms = json_io::require_number(r, "avg_time_ms", path);
    a.avg_steps = json_io::require_number(r, "avg_stp", path);
    a.avg_time_sd = r.contains("avg_time_sd") ? json_io::require_number(r, "avg_time_sd", path) : 0;
    a.avg_steps_sd = r.contains("avg_stp_sd") ? json_io::require_number(r, "avg_stp_sd", path) : 0;
    if (!(a.avg_time_ms > 0) || !(a.avg_steps > 0)) {
      throw ParseError(path, "averages must be positive");
    }
    out.push_back(std::move(a));
  }
  return out;
}

double percent_2dp(double numerator, double denominator) {
  const double pct = numerator / denominator * 100.0;
  return std::floor(pct * 100.0 + 0.5) / 100.0;
}

std::vector<ComparisonRow> compare(std::span<const ScenarioAggregate> users,
                                   std::span<const MethodResult> method) {
  std::vector<ComparisonRow> out;
  for (const auto& u : users) {
    auto it = std::find_if(method.begin(), method.end(),
                           [&](const MethodResult& m) { return m.scenario == u.scenario; });
    if (it == method.end()) {
      throw UnknownIdError("no verification result for scenario '" + u.scenario + "'");
    }
    ComparisonRow row{u, *it, std::nullopt, std::nullopt};
    if (it->effort_ms && u.avg_time_ms > 0) row.diff_time_pct = percent_2dp(*it->effort_ms, u.avg_time_ms);
    if (it->length && u.avg_steps > 0) {
      row.diff_steps_pct = percent_2dp(static_cast<double>(*it->length), u.avg_steps);
    }
    out.push_back(std::move(row));
  }
  return out;
}

double round_to_multiple(double value, double step) {
  return std::floor(value / step + 0.5) * step;
}

std::array<CalibrationSuggestion, kActionCount> calibrate(std::span<const LogStep> steps,
                                                          std::size_t min_samples) {
  std::array<std::vector<double>, kActionCount> durations;
  for (const auto& s : steps) {
    if (s.valid) durations[index_of(s.action)].push_back(s.duration_ms);
  }
  std::array<CalibrationSuggestion, kActionCount> out;
  for (Action a : kAllActions) {
    auto& row = out[index_of(a)];
    row.action = a;
    const Moments m = moments(durations[index_of(a)]);
    row.samples = m.n;
    if (m.n > 0) row.mean_ms = m.mean;
    if (m.n < min_samples || m.n == 0) {
      row.note = "insufficient data";
      continue;
    }
    row.suggested_delta_ms = round_to_multiple(m.mean, 25.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string opt_fixed(const std::optional<double>& v, int digits, const char* suffix = "") {
  return v ? fixed(*v, digits) + suffix : "-";
}

}  // namespace

json to_json(const std::array<ActionStats, kActionCount>& stats) {
  json out = json::array();
  for (const auto& s : stats) {
    json row = {{"action", to_string(s.action)},
                {"valid", s.valid},
                {"invalid", s.invalid},
                {"avg_time_ms", opt(s.mean_ms)},
                {"sd_ms", opt(s.sd_ms)}};
    if (!s.note.empty()) row["note"] = s.note;
    out.push_back(std::move(row));
  }
  return out;
}

json to_json(std::span<const ScenarioAggregate> aggregates) {
  json out = json::array();
  for (const auto& a : aggregates) {
    out.push_back({{"scenario", a.scenario},
                   {"participants", a.participants},
                   {"avg_time_ms", a.avg_time_ms},
                   {"avg_time_sd", a.avg_time_sd},
                   {"avg_stp", a.avg_steps},
                   {"avg_stp_sd", a.avg_steps_sd}});
  }
  return out;
}

json to_json(std::span<const ComparisonRow> rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"scenario", r.users.scenario},
                   {"avg_time_ms", r.users.avg_time_ms},
                   {"avg_time_sd", r.users.avg_time_sd},
                   {"avg_stp", r.users.avg_steps},
                   {"avg_stp_sd", r.users.avg_steps_sd},
                   {"effort_ms", opt(r.method.effort_ms)},
                   {"length", r.method.length ? json(*r.method.length) : json(nullptr)},
                   {"diff_time_pct", opt(r.diff_time_pct)},
                   {"diff_stp_pct", opt(r.diff_steps_pct)}});
  }
  return out;
}

json to_json(const std::array<CalibrationSuggestion, kActionCount>& suggestions) {
  json out = json::array();
  for (const auto& s : suggestions) {
    json row = {{"action", to_string(s.action)},
                {"samples", s.samples},
                {"mean_ms", opt(s.mean_ms)},
                {"suggested_delta_ms", opt(s.suggested_delta_ms)}};
    if (!s.note.empty()) row["note"] = s.note;
    out.push_back(std::move(row));
  }
  return out;
}

void write_action_table(const std::array<ActionStats, kActionCount>& stats, std::ostream& out) {
  out << std::left << std::setw(14) << "input action" << std::right << std::setw(16)
      << "avg. time [ms]" << std::setw(8) << "valid" << std::setw(9) << "invalid" << std::setw(16)
      << "avg. time SD" << "  note\n";
  for (const auto& s : stats) {
    out << std::left << std::setw(14) << to_string(s.action) << std::right << std::setw(16)
        << opt_fixed(s.mean_ms, 0) << std::setw(8) << s.valid << std::setw(9) << s.invalid
        << std::setw(16) << opt_fixed(s.sd_ms, 2) << "  " << s.note << '\n';
  }
}

void write_aggregate_table(std::span<const ScenarioAggregate> aggregates, std::ostream& out) {
  out << std::left << std::setw(10) << "ID of t" << std::right << std::setw(14) << "avg_time"
      << std::setw(14) << "avg_time SD" << std::setw(10) << "avg_stp" << std::setw(12)
      << "avg_stp SD" << std::setw(8) << "users" << '\n';
  for (const auto& a : aggregates) {
    out << std::left << std::setw(10) << a.scenario << std::right << std::setw(14)
        << fixed(a.avg_time_ms, 0) << std::setw(14) << fixed(a.avg_time_sd, 2) << std::setw(10)
        << fixed(a.avg_steps, 2) << std::setw(12) << fixed(a.avg_steps_sd, 2) << std::setw(8)
        << a.participants << '\n';
  }
}

void write_comparison_table(std::span<const ComparisonRow> rows, std::ostream& out) {
  out << std::left << std::setw(10) << "ID of t" << std::right << std::setw(12) << "avg_time"
      << std::setw(12) << "SD" << std::setw(9) << "avg_stp" << std::setw(9) << "SD"
      << std::setw(12) << "E(p(t),C)" << std::setw(8) << "|p(t)|" << std::setw(12) << "DIFF_time"
      << std::setw(11) << "DIFF_stp" << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(10) << r.users.scenario << std::right << std::setw(12)
        << fixed(r.users.avg_time_ms, 0) << std::setw(12) << fixed(r.users.avg_time_sd, 2)
        << std::setw(9) << fixed(r.users.avg_steps, 2) << std::setw(9)
        << fixed(r.users.avg_steps_sd, 2) << std::setw(12)
        << (r.method.effort_ms ? format_ms(*r.method.effort_ms) : std::string("-"))
        << std::setw(8) << (r.method.length ? std::to_string(*r.method.length) : "-")
        << std::setw(12) << opt_fixed(r.diff_time_pct, 2, "%") << std::setw(11)
        << opt_fixed(r.diff_steps_pct, 2, "%") << '\n';
  }
}

void write_calibration_table(const std::array<CalibrationSuggestion, kActionCount>& s,
                             std::ostream& out) {
  out << std::left << std::setw(8) << "action" << std::right << std::setw(9) << "samples"
      << std::setw(12) << "mean [ms]" << std::setw(16) << "suggested delta" << "  note\n";
  for (const auto& row : s) {
    out << std::left << std::setw(8) << to_string(row.action) << std::right << std::setw(9)
        << row.samples << std::setw(12) << opt_fixed(row.mean_ms, 1) << std::setw(16)
        << opt_fixed(row.suggested_delta_ms, 0) << "  " << row.note << '\n';
  }
}

}  // namespace tvflow::logs
