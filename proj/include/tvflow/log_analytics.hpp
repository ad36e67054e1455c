#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tvflow/action.hpp"
#include "tvflow/verifier.hpp"

namespace tvflow::logs {

/// One recorded button press of a test participant.
struct LogStep {
  std::string participant;
  std::string scenario;
  Action action = Action::Ok;
  double duration_ms = 0;
  bool valid = true;  // false: the app answered the press with no transition

  friend bool operator==(const LogStep&, const LogStep&) = default;
};

/// CSV with header `participant,scenario,action,duration_ms,valid`. Throws
/// ParseError naming the 1-based line of the first malformed row.
std::vector<LogStep> load_logs(std::istream& in);
std::vector<LogStep> load_logs_file(const std::string& path);
void write_logs(std::span<const LogStep> steps, std::ostream& out);

inline constexpr double kDefaultExclusionMs = 10000.0;

struct Exclusion {
  std::vector<LogStep> kept;
  std::vector<LogStep> excluded;
};

/// Drops steps strictly longer than `threshold_ms`; a step of exactly the
/// threshold is kept. Input order is preserved in both halves.
Exclusion exclude_outliers(std::span<const LogStep> steps,
                           double threshold_ms = kDefaultExclusionMs);

struct ActionStats {
  Action action = Action::Ok;
  std::size_t valid = 0;
  std::size_t invalid = 0;
  std::optional<double> mean_ms;  // over valid and invalid steps
  std::optional<double> sd_ms;    // sample SD (n - 1); 0 for a single step
  std::string note;               // "insufficient data", "single sample"

  std::size_t count() const noexcept { return valid + invalid; }
};

/// One row per action, in LEFT, RIGHT, UP, DOWN, OK, BACK order.
std::array<ActionStats, kActionCount> action_stats(std::span<const LogStep> steps);

/// Per-scenario user-side aggregates. A participant's time for a scenario is
/// the sum of their step durations; their step count is the number of rows.
struct ScenarioAggregate {
  std::string scenario;
  std::size_t participants = 0;
  double avg_time_ms = 0;
  double avg_time_sd = 0;
  double avg_steps = 0;
  double avg_steps_sd = 0;
};

/// Sorted by scenario id (numeric ids compare numerically).
std::vector<ScenarioAggregate> scenario_aggregates(std::span<const LogStep> steps);

/// Reads aggregates in the layout written by to_json, either as a bare array
/// or under "scenarios". Lets precomputed aggregates feed compare.
std::vector<ScenarioAggregate> aggregates_from_json(const nlohmann::json& doc);

/// What the automated analysis produced for a scenario.
struct MethodResult {
  std::string scenario;
  std::optional<double> effort_ms;  // empty when infeasible or no path
  std::optional<std::size_t> length;
};

std::vector<MethodResult> method_results(const SuiteResult& suite);
/// Reads the report document written by `verify` (object with "reports").
std::vector<MethodResult> method_results_from_json(const nlohmann::json& doc);

struct ComparisonRow {
  ScenarioAggregate users;
  MethodResult method;
  std::optional<double> diff_time_pct;  // E / avg_time * 100, 2 decimals half-up
  std::optional<double> diff_steps_pct; // |p| / avg_steps * 100, 2 decimals half-up
};

/// Joins aggregates to method results on scenario id. Every aggregate needs a
/// matching method result; throws UnknownIdError otherwise.
std::vector<ComparisonRow> compare(std::span<const ScenarioAggregate> users,
                                   std::span<const MethodResult> method);

/// Percentage ratio rounded half-up to two decimals.
double percent_2dp(double numerator, double denominator);

struct CalibrationSuggestion {
  Action action = Action::Ok;
  std::size_t samples = 0;              // valid steps considered
  std::optional<double> mean_ms;
  std::optional<double> suggested_delta_ms;  // mean rounded to nearest 25 ms
  std::string note;
};

inline constexpr std::size_t kDefaultMinSamples = 30;

/// Suggested default efforts from valid-step means. Advisory only; actions
/// with fewer than `min_samples` valid steps get no suggestion.
std::array<CalibrationSuggestion, kActionCount> calibrate(std::span<const LogStep> steps,
                                                          std::size_t min_samples = kDefaultMinSamples);

/// Half-up rounding to a multiple of `step`.
double round_to_multiple(double value, double step);

nlohmann::json to_json(const std::array<ActionStats, kActionCount>& stats);
nlohmann::json to_json(std::span<const ScenarioAggregate> aggregates);
nlohmann::json to_json(std::span<const ComparisonRow> rows);
nlohmann::json to_json(const std::array<CalibrationSuggestion, kActionCount>& suggestions);

void write_action_table(const std::array<ActionStats, kActionCount>& stats, std::ostream& out);
void write_aggregate_table(std::span<const ScenarioAggregate> aggregates, std::ostream& out);
void write_comparison_table(std::span<const ComparisonRow> rows, std::ostream& out);
void write_calibration_table(const std::array<CalibrationSuggestion, kActionCount>& s,
                             std::ostream& out);

}  // namespace tvflow::logs
