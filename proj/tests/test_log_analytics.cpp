#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tvflow/error.hpp"
#include "tvflow/log_analytics.hpp"

using namespace tvflow;
using namespace tvflow::logs;

namespace {

std::vector<LogStep> parse(const std::string& text) {
  std::istringstream in(text);
  return load_logs(in);
}

const std::string kHeader = "participant,scenario,action,duration_ms,valid\n";

LogStep step(Action a, double ms, bool valid = true, std::string who = "p01",
             std::string scenario = "2") {
  return {std::move(who), std::move(scenario), a, ms, valid};
}

// n values around `mean` whose average is exactly `mean`.
void add_with_mean(std::vector<LogStep>& out, Action a, int n, double mean, double spread) {
  for (int i = 0; i < n; ++i) {
    const double offset = (n % 2 == 1 && i == n - 1) ? 0 : (i % 2 ? spread : -spread);
    out.push_back(step(a, mean + offset));
  }
}

std::vector<ScenarioAggregate> group(const std::string& name) {
  return aggregates_from_json(fixture::experiment_aggregates()["groups"][name]);
}

std::vector<MethodResult> method_for(const char* context) {
  const auto suite = verify_suite(fixture::movies_model(), fixture::movies_scenarios(),
                                  builtin_context(context), builtin_thresholds(context));
  return method_results(suite);
}

}  // namespace

TEST(LoadLogs, ParsesRows) {
  const auto steps = parse(kHeader + "p01,2,RIGHT,812,true\np02,3,BACK,1500.5,false\n");
  ASSERT_EQ(steps.size(), 2u);
  EXPECT_EQ(steps[0], step(Action::Right, 812));
  EXPECT_EQ(steps[1], step(Action::Back, 1500.5, false, "p02", "3"));
  EXPECT_TRUE(parse(kHeader).empty());
}

TEST(LoadLogs, RejectsMalformedRows) {
  auto line_of = [](const std::string& text) -> std::string {
    try {
      parse(text);
    } catch (const ParseError& e) {
      return e.what();
    }
    return "no error";
  };
  EXPECT_NE(line_of(kHeader + "p01,2,RIGHT,812,true\np01,2,RIGHT,-5,true\n").find("line 3"),
            std::string::npos);
  EXPECT_NE(line_of(kHeader + "p01,2,RIGHT,0,true\n").find("line 2"), std::string::npos);
  EXPECT_THROW(parse(kHeader + "p01,2,MENU,100,true\n"), ParseError);
  EXPECT_THROW(parse(kHeader + "p01,2,OK,abc,true\n"), ParseError);
  EXPECT_THROW(parse(kHeader + "p01,2,OK,100,yes\n"), ParseError);
  EXPECT_THROW(parse(kHeader + "p01,2,OK,100\n"), ParseError);
  EXPECT_THROW(parse(kHeader + ",2,OK,100,true\n"), ParseError);
  EXPECT_THROW(parse("who,what,action,duration_ms,valid\n"), ParseError);
  EXPECT_THROW(parse(""), ParseError);
}

TEST(LoadLogs, WriteRoundTrip) {
  const auto steps = oracle::synthetic_corpus(oracle::group_b_shape());
  std::ostringstream out;
  write_logs(steps, out);
  EXPECT_EQ(parse(out.str()), steps);
}

TEST(Exclusion, GroupShapedCorpora) {
  const auto a = oracle::synthetic_corpus(oracle::group_a_shape());
  ASSERT_EQ(a.size(), 2696u);
  const auto ex = exclude_outliers(a);
  EXPECT_EQ(ex.kept.size(), 2647u);
  EXPECT_EQ(ex.excluded.size(), 49u);
  EXPECT_EQ(std::count_if(ex.kept.begin(), ex.kept.end(),
                          [](const LogStep& s) { return s.duration_ms == 10000; }),
            1);

  const auto b = oracle::synthetic_corpus(oracle::group_b_shape());
  ASSERT_EQ(b.size(), 2645u);
  EXPECT_EQ(exclude_outliers(b).kept.size(), 2586u);
}

TEST(Exclusion, BoundaryIsStrict) {
  const std::vector<LogStep> steps = {step(Action::Ok, 10000), step(Action::Ok, 10000.001),
                                      step(Action::Ok, 9999.999)};
  const auto ex = exclude_outliers(steps);
  ASSERT_EQ(ex.kept.size(), 2u);
  EXPECT_EQ(ex.kept[0].duration_ms, 10000);
  ASSERT_EQ(ex.excluded.size(), 1u);
  EXPECT_TRUE(exclude_outliers(std::vector<LogStep>{step(Action::Ok, 5)}).excluded.empty());
  EXPECT_EQ(exclude_outliers(steps, 9999.999).kept.size(), 1u);
}

TEST(ActionStats, TwoPointSampleSd) {
  const std::vector<LogStep> steps = {step(Action::Right, 900), step(Action::Right, 1100)};
  const auto stats = action_stats(steps);
  const auto& right = stats[index_of(Action::Right)];
  EXPECT_EQ(right.valid, 2u);
  EXPECT_EQ(right.mean_ms, 1000.0);
  EXPECT_NEAR(*right.sd_ms, 141.42, 0.01);
  EXPECT_NEAR(*right.sd_ms, oracle::sample_sd({900, 1100}), 1e-9);
}

TEST(ActionStats, EmptyAndSingleRows) {
  const auto stats = action_stats(std::vector<LogStep>{step(Action::Down, 700, false)});
  const auto& up = stats[index_of(Action::Up)];
  EXPECT_EQ(up.count(), 0u);
  EXPECT_FALSE(up.mean_ms);
  EXPECT_EQ(up.note, "insufficient data");
  const auto& down = stats[index_of(Action::Down)];
  EXPECT_EQ(down.invalid, 1u);
  EXPECT_EQ(down.mean_ms, 700.0);
  EXPECT_EQ(down.sd_ms, 0.0);
  EXPECT_EQ(down.note, "single sample");
  for (std::size_t i = 0; i < kActionCount; ++i) EXPECT_EQ(stats[i].action, kAllActions[i]);
}

TEST(ActionStats, CountsMatchCorpusShape) {
  const auto shape = oracle::group_a_shape();
  const auto steps = oracle::synthetic_corpus(shape);
  const auto stats = action_stats(steps);
  std::size_t total = 0;
  for (Action a : kAllActions) {
    EXPECT_EQ(stats[index_of(a)].valid, static_cast<std::size_t>(shape.counts[index_of(a)][0]));
    EXPECT_EQ(stats[index_of(a)].invalid, static_cast<std::size_t>(shape.counts[index_of(a)][1]));
    total += stats[index_of(a)].count();
  }
  EXPECT_EQ(total, 2696u);
  // Means include invalid presses.
  std::vector<double> ok;
  for (const auto& s : steps) {
    if (s.action == Action::Ok) ok.push_back(s.duration_ms);
  }
  EXPECT_NEAR(*stats[index_of(Action::Ok)].sd_ms, oracle::sample_sd(ok), 1e-6);
}

TEST(ScenarioAggregates, PerParticipantSums) {
  const std::vector<LogStep> steps = {
      step(Action::Right, 1000, true, "p1", "2"), step(Action::Ok, 2000, true, "p1", "2"),
      step(Action::Right, 3000, false, "p2", "2"), step(Action::Ok, 500, true, "p1", "10")};
  const auto agg = scenario_aggregates(steps);
  ASSERT_EQ(agg.size(), 2u);
  EXPECT_EQ(agg[0].scenario, "2");
  EXPECT_EQ(agg[0].participants, 2u);
  EXPECT_EQ(agg[0].avg_time_ms, 3000);
  EXPECT_EQ(agg[0].avg_time_sd, 0);
  EXPECT_EQ(agg[0].avg_steps, 1.5);
  EXPECT_NEAR(agg[0].avg_steps_sd, std::sqrt(0.5), 1e-12);
  EXPECT_EQ(agg[1].scenario, "10");
  EXPECT_EQ(agg[1].participants, 1u);
}

TEST(ScenarioAggregates, JsonRoundTrip) {
  const auto agg = scenario_aggregates(oracle::synthetic_corpus(oracle::group_a_shape()));
  ASSERT_EQ(agg.size(), 4u);
  const auto again = aggregates_from_json(to_json(agg));
  EXPECT_EQ(to_json(again), to_json(agg));
  EXPECT_THROW(aggregates_from_json(nlohmann::json::array({{{"scenario", "2"}}})), ParseError);
  EXPECT_THROW(aggregates_from_json(
                   nlohmann::json::array({{{"scenario", "2"}, {"avg_time_ms", 0}, {"avg_stp", 3}}})),
               ParseError);
}

TEST(Compare, PercentRounding) {
  EXPECT_EQ(percent_2dp(20100, 28090), 71.56);
  EXPECT_EQ(percent_2dp(23, 27), 85.19);
  EXPECT_EQ(percent_2dp(85275, 85546), 99.68);
  EXPECT_EQ(percent_2dp(60, 60), 100.00);
  EXPECT_EQ(percent_2dp(1, 8), 12.5);
  EXPECT_EQ(percent_2dp(1.00005, 1), 100.01);  // half-up at the third decimal
}

TEST(Compare, ReproducesReferenceDifferences) {
  const auto doc = fixture::experiment_aggregates();
  for (const auto& expected : doc["expected"]) {
    const auto rows =
        compare(group(expected["group"]), method_for(expected["context"].get<std::string>().c_str()));
    ASSERT_EQ(rows.size(), 3u);
    for (const auto& row : rows) {
      const std::string id = row.users.scenario;
      SCOPED_TRACE(expected["group"].get<std::string>() + " " +
                   expected["context"].get<std::string>() + " scenario " + id);
      ASSERT_TRUE(row.diff_time_pct && row.diff_steps_pct);
      EXPECT_NEAR(*row.diff_time_pct, expected["diff_time_pct"][id].get<double>(), 0.01);
      EXPECT_NEAR(*row.diff_steps_pct, expected["diff_steps_pct"][id].get<double>(), 0.01);
    }
  }
}

TEST(Compare, MismatchesAndMissingEfforts) {
  const auto users = group("A");
  std::vector<MethodResult> partial = {{"2", 20100.0, 23}, {"3", 7300.0, 7}};
  EXPECT_THROW(compare(users, partial), UnknownIdError);
  partial.push_back({"4", std::nullopt, std::nullopt});
  const auto rows = compare(users, partial);
  EXPECT_FALSE(rows[2].diff_time_pct);
  EXPECT_FALSE(rows[2].diff_steps_pct);
  const auto j = to_json(rows);
  EXPECT_TRUE(j[2]["diff_time_pct"].is_null());
}

TEST(Compare, ReadsReportDocuments) {
  const auto suite = verify_suite(fixture::movies_model(), fixture::movies_scenarios(),
                                  builtin_context("initial"), builtin_thresholds("initial"));
  const auto from_doc = method_results_from_json(to_json(suite));
  const auto direct = method_results(suite);
  ASSERT_EQ(from_doc.size(), direct.size());
  for (std::size_t i = 0; i < direct.size(); ++i) {
    EXPECT_EQ(from_doc[i].scenario, direct[i].scenario);
    EXPECT_EQ(from_doc[i].effort_ms, direct[i].effort_ms);
    EXPECT_EQ(from_doc[i].length, direct[i].length);
  }
  const nlohmann::json infeasible = {
      {"reports", {{{"scenario", "2"}, {"path", {{"effort_ms", "INFEASIBLE"}, {"length", 4}}}}}}};
  EXPECT_FALSE(method_results_from_json(infeasible)[0].effort_ms);
  EXPECT_THROW(method_results_from_json({{"reports", 3}}), ParseError);
}

TEST(Calibrate, SuggestsRoundedValidMeans) {
  std::vector<LogStep> steps;
  add_with_mean(steps, Action::Right, 1540, 971, 150);
  for (int i = 0; i < 11; ++i) steps.push_back(step(Action::Right, 4000, false));
  // pooled DOWN from both groups: 36 near 1173 and 30 near 1335
  add_with_mean(steps, Action::Down, 36, 1173, 400);
  add_with_mean(steps, Action::Down, 30, 1335, 300);
  add_with_mean(steps, Action::Up, 4, 687, 100);

  const auto s = calibrate(steps);
  const auto& right = s[index_of(Action::Right)];
  EXPECT_EQ(right.samples, 1540u);
  EXPECT_NEAR(*right.mean_ms, 971, 1e-9);
  EXPECT_EQ(right.suggested_delta_ms, 975.0);
  const auto& down = s[index_of(Action::Down)];
  EXPECT_EQ(down.samples, 66u);
  EXPECT_NEAR(*down.mean_ms, 82278.0 / 66, 1e-9);
  EXPECT_EQ(down.suggested_delta_ms, 1250.0);
  const auto& up = s[index_of(Action::Up)];
  EXPECT_EQ(up.samples, 4u);
  EXPECT_FALSE(up.suggested_delta_ms);
  EXPECT_EQ(up.note, "insufficient data");
  EXPECT_EQ(calibrate(steps, 4)[index_of(Action::Up)].suggested_delta_ms, 675.0);
  EXPECT_FALSE(s[index_of(Action::Ok)].suggested_delta_ms);
}

TEST(Calibrate, RoundToMultiple) {
  EXPECT_EQ(round_to_multiple(971, 25), 975);
  EXPECT_EQ(round_to_multiple(962.5, 25), 975);
  EXPECT_EQ(round_to_multiple(962.4, 25), 950);
  EXPECT_EQ(round_to_multiple(1246.6, 25), 1250);
  EXPECT_EQ(round_to_multiple(12, 25), 0);
}

TEST(Tables, PlainText) {
  const auto steps = oracle::synthetic_corpus(oracle::group_a_shape());
  std::ostringstream os;
  write_action_table(action_stats(std::vector<LogStep>{step(Action::Ok, 1000)}), os);
  EXPECT_NE(os.str().find("insufficient data"), std::string::npos);
  EXPECT_NE(os.str().find("single sample"), std::string::npos);
  std::ostringstream cmp;
  write_comparison_table(compare(group("A"), method_for("initial")), cmp);
  EXPECT_NE(cmp.str().find("71.56"), std::string::npos);
  EXPECT_NE(cmp.str().find("105.98"), std::string::npos);
  std::ostringstream cal;
  write_calibration_table(calibrate(steps), cal);
  EXPECT_NE(cal.str().find("RIGHT"), std::string::npos);
}

// ---------------------------------------------------------------------------
// Properties

TEST(LogProperty, ExclusionIsIdempotent) {
  std::mt19937_64 rng(71);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto shape = oracle::group_a_shape();
    shape.seed = seed;
    const auto steps = oracle::synthetic_corpus(shape);
    const double threshold = 1000.0 + static_cast<double>(rng() % 20000);
    const auto once = exclude_outliers(steps, threshold);
    const auto twice = exclude_outliers(once.kept, threshold);
    ASSERT_EQ(twice.kept, once.kept);
    ASSERT_TRUE(twice.excluded.empty());
  }
}

TEST(LogProperty, StatsIgnoreRowOrder) {
  std::mt19937_64 rng(72);
  auto steps = oracle::synthetic_corpus(oracle::group_b_shape());
  const auto stats = to_json(action_stats(steps)).dump();
  const auto agg = to_json(scenario_aggregates(steps)).dump();
  const auto cal = to_json(calibrate(steps)).dump();
  for (int i = 0; i < 10; ++i) {
    std::shuffle(steps.begin(), steps.end(), rng);
    ASSERT_EQ(to_json(action_stats(steps)).dump(), stats);
    ASSERT_EQ(to_json(scenario_aggregates(steps)).dump(), agg);
    ASSERT_EQ(to_json(calibrate(steps)).dump(), cal);
  }
}

TEST(LogProperty, CalibrationScalesWithDurations) {
  const auto steps = exclude_outliers(oracle::synthetic_corpus(oracle::group_a_shape())).kept;
  const auto base = calibrate(steps);
  for (double k : {0.5, 1.25, 3.0}) {
    auto scaled = steps;
    for (auto& s : scaled) s.duration_ms *= k;
    const auto s = calibrate(scaled);
    for (Action a : kAllActions) {
      const auto& b = base[index_of(a)];
      const auto& c = s[index_of(a)];
      ASSERT_EQ(b.mean_ms.has_value(), c.mean_ms.has_value());
      if (b.mean_ms) EXPECT_NEAR(*c.mean_ms, *b.mean_ms * k, 1e-9 * *c.mean_ms);
      ASSERT_EQ(b.suggested_delta_ms.has_value(), c.suggested_delta_ms.has_value());
      if (c.suggested_delta_ms) {
        EXPECT_EQ(*c.suggested_delta_ms, round_to_multiple(*c.mean_ms, 25));
      }
    }
  }
}
