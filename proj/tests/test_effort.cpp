#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "tvflow/effort.hpp"
#include "tvflow/error.hpp"

using namespace tvflow;

namespace {

const char* kTable1Delta =
    "action,delta_ms,uc\nLEFT,800,1\nRIGHT,800,1\nUP,800,1\nDOWN,800,1\nOK,2500,1\nBACK,1500,1\n";
const char* kUnitFactors = "factor,value\ndevice,1\nenvironment,1\n";

Context load(const std::string& delta, const std::string& factors, std::string name = "custom") {
  std::istringstream d(delta), f(factors);
  return load_context(d, f, std::move(name));
}

std::vector<Action> repeat(std::initializer_list<std::pair<Action, int>> parts) {
  std::vector<Action> out;
  for (auto [a, n] : parts) out.insert(out.end(), n, a);
  return out;
}

}  // namespace

TEST(EdgeEffort, OkUnderInitialContext) {
  const Edge ok{"e", "a", "b", Action::Ok};
  EXPECT_EQ(edge_effort(ok, builtin_context("initial")).ms(), 2500.0);
}

TEST(EdgeEffort, ZeroCapabilityIsInfeasible) {
  Context c = builtin_context("initial");
  c.uc[index_of(Action::Up)] = 0;
  EXPECT_FALSE(action_effort(Action::Up, c).feasible());
  EXPECT_TRUE(action_effort(Action::Down, c).feasible());
}

TEST(EdgeEffort, HalfCapabilityDoubles) {
  Context c = builtin_context("adjusted");
  c.uc[index_of(Action::Right)] = 0.5;
  EXPECT_EQ(action_effort(Action::Right, c).ms(), 2000.0);
}

TEST(EdgeEffort, ZeroFactorsAreInfeasible) {
  Context c = builtin_context("initial");
  c.device_factor = 0;
  for (Action a : kAllActions) EXPECT_FALSE(action_effort(a, c).feasible());
  c.device_factor = 1;
  c.env_factor = 0;
  EXPECT_FALSE(action_effort(Action::Ok, c).feasible());
  c.env_factor = 0.5;
  EXPECT_EQ(action_effort(Action::Ok, c).ms(), 5000.0);
}

TEST(EffortValue, InfeasibleAbsorbsAndOrdersLast) {
  const Effort inf = Effort::infeasible();
  EXPECT_FALSE((Effort(5) + inf).feasible());
  EXPECT_FALSE((inf + Effort(5)).feasible());
  EXPECT_LT(Effort(1e300), inf);
  EXPECT_TRUE(nearly_equal(inf, inf));
  EXPECT_FALSE(nearly_equal(inf, Effort(1e300)));
  EXPECT_TRUE(nearly_equal(Effort(1.0), Effort(1.0 + 1e-12)));
  EXPECT_FALSE(nearly_equal(Effort(1.0), Effort(1.0001)));
}

TEST(PathEffort, EmptyIsZero) {
  EXPECT_EQ(path_effort(std::span<const Action>{}, builtin_context("initial")).ms(), 0.0);
}

TEST(PathEffort, ReferenceCompositions) {
  const Context ini = builtin_context("initial");
  const Context adj = builtin_context("adjusted");
  const auto s2 = repeat({{Action::Right, 21}, {Action::Down, 1}, {Action::Ok, 1}});
  const auto s3 = repeat({{Action::Left, 6}, {Action::Ok, 1}});
  const auto s4 = repeat({{Action::Right, 20}, {Action::Ok, 21}, {Action::Back, 19}});
  EXPECT_EQ(path_effort(s2, ini).ms(), 20100.0);
  EXPECT_EQ(path_effort(s3, ini).ms(), 7300.0);
  EXPECT_EQ(path_effort(s4, ini).ms(), 97000.0);
  EXPECT_EQ(path_effort(s2, adj).ms(), 24250.0);
  EXPECT_EQ(path_effort(s3, adj).ms(), 8000.0);
  EXPECT_EQ(path_effort(s4, adj).ms(), 85275.0);
}

TEST(PathEffort, CompositionsAreUniquelyDetermined) {
  // Integer solutions of the two effort equations plus the length.
  EXPECT_EQ(oracle::solve_composition(23, 20100, 24250),
            (std::vector<oracle::Composition>{{21, 1, 1, 0}}));
  EXPECT_EQ(oracle::solve_composition(7, 7300, 8000),
            (std::vector<oracle::Composition>{{6, 0, 1, 0}}));
  EXPECT_EQ(oracle::solve_composition(60, 97000, 85275),
            (std::vector<oracle::Composition>{{20, 0, 21, 19}}));
}

TEST(PathEffort, EdgeOverloadMatchesActions) {
  const std::vector<Edge> edges = {{"1", "a", "b", Action::Left}, {"2", "b", "c", Action::Ok}};
  const std::vector<Action> actions = {Action::Left, Action::Ok};
  const Context c = builtin_context("adjusted");
  EXPECT_EQ(path_effort(edges, c), path_effort(actions, c));
}

TEST(BuiltinContext, Values) {
  const Context ini = builtin_context("initial");
  EXPECT_EQ(ini.delta(Action::Ok), 2500.0);
  EXPECT_EQ(ini.delta(Action::Back), 1500.0);
  for (Action a : kDirections) EXPECT_EQ(ini.delta(a), 800.0);
  const Context adj = builtin_context("adjusted");
  EXPECT_EQ(adj.delta(Action::Back), 1225.0);
  EXPECT_EQ(adj.delta(Action::Down), 1250.0);
  EXPECT_EQ(adj.delta(Action::Ok), 2000.0);
  EXPECT_EQ(adj.delta(Action::Up), 1000.0);
  for (const Context* c : {&ini, &adj}) {
    for (Action a : kAllActions) EXPECT_EQ(c->capability(a), 1.0);
    EXPECT_EQ(c->device_factor, 1.0);
    EXPECT_EQ(c->env_factor, 1.0);
  }
  const Context alias = builtin_context("baseline-Cs");
  EXPECT_EQ(alias.delta_ms, ini.delta_ms);
  EXPECT_EQ(alias.uc, ini.uc);
  EXPECT_THROW(builtin_context("nonsense"), UnknownIdError);
}

TEST(LoadContext, Table1CsvEqualsBuiltin) {
  EXPECT_EQ(load(kTable1Delta, kUnitFactors, "initial"), builtin_context("initial"));
}

TEST(LoadContext, ZeroUpCapability) {
  std::string delta = kTable1Delta;
  delta.replace(delta.find("UP,800,1"), 8, "UP,800,0");
  const Context c = load(delta, kUnitFactors);
  EXPECT_EQ(c.capability(Action::Up), 0.0);
  EXPECT_FALSE(action_effort(Action::Up, c).feasible());
}

TEST(LoadContext, Errors) {
  std::string missing_back = kTable1Delta;
  missing_back.erase(missing_back.find("BACK"));
  EXPECT_THROW(load(missing_back, kUnitFactors), ParseError);

  std::string bad_uc = kTable1Delta;
  bad_uc.replace(bad_uc.find("OK,2500,1"), 9, "OK,2500,2");
  EXPECT_THROW(load(bad_uc, kUnitFactors), ParseError);

  EXPECT_THROW(load(std::string(kTable1Delta) + "OK,10,1\n", kUnitFactors), ParseError);
  EXPECT_THROW(load("act,delta,uc\n", kUnitFactors), ParseError);
  EXPECT_THROW(load(kTable1Delta, "factor,value\ndevice,1\n"), ParseError);
  EXPECT_THROW(load(kTable1Delta, "factor,value\ndevice,-1\nenvironment,1\n"), ParseError);

  std::string zero_delta = kTable1Delta;
  zero_delta.replace(zero_delta.find("LEFT,800"), 8, "LEFT,0  ");
  EXPECT_THROW(load(zero_delta, kUnitFactors), ParseError);
}

TEST(LoadContext, ErrorNamesTheRow) {
  std::string bad = kTable1Delta;
  bad.replace(bad.find("DOWN,800"), 8, "DOWN,abc");
  try {
    load(bad, kUnitFactors);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(e.where().find("5"), std::string::npos) << e.where();
  }
}

TEST(LoadContext, CsvRoundTrip) {
  Context c = builtin_context("adjusted");
  c.uc[index_of(Action::Back)] = 0.25;
  c.device_factor = 0.8;
  std::ostringstream d, f;
  write_delta_csv(c, d);
  write_factors_csv(c, f);
  EXPECT_EQ(load(d.str(), f.str(), "adjusted"), c);
}

TEST(ValidateContext, RejectsOutOfRange) {
  Context c = builtin_context("initial");
  c.uc[0] = 1.5;
  EXPECT_THROW(validate_context(c), ValidationError);
  c = builtin_context("initial");
  c.delta_ms[2] = -1;
  EXPECT_THROW(validate_context(c), ValidationError);
  c = builtin_context("initial");
  c.env_factor = -0.1;
  EXPECT_THROW(validate_context(c), ValidationError);
  EXPECT_NO_THROW(validate_context(builtin_context("adjusted")));
}

// ---------------------------------------------------------------------------
// Properties

namespace {

std::vector<Action> random_actions(std::mt19937_64& rng, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len), act(0, 5);
  std::vector<Action> out(static_cast<std::size_t>(len(rng)));
  for (auto& a : out) a = kAllActions[static_cast<std::size_t>(act(rng))];
  return out;
}

}  // namespace

TEST(EffortProperty, LoweringCapabilityNeverLowersEffort) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 500; ++i) {
    Context c = oracle::random_context(rng);
    c.device_factor = std::max(c.device_factor, 0.5);
    const Action a = kAllActions[rng() % 6];
    if (c.capability(a) == 0) continue;
    const Effort before = action_effort(a, c);
    c.uc[index_of(a)] *= std::uniform_real_distribution<double>(0.01, 1.0)(rng);
    EXPECT_GE(action_effort(a, c), before);
  }
}

TEST(EffortProperty, ScalingDeltaScalesPathEffort) {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 500; ++i) {
    const Context c = oracle::random_context(rng);
    const double k = std::uniform_real_distribution<double>(0.1, 10.0)(rng);
    Context scaled = c;
    for (double& d : scaled.delta_ms) d *= k;
    const auto p = random_actions(rng, 40);
    const Effort e = path_effort(p, c);
    const Effort es = path_effort(p, scaled);
    ASSERT_EQ(e.feasible(), es.feasible());
    if (e.feasible()) ASSERT_TRUE(nearly_equal(es, Effort(e.ms() * k))) << e.ms() << " " << es.ms();
  }
}

TEST(EffortProperty, ConcatenationIsAdditive) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 500; ++i) {
    const Context c = oracle::random_context(rng);
    auto p1 = random_actions(rng, 20);
    const auto p2 = random_actions(rng, 20);
    const Effort sum = path_effort(p1, c) + path_effort(p2, c);
    p1.insert(p1.end(), p2.begin(), p2.end());
    const Effort joined = path_effort(p1, c);
    ASSERT_EQ(joined.feasible(), sum.feasible());
    if (sum.feasible()) ASSERT_TRUE(nearly_equal(joined, sum));
  }
}

TEST(EffortProperty, InitialContextIsSumOfTableValues) {
  std::mt19937_64 rng(24);
  const Context ini = builtin_context("initial");
  for (int i = 0; i < 500; ++i) {
    const auto p = random_actions(rng, 60);
    long long expected = 0;
    for (Action a : p) expected += a == Action::Ok ? 2500 : a == Action::Back ? 1500 : 800;
    ASSERT_EQ(path_effort(p, ini).ms(), static_cast<double>(expected));
  }
}

TEST(EffortProperty, MatchesRawFormula) {
  std::mt19937_64 rng(25);
  for (int i = 0; i < 500; ++i) {
    const Context c = oracle::random_context(rng);
    for (Action a : kAllActions) {
      const double want = oracle::action_cost(a, c);
      const Effort got = action_effort(a, c);
      if (std::isinf(want)) {
        ASSERT_FALSE(got.feasible());
      } else {
        ASSERT_TRUE(nearly_equal(got, Effort(want)));
      }
    }
  }
}
