#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tvflow/error.hpp"
#include "tvflow/verifier.hpp"

using namespace tvflow;

namespace {

InteractionModel parse(const std::string& text) {
  std::istringstream in(text);
  return load_model(in);
}

std::vector<std::string> codes(const std::vector<Violation>& vs) {
  std::vector<std::string> out;
  for (const auto& v : vs) out.push_back(v.code);
  return out;
}

bool has_code(const std::vector<Violation>& vs, const std::string& code) {
  const auto c = codes(vs);
  return std::find(c.begin(), c.end(), code) != c.end();
}

ModelDocument two_nodes() {
  ModelDocument d;
  d.nodes = {{"a", NodeKind::Screen, "A"}, {"b", NodeKind::Screen, "B"}};
  d.edges = {{"ab", "a", "b", Action::Right}};
  d.start = "a";
  return d;
}

}  // namespace

TEST(ActionKind, ExactlySixRoundTrip) {
  EXPECT_EQ(kAllActions.size(), 6u);
  std::set<std::string> names;
  for (Action a : kAllActions) {
    names.insert(std::string(to_string(a)));
    EXPECT_EQ(parse_action(to_string(a)), a);
  }
  EXPECT_EQ(names, (std::set<std::string>{"LEFT", "RIGHT", "UP", "DOWN", "OK", "BACK"}));
  EXPECT_FALSE(parse_action("left"));
  EXPECT_FALSE(parse_action("MENU"));
}

TEST(LoadModel, SingleNodeIsEndNode) {
  const auto m = parse(R"({"nodes":[{"id":"home","kind":"screen","label":"Home"}],
                           "edges":[],"start":"home"})");
  EXPECT_EQ(m.node_count(), 1u);
  EXPECT_EQ(m.end_nodes(), std::vector<std::string>{"home"});
  EXPECT_TRUE(m.is_end_node("home"));
}

TEST(LoadModel, DanglingSourceIsValidationError) {
  try {
    parse(R"({"nodes":[{"id":"a","kind":"screen"}],
              "edges":[{"id":"x","source":"ghost","target":"a","action":"OK"}],"start":"a"})");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("dangling source"), std::string::npos) << e.what();
  }
}

TEST(LoadModel, ParseErrorCarriesLineAndColumn) {
  try {
    parse("{\n  \"nodes\": [\n    {\"id\": \"a\",,}\n  ]\n}");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(e.where().find("line 3"), std::string::npos) << e.where();
  }
}

TEST(LoadModel, FieldErrorsNameTheJsonPath) {
  try {
    parse(R"({"nodes":[{"id":"a","kind":"screen"}],
              "edges":[{"id":"x","source":"a","target":"a","action":"JUMP"}],"start":"a"})");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.where(), "/edges/0/action");
  }
  EXPECT_THROW(parse(R"({"nodes":[{"id":"a","kind":"window"}],"edges":[],"start":"a"})"),
               ParseError);
  EXPECT_THROW(parse(R"({"nodes":[{"id":"a","kind":"screen"}],"edges":[]})"), ParseError);
}

TEST(LoadModel, LabelDefaultsToId) {
  const auto m = parse(R"({"nodes":[{"id":"a","kind":"nested-container"}],"edges":[],"start":"a"})");
  EXPECT_EQ(m.nodes()[0].label, "a");
  EXPECT_EQ(m.nodes()[0].kind, NodeKind::NestedContainer);
}

TEST(LoadModel, AbstractFixtureCounts) {
  const auto m = fixture::abstract_model();
  EXPECT_EQ(m.node_count(), 8u);
  EXPECT_EQ(m.edge_count(), 20u);
  EXPECT_EQ(m.start(), "s1/e1");
  EXPECT_TRUE(m.end_nodes().empty());
  std::size_t loops = 0;
  for (const auto& e : m.edges()) loops += e.is_loop();
  EXPECT_EQ(loops, 2u);
}

TEST(Validate, AbstractFixtureIsClean) {
  EXPECT_TRUE(validate(fixture::abstract_model().to_document()).empty());
}

TEST(Validate, DuplicateSourceActionListed) {
  ModelDocument d = two_nodes();
  d.edges.push_back({"up1", "a", "b", Action::Up});
  d.edges.push_back({"up2", "a", "a", Action::Up});
  const auto vs = validate(d);
  ASSERT_TRUE(has_code(vs, "nondeterministic-action"));
  const auto& v = *std::find_if(vs.begin(), vs.end(),
                                [](const Violation& v) { return v.code == "nondeterministic-action"; });
  EXPECT_EQ(v.ids, (std::vector<std::string>{"a", "up1", "up2"}));
  EXPECT_THROW(InteractionModel::from_document(d), ValidationError);
}

TEST(Validate, ParallelEdgesWithDifferentActionsAreLegal) {
  ModelDocument d = two_nodes();
  d.edges.push_back({"ab2", "a", "b", Action::Down});
  EXPECT_TRUE(validate(d).empty());
  EXPECT_EQ(InteractionModel::from_document(d).edge_count(), 2u);
}

TEST(Validate, UnreachableNodeIsOnlyAWarning) {
  ModelDocument d = two_nodes();
  d.nodes.push_back({"island", NodeKind::Screen, "Island"});
  const auto vs = validate(d);
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(vs[0].code, "unreachable");
  EXPECT_EQ(vs[0].severity, Violation::Severity::Warning);
  EXPECT_EQ(vs[0].ids, std::vector<std::string>{"island"});
  const auto m = InteractionModel::from_document(d);
  EXPECT_EQ(m.warnings().size(), 1u);
}

TEST(Validate, StructuralErrors) {
  ModelDocument empty;
  EXPECT_TRUE(has_code(validate(empty), "empty-model"));
  EXPECT_TRUE(has_code(validate(empty), "missing-start"));

  ModelDocument d = two_nodes();
  d.nodes.push_back({"a", NodeKind::Screen, "again"});
  d.edges.push_back({"ab", "b", "a", Action::Left});
  d.edges.push_back({"bx", "b", "x", Action::Ok});
  d.start = "zzz";
  const auto vs = validate(d);
  for (const char* code : {"duplicate-node", "duplicate-edge", "dangling-target", "missing-start"}) {
    EXPECT_TRUE(has_code(vs, code)) << code;
  }
}

TEST(SaveModel, RoundTripSingleNode) {
  const auto m = parse(R"({"nodes":[{"id":"home","kind":"screen","label":"Home"}],
                           "edges":[],"start":"home"})");
  EXPECT_EQ(parse(save_model(m)), m);
}

TEST(SaveModel, RoundTripAbstractModelAndLoopPreserved) {
  const auto m = fixture::abstract_model();
  const auto back = parse(save_model(m));
  EXPECT_EQ(back, m);
  EXPECT_TRUE(structurally_equal(back, m));
  const Edge* loop = back.transition("s3/e8", Action::Ok);
  ASSERT_NE(loop, nullptr);
  EXPECT_TRUE(loop->is_loop());
}

TEST(StructuralEquality, IgnoresOrderAndEdgeIds) {
  ModelDocument d = fixture::abstract_model().to_document();
  ModelDocument shuffled = d;
  std::mt19937_64 rng(3);
  std::shuffle(shuffled.nodes.begin(), shuffled.nodes.end(), rng);
  std::shuffle(shuffled.edges.begin(), shuffled.edges.end(), rng);
  for (auto& e : shuffled.edges) e.id = "renamed-" + e.id;
  const auto a = InteractionModel::from_document(d);
  const auto b = InteractionModel::from_document(shuffled);
  EXPECT_FALSE(a == b);
  EXPECT_TRUE(structurally_equal(a, b));
  EXPECT_EQ(structural_diff(a, b), "");

  shuffled.nodes[0].label = "changed";
  const auto c = InteractionModel::from_document(shuffled);
  EXPECT_FALSE(structurally_equal(a, c));
  EXPECT_NE(structural_diff(a, c), "");
}

TEST(ModelProperty, RandomModelsRoundTrip) {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 300; ++i) {
    const auto m = InteractionModel::from_document(oracle::random_document(rng, 8, 20));
    const auto back = parse(save_model(m));
    ASSERT_TRUE(structurally_equal(back, m)) << structural_diff(back, m);
    ASSERT_EQ(back, m);
  }
}

TEST(ModelProperty, OutgoingActionsPairwiseDistinct) {
  std::mt19937_64 rng(102);
  for (int i = 0; i < 200; ++i) {
    const auto m = InteractionModel::from_document(oracle::random_document(rng, 8, 30));
    for (std::size_t n = 0; n < m.node_count(); ++n) {
      std::set<Action> seen;
      for (std::size_t e : m.outgoing(n)) ASSERT_TRUE(seen.insert(m.edges()[e].action).second);
    }
  }
}

TEST(ModelProperty, EndNodesFollowEdgeEdits) {
  std::mt19937_64 rng(103);
  for (int i = 0; i < 200; ++i) {
    auto m = InteractionModel::from_document(oracle::random_document(rng, 6, 10));
    for (int step = 0; step < 6; ++step) {
      // recompute N_e from the edge list
      std::set<std::string> sources;
      for (const auto& e : m.edges()) sources.insert(e.source);
      std::vector<std::string> expected;
      for (const auto& n : m.nodes()) {
        if (!sources.count(n.id)) expected.push_back(n.id);
      }
      ASSERT_EQ(m.end_nodes(), expected);

      if (!m.end_nodes().empty() && rng() % 2 == 0) {
        const std::string n = m.end_nodes().front();
        m = apply_edit(m, edit::AddEdge{{"new" + std::to_string(step), n, m.start(), Action::Back}});
        ASSERT_FALSE(m.is_end_node(n));
      } else if (m.edge_count() > 0) {
        m = apply_edit(m, edit::RemoveEdge{m.edges()[rng() % m.edge_count()].id});
      }
    }
  }
}
