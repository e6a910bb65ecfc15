#include <doctest.h>

#include <algorithm>
#include <random>

#include "../support/random_model.hpp"
#include "fixtures.hpp"
#include "flowspec/infer.hpp"

using namespace flowspec;

namespace {

bool has_code(const std::vector<Diagnostic>& ds, const std::string& code) {
  return std::any_of(ds.begin(), ds.end(), [&](const Diagnostic& d) { return d.code == code; });
}

Inference infer_text(const std::string& text) { return infer_model(parse_feature(text)); }

}  // namespace

TEST_CASE("strict emission of M1 infers M1 without diagnostics") {
  auto m = fixture("M1.pml");
  auto inf = infer_model(parse_feature(format_feature(emit_feature(m, EmitMode::Strict), Style::Gherkin)));
  CHECK(inf.diagnostics.empty());
  CHECK(isomorphic(inf.model, m));
}

TEST_CASE("strict round trip on fixtures and random models") {
  std::mt19937 rng(3);
  std::vector<ProcessModel> models;
  for (int i = 1; i <= 9; ++i) models.push_back(fixture("M" + std::to_string(i) + ".pml"));
  for (int i = 0; i < 40; ++i) {
    if (auto m = testing::random_model(rng)) models.push_back(*m);
  }
  for (const auto& m : models) {
    auto text = format_feature(emit_feature(m, EmitMode::Strict), Style::PaperUpper);
    auto inf = infer_model(parse_feature(text));
    CHECK_FALSE(has_errors(inf.diagnostics));
    CHECK(isomorphic(inf.model, m));
    CHECK(format_feature(emit_feature(inf.model, EmitMode::Strict), Style::PaperUpper) == text);
  }
}

TEST_CASE("tampered declarations are caught by replay") {
  auto doc = emit_feature(fixture("M1.pml"), EmitMode::Strict);
  doc.hints.transitions[1].inputs[0].actions = {"a9"};
  doc.hints.actions.push_back("a9");
  auto inf = infer_model(doc);
  CHECK(has_code(inf.diagnostics, "ScenarioMismatch"));
}

TEST_CASE("synchronization rows fold into an and-join") {
  auto inf = infer_text("GIVEN S1\nWHEN ev1\nTHEN a1 AND a3\n\nGIVEN S2\nWHEN ev2\nTHEN a2 AND a3\n");
  REQUIRE(inf.model.transitions.size() == 1);
  const auto& t = inf.model.transitions[0];
  CHECK(t.join == JoinKind::And);
  CHECK(t.inputs.size() == 2);
  CHECK(t.inputs[0].actions == std::vector<std::string>{"a1"});
  CHECK(t.inputs[1].event == std::optional<std::string>("ev2"));
  CHECK(t.shared_actions == std::vector<std::string>{"a3"});
  CHECK(has_code(inf.diagnostics, "AmbiguousJoin"));
  CHECK(has_code(inf.diagnostics, "SyntheticSink"));
  CHECK(t.outputs[0].target == "_after_Scenario_1");
}

TEST_CASE("bare WHEN terms of an exclusive choice are events, flagged") {
  auto inf = infer_text("GIVEN S1\nWHEN g1\nTHEN a1\n\nGIVEN S1\nWHEN g2\nTHEN a2\n");
  REQUIRE(inf.model.transitions.size() == 2);
  CHECK(inf.model.transitions[0].inputs[0].event == std::optional<std::string>("g1"));
  CHECK(has_code(inf.diagnostics, "AmbiguousTerm"));
}

TEST_CASE("hinted guards make the exclusive choice exact") {
  auto inf = infer_text("# guards: g1, g2\nGIVEN S1\nWHEN g1\nTHEN a1\n\nGIVEN S1\nWHEN g2\nTHEN a2\n");
  REQUIRE(inf.model.transitions.size() == 2);
  CHECK_FALSE(inf.model.transitions[0].inputs[0].event);
  CHECK(inf.model.transitions[0].outputs[0].guard == GuardExpr{{{"g1", false}}});
  CHECK_FALSE(has_code(inf.diagnostics, "AmbiguousTerm"));
}

TEST_CASE("a multiple choice family folds into an or-split") {
  auto inf = infer_text(
      "GIVEN S1 AND g1 AND NOT g2\nWHEN ev1\nTHEN a1 AND a2\n\n"
      "GIVEN S1 AND g2 AND NOT g1\nWHEN ev1\nTHEN a1 AND a3\n\n"
      "GIVEN S1 AND g1 AND g2\nWHEN ev1\nTHEN a1 AND a2 AND a3\n");
  REQUIRE(inf.model.transitions.size() == 1);
  const auto& t = inf.model.transitions[0];
  CHECK(t.split == SplitKind::Or);
  REQUIRE(t.outputs.size() == 2);
  CHECK(t.outputs[0].guard == GuardExpr{{{"g1", false}}});
  CHECK(t.outputs[0].actions == std::vector<std::string>{"a2"});
  CHECK(t.outputs[1].actions == std::vector<std::string>{"a3"});
  CHECK(t.inputs[0].actions == std::vector<std::string>{"a1"});
  CHECK_FALSE(has_errors(inf.diagnostics));
}

TEST_CASE("synchronize merge row becomes a join with paired events") {
  auto inf = infer_text("GIVEN S1 AND S2\nWHEN e1 AND e2 AND e3\nTHEN a1; a2; a3 AND S3\n");
  REQUIRE(inf.model.transitions.size() == 1);
  const auto& t = inf.model.transitions[0];
  CHECK(t.join == JoinKind::And);
  CHECK(t.inputs[0].event == std::optional<std::string>("e1"));
  CHECK(t.inputs[1].event == std::optional<std::string>("e2"));
  CHECK(t.shared_event == std::optional<std::string>("e3"));
  CHECK(t.outputs[0].target == "S3");
  CHECK(has_code(inf.diagnostics, "AmbiguousJoin"));
}

TEST_CASE("multiple merge rows fold on their shared suffix") {
  auto inf = infer_text(
      "GIVEN S1\nWHEN ev1 AND g1\nTHEN a1; a4 AND S4\n\nGIVEN S2\nWHEN ev2 AND g1\nTHEN a2; a4 AND S4\n\n"
      "GIVEN S3\nWHEN ev3 AND g1\nTHEN a3; a4 AND S4\n");
  REQUIRE(inf.model.transitions.size() == 1);
  const auto& t = inf.model.transitions[0];
  CHECK(t.inputs.size() == 3);
  CHECK(t.shared_actions == std::vector<std::string>{"a4"});
  CHECK(t.outputs[0].target == "S4");
}

TEST_CASE("Table 1 rows infer the embedded statechart") {
  auto inf = infer_model(parse_feature(read_file(fixture_path("table1.feature"))));
  const auto& m = inf.model;
  ModelIndex index(m);
  REQUIRE(index.is_composite("S6"));
  CHECK(index.node("S6")->initial_child == std::optional<std::string>("1"));
  CHECK(index.node("S6")->children.size() == 3);
  int touching = 0;
  for (const auto& t : m.transitions) {
    bool inside = index.is_descendant_or_self(t.inputs[0].source, "S6") ||
                  index.is_descendant_or_self(t.outputs[0].target, "S6");
    if (index.is_state(t.inputs[0].source) || index.is_state(t.outputs[0].target)) touching += inside;
  }
  CHECK(touching == 5);
  auto t2 = std::find_if(m.transitions.begin(), m.transitions.end(),
                         [](const TransitionDecl& t) { return t.inputs[0].source == "S1"; });
  REQUIRE(t2 != m.transitions.end());
  CHECK(t2->split == SplitKind::And);
  CHECK(t2->outputs.size() == 2);
  CHECK_FALSE(has_errors(inf.diagnostics));
}

TEST_CASE("inference is deterministic") {
  auto text = read_file(fixture_path("table1.feature"));
  auto a = infer_model(parse_feature(text));
  auto b = infer_model(parse_feature(text));
  CHECK(a.model == b.model);
  CHECK(a.diagnostics == b.diagnostics);
}

TEST_CASE("extra hints override the document") {
  InferenceHints extra;
  extra.final_name = "Done";
  auto inf = infer_model(parse_feature("GIVEN S1\nWHEN ev1\nTHEN a1 AND Done\n"), extra);
  CHECK(inf.model.final_name == "Done");
  CHECK(inf.model.transitions[0].outputs[0].target == "Done");
  CHECK(inf.model.states.size() == 1);
}
