#include <doctest.h>

#include <random>

#include "../support/random_model.hpp"
#include "fixtures.hpp"
#include "flowspec/gwt.hpp"

using namespace flowspec;

TEST_CASE("bare paper code parses into one scenario") {
  auto doc = parse_feature("GIVEN S1\nWHEN ev1\nTHEN a1\n");
  REQUIRE(doc.scenarios.size() == 1);
  const auto& s = doc.scenarios[0];
  CHECK(s.given == std::vector<Term>{{"S1", false, std::nullopt}});
  CHECK(s.when == std::vector<Term>{{"ev1", false, std::nullopt}});
  CHECK(s.then == std::vector<ThenItem>{ThenItem::actions({"a1"})});
}

TEST_CASE("negation and conjunction") {
  auto doc = parse_feature(
      "GIVEN S1 AND g1 AND NOT g2\nWHEN ev1\nTHEN a1 AND a2\n\n"
      "GIVEN S1 AND g2 AND NOT g1\nWHEN ev1\nTHEN a1 AND a3\n");
  REQUIRE(doc.scenarios.size() == 2);
  const auto& g = doc.scenarios[0].given;
  REQUIRE(g.size() == 3);
  CHECK(g[1] == Term{"g1", false, std::nullopt});
  CHECK(g[2] == Term{"g2", true, TermRole::Guard});
  CHECK(doc.scenarios[1].name == "Scenario 2");
}

TEST_CASE("action sequences and state terms") {
  auto doc = parse_feature("# states: S1, S2, S3\nGIVEN S1 AND S2\nWHEN e1 AND e2\nTHEN a1; a2; a3 AND S3\n");
  const auto& then = doc.scenarios[0].then;
  REQUIRE(then.size() == 2);
  CHECK(then[0] == ThenItem::actions({"a1", "a2", "a3"}));
  CHECK(then[1] == ThenItem::state("S3"));
}

TEST_CASE("gherkin casing with And and But continuations") {
  auto doc = parse_feature(
      "Feature: Orders\n  As a clerk\n  I request speed\n  To gain money\n\n"
      "  Scenario: first\n    given S1\n    And g1\n    when ev1\n    then a1\n    but a2\n");
  CHECK(doc.title == "Orders");
  CHECK(doc.role == "clerk");
  CHECK(doc.feature == "speed");
  CHECK(doc.benefit == "money");
  REQUIRE(doc.scenarios.size() == 1);
  CHECK(doc.scenarios[0].name == "first");
  CHECK(doc.scenarios[0].given.size() == 2);
  CHECK(doc.scenarios[0].then.size() == 2);
}

TEST_CASE("quoted text keeps its AND") {
  auto doc = parse_feature("Given a \"rock AND roll\" band\nWhen it plays\nThen \"loud; very\"\n");
  CHECK(doc.scenarios[0].given[0].atom == "a \"rock AND roll\" band");
  CHECK(doc.scenarios[0].then[0].names.size() == 1);
}

TEST_CASE("parse errors") {
  CHECK(error_code([] { parse_feature(""); }) == "EmptyDocument");
  CHECK(error_code([] { parse_feature("# only a comment\n"); }) == "EmptyDocument");
  CHECK(error_code([] { parse_feature("GIVEN S1\nWHEN ev1\n"); }) == "MalformedClause");
  CHECK(error_code([] { parse_feature("GIVEN S1 AND\nWHEN e\nTHEN a\n"); }) == "MalformedClause");
  CHECK(error_code([] { parse_feature("GIVEN S1\nWHEN e\nTHEN a;\n"); }) == "MalformedClause");
  CHECK(error_code([] { parse_feature("AND S1\n"); }) == "MalformedClause");
  try {
    parse_feature("GIVEN S1\n  WHILE ev1\nTHEN a1\n", "x.feature");
    FAIL("expected UnknownKeyword");
  } catch (const SyntaxError& e) {
    CHECK(e.code() == "UnknownKeyword");
    CHECK(e.span().line == 2);
    CHECK(e.span().column == 3);
  }
}

TEST_CASE("format then parse is the identity on emitted documents") {
  std::mt19937 rng(11);
  std::vector<ProcessModel> models;
  for (int i = 1; i <= 9; ++i) models.push_back(fixture("M" + std::to_string(i) + ".pml"));
  for (int i = 0; i < 60; ++i) {
    if (auto m = testing::random_model(rng)) models.push_back(*m);
  }
  for (const auto& m : models) {
    for (auto mode : {EmitMode::PaperExact, EmitMode::Strict}) {
      auto doc = emit_feature(m, mode);
      for (auto style : {Style::PaperUpper, Style::Gherkin}) {
        CHECK(parse_feature(format_feature(doc, style)) == doc);
      }
    }
  }
}
