#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "flowspec/model_io.hpp"

using namespace flowspec;

namespace {

std::vector<std::string> codes(const ProcessModel& m) {
  std::vector<std::string> out;
  for (const auto& d : validate(m)) out.push_back(d.code);
  return out;
}

bool has(const std::vector<std::string>& list, const std::string& code) {
  return std::find(list.begin(), list.end(), code) != list.end();
}

}  // namespace

TEST_CASE("fixtures validate cleanly") {
  for (int i = 1; i <= 9; ++i) {
    auto m = fixture("M" + std::to_string(i) + ".pml");
    CHECK(validate(m).empty());
  }
}

TEST_CASE("index over the Table 1 hierarchy") {
  auto m = fixture("M9.pml");
  ModelIndex index(m);
  CHECK(index.state_paths() == std::vector<std::string>{"S1", "S2", "S3", "S5", "S6", "S6.1", "S6.2", "S6.3"});
  CHECK(index.is_composite("S6"));
  CHECK_FALSE(index.is_composite("S6.1"));
  CHECK(index.parent("S6.2") == std::optional<std::string>("S6"));
  CHECK(index.default_leaf("S6") == "S6.1");
  CHECK(index.default_entry_chain("S6") == std::vector<std::string>{"S6", "S6.1"});
  CHECK(index.is_pseudostate("alpha"));
  CHECK(index.is_pseudostate("Beta"));
  CHECK(index.is_final_referenced());
  CHECK(index.common_ancestor({"S6.1", "S6.2"}) == std::optional<std::string>("S6"));
  CHECK_FALSE(index.common_ancestor({"S6.1", "S5"}));
  CHECK(index.entry_actions("S1") == std::vector<std::string>{"a2"});
  CHECK(index.exit_actions("S1") == std::vector<std::string>{"a3", "a4"});
  CHECK(resolve(m, "S6.3").node != nullptr);
  CHECK(resolve(m, "alpha").role == StateRole::Initial);
  CHECK(error_code([&] { resolve(m, "S7"); }) == "UnknownState");
}

TEST_CASE("final pseudostate exists only when targeted") {
  ModelIndex index(fixture("M1.pml"));
  CHECK_FALSE(index.is_final_referenced());
  CHECK_FALSE(index.is_node("Beta"));
}

TEST_CASE("guard evaluation treats unmentioned atoms as false") {
  GuardExpr g{{{"g1", false}, {"g2", true}}};
  CHECK(g.holds({{"g1", true}}));
  CHECK_FALSE(g.holds({}));
  CHECK_FALSE(g.holds({{"g1", true}, {"g2", true}}));
  CHECK(g.to_string() == "g1 and not g2");
}

TEST_CASE("validation reports structural problems") {
  auto base = fixture("M1.pml");

  SUBCASE("duplicate transition id") {
    auto m = base;
    m.transitions[1].id = "t0";
    CHECK(has(codes(m), "DuplicateTransitionId"));
  }
  SUBCASE("unresolved endpoint") {
    auto m = base;
    m.transitions[1].outputs[0].target = "S9";
    CHECK(has(codes(m), "UnresolvedEndpoint"));
  }
  SUBCASE("final with outgoing") {
    auto m = base;
    m.transitions[1].outputs[0].target = "Beta";
    m.transitions.push_back({"t2", {{"Beta", "ev2", {}}}, SplitKind::None, JoinKind::None, {}, {}, {}, {{"S1", {}, {}, false}}});
    CHECK(has(codes(m), "FinalHasOutgoing"));
  }
  SUBCASE("initial with incoming") {
    auto m = base;
    m.transitions[1].outputs[0].target = "alpha";
    CHECK(has(codes(m), "InitialHasIncoming"));
  }
  SUBCASE("multiple inputs without a join kind") {
    auto m = base;
    m.transitions[1].inputs.push_back({"S2", "ev2", {}});
    CHECK(has(codes(m), "JoinRequired"));
  }
  SUBCASE("multiple outputs without a split kind") {
    auto m = base;
    m.transitions[1].outputs.push_back({"S1", std::nullopt, {}, false});
    CHECK(has(codes(m), "SplitRequired"));
  }
  SUBCASE("or-split branch without guard") {
    auto m = fixture("M6.pml");
    m.transitions[1].outputs[1].guard.reset();
    m.transitions[1].outputs[2].guard.reset();
    CHECK(has(codes(m), "OrSplitWithoutGuard"));
  }
  SUBCASE("guarded and-split branch") {
    auto m = fixture("M2.pml");
    m.transitions[1].outputs[0].guard = GuardExpr{{{"g", false}}};
    CHECK(has(codes(m), "AndSplitGuard"));
  }
  SUBCASE("transition without trigger") {
    auto m = base;
    m.transitions[1].inputs[0].event.reset();
    CHECK(has(codes(m), "MissingTrigger"));
  }
  SUBCASE("name used as state and event") {
    auto m = base;
    m.transitions[1].inputs[0].event = "S2";
    CHECK(has(codes(m), "NamespaceOverlap"));
  }
  SUBCASE("state named like a pseudostate") {
    auto m = base;
    m.states[0].name = "alpha";
    CHECK(has(codes(m), "PseudostateClash"));
  }
  SUBCASE("composite without initial child") {
    auto m = fixture("M9.pml");
    m.states[4].initial_child.reset();
    CHECK(has(codes(m), "MissingInitialChild"));
  }
  SUBCASE("contradictory guard") {
    auto m = fixture("M4.pml");
    m.transitions[1].outputs[0].guard = GuardExpr{{{"g1", false}, {"g1", true}}};
    CHECK(has(codes(m), "DuplicateGuardAtom"));
  }
}

TEST_CASE("isomorphism ignores transition ids only") {
  auto a = fixture("M3.pml");
  auto b = a;
  b.transitions[0].id = "x";
  b.transitions[1].id = "y";
  CHECK(isomorphic(a, b));
  b.transitions[1].shared_actions = {"zz"};
  CHECK_FALSE(isomorphic(a, b));
}

TEST_CASE("normalize folds shared parts of single-input transitions") {
  TransitionDecl t{"t", {{"S1", std::nullopt, {}}}, SplitKind::None, JoinKind::None, "ev", std::nullopt, {"a"},
                   {{"S2", std::nullopt, {}, false}}};
  normalize(t);
  CHECK(t.inputs[0].event == std::optional<std::string>("ev"));
  CHECK(t.inputs[0].actions == std::vector<std::string>{"a"});
  CHECK_FALSE(t.shared_event);
  CHECK(t.shared_actions.empty());
}
