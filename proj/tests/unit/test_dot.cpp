#include <doctest.h>

#include "../support/oracles.hpp"
#include "fixtures.hpp"
#include "flowspec/model_io.hpp"

using namespace flowspec;

TEST_CASE("DOT output parses and counts nodes and edges") {
  for (int i = 1; i <= 9; ++i) {
    auto m = fixture("M" + std::to_string(i) + ".pml");
    ModelIndex index(m);
    auto summary = testing::check_dot(render_dot(m));
    REQUIRE_MESSAGE(summary.valid, summary.error);
    std::size_t pseudo = 1 + (index.is_final_referenced() ? 1 : 0);
    CHECK(summary.nodes == index.state_paths().size() + pseudo);
    std::size_t edges = 0;
    for (const auto& t : m.transitions) edges += t.inputs.size() * t.outputs.size();
    CHECK(summary.edges == edges);
  }
}

TEST_CASE("DOT labels show trigger, guard and actions") {
  auto dot = render_dot(fixture("M6.pml"));
  CHECK(dot.find("\"S1\" -> \"S3\" [label=\"ev1 [g1] / a2\", tooltip=\"t1\"]") != std::string::npos);
  CHECK(dot.find("subgraph") == std::string::npos);
  auto nested = render_dot(fixture("M9.pml"));
  CHECK(nested.find("subgraph \"cluster_S6\"") != std::string::npos);
}

TEST_CASE("DOT escapes quotes in names") {
  ProcessModel m = fixture("M1.pml");
  m.title = "say \"hi\"";
  CHECK(testing::check_dot(render_dot(m)).valid);
}

TEST_CASE("DOT checker rejects broken input") {
  CHECK_FALSE(testing::check_dot("digraph { \"a\" -> \"b\" ").valid);
  CHECK_FALSE(testing::check_dot("graph { a }").valid);
  CHECK_FALSE(testing::check_dot("digraph { a; a -> b; }").valid);
  CHECK(testing::check_dot("digraph g { a; b; a -> b [label=\"x\"]; }").edges == 1);
}
