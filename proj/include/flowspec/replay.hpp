// Operational semantics: enabling, stepping, scenario conformance, coverage
// and bounded exploration.
#pragma once

#include <set>
#include <string>
#include <vector>

#include "flowspec/gwt.hpp"
#include "flowspec/model.hpp"

namespace flowspec {

/// NondeterminismConflict, IllegalGiven, IllegalConfiguration, DepthBound.
class ReplayError : public Error {
 public:
  ReplayError(std::string code, const std::string& message, std::vector<std::string> transitions = {})
      : Error(std::move(code), message), transitions_(std::move(transitions)) {}

  const std::vector<std::string>& transitions() const { return transitions_; }

 private:
  std::vector<std::string> transitions_;
};

using EventSet = std::set<std::string>;

struct StepResult {
  std::vector<std::string> fired;  // transition ids, declaration order
  std::vector<std::string> trace;  // actions in execution order
  Configuration after;
};

/// Ids of transitions that would fire under the given stimulus.
std::vector<std::string> enabled(const ProcessModel& model, const Configuration& config,
                                 const EventSet& events, const Valuation& valuation);

/// Fires every enabled transition. Throws ReplayError(NondeterminismConflict)
/// when two of them compete for the same active state.
StepResult step(const ProcessModel& model, const Configuration& config, const EventSet& events,
                const Valuation& valuation);

/// False when two distinct active leaves share a composite ancestor.
bool is_legal(const ModelIndex& index, const Configuration& config);

struct Mismatch {
  std::string expected;
  std::string observed;
  std::size_t position = 0;

  bool operator==(const Mismatch&) const = default;
};

struct Verdict {
  std::string scenario;
  bool passed = false;
  std::vector<Mismatch> mismatches;
  std::vector<std::string> fired;
};

/// Runs one step from the GIVEN configuration and compares with THEN.
/// Strict mode wants the exact trace (AND-groups in any order) and the exact
/// final configuration; paper mode wants THEN actions as an ordered
/// subsequence of the trace and THEN states active afterwards.
/// Throws ReplayError(IllegalGiven) when GIVEN names no legal configuration.
Verdict replay_scenario(const ProcessModel& model, const Scenario& scenario, EmitMode mode);

struct SuiteReport {
  std::vector<Verdict> verdicts;
  double coverage = 0.0;
  std::vector<std::string> uncovered;

  bool all_passed() const;
};

SuiteReport check_suite(const ProcessModel& model, const FeatureDoc& doc, EmitMode mode);

/// JSON object with fields verdicts, coverage, uncovered.
std::string report_json(const SuiteReport& report, int indent = 2);

struct ExploreStep {
  std::vector<std::string> fired;
  std::vector<std::string> events;
  std::vector<GuardLiteral> literals;
  std::vector<std::string> trace;
  Configuration after;
};

using ExploreTrace = std::vector<ExploreStep>;

inline constexpr int kMaxExploreDepth = 32;

/// Maximal stimulus sequences of at most `depth_bound` steps from the initial
/// configuration, in a deterministic order.
std::vector<ExploreTrace> explore(const ProcessModel& model, int depth_bound);

}  // namespace flowspec
