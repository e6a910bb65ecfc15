// Workflow-pattern classification and semantic lint.
#pragma once

#include <set>
#include <string>
#include <vector>

#include "flowspec/model.hpp"

namespace flowspec {

struct PatternInstance {
  PatternKind kind = PatternKind::Sequence;
  std::string transition_id;
  std::vector<std::string> notes;
};

/// Per-state special case: EntryExitCase or EmbeddedStates.
struct StateCase {
  PatternKind kind = PatternKind::EntryExitCase;
  std::string state;
};

struct Classification {
  std::vector<PatternInstance> transitions;  // one per transition, declaration order
  std::vector<StateCase> states;
};

/// Classifies every transition. Precedence: join kind, then split kind, then
/// competing guarded siblings (ExclusiveChoice), else Sequence.
Classification classify(const ProcessModel& model);

PatternKind classify_transition(const ProcessModel& model, const TransitionDecl& transition);

/// Targets of every or-split output branch.
std::set<std::string> or_split_targets(const ProcessModel& model);

/// Whether two conjunctive guards can hold at once. A null guard is `true`.
bool guards_overlap(const GuardExpr* a, const GuardExpr* b);

/// Largest number of distinct atoms the overlap check accepts per pair.
inline constexpr std::size_t kMaxOverlapAtoms = 16;

/// Hazards: OverlappingGuards, UnreachableState, OrJoinWithoutOrSplit,
/// DanglingFinal, GuardAtomLimit. All are warnings.
std::vector<Diagnostic> lint(const ProcessModel& model);

}  // namespace flowspec
