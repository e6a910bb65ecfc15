// Static description of the ways one transition can fire. Shared by the
// emitter (scenario families) and the explorer (stimulus choices).
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "flowspec/model.hpp"

namespace flowspec {

struct FiringSelection {
  std::vector<std::size_t> inputs;   // indices into TransitionDecl::inputs
  std::vector<std::size_t> outputs;  // indices into TransitionDecl::outputs
  std::size_t family_index = 0;      // 1-based position in the full family
};

struct SelectionPolicy {
  bool per_input = false;   // one selection per input branch instead of all
  bool per_output = false;  // one selection per output branch (non-or splits)
};

/// Cartesian family of input and output selections. Or-splits enumerate every
/// nonempty subset of guarded branches, with mandatory branches always in.
std::vector<FiringSelection> firing_selections(const TransitionDecl& transition,
                                               SelectionPolicy policy);

/// Events and guard literals that make exactly `selection` fire.
struct Stimulus {
  std::vector<std::string> events;
  std::vector<GuardLiteral> literals;
  bool realizable = true;
};

/// `isolate` additionally falsifies the guards of simple transitions that
/// share a source and trigger, so only the intended transition is enabled.
Stimulus stimulus_for(const ProcessModel& model, const TransitionDecl& transition,
                      const FiringSelection& selection, bool isolate);

/// Expected effect of firing `selection` from the default configuration of
/// its sources, computed from the declarations alone.
struct FiringPlan {
  std::vector<std::string> given_leaves;  // active leaves before firing
  std::vector<std::string> trace;         // exit, branch, shared, output, entry actions
  std::vector<std::string> exit_actions;
  std::vector<std::string> entered_leaves;  // in output order
  bool exits_any_actions() const { return !exit_actions.empty(); }
};

FiringPlan plan_firing(const ModelIndex& index, const TransitionDecl& transition,
                       const FiringSelection& selection);

/// Deepest state that is a proper ancestor of every source and target; the
/// states below it on both sides are exited and entered.
std::optional<std::string> firing_boundary(const ModelIndex& index,
                                           const std::vector<std::string>& sources,
                                           const std::vector<std::string>& targets);

/// States entered when landing on `target` below `boundary`, outermost first.
std::vector<std::string> entered_states(const ModelIndex& index, const std::string& target,
                                        const std::optional<std::string>& boundary);

/// States exited when leaving `leaf` up to `boundary`, innermost first.
std::vector<std::string> exited_states(const ModelIndex& index, const std::string& leaf,
                                       const std::optional<std::string>& boundary);

}  // namespace flowspec
